use std::collections::{BTreeMap, BTreeSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::problem::PlanningProblem;
use crate::plan::{DataFlow, DeploymentPlan};
use crate::report::{Finding, FindingCode, ValidationReport};
use crate::resources::path_metrics;

/// Verifies a plan against its problem from first principles: component
/// mapping, collocation, platform, memory, pins, connection requirements
/// (recomputed from the catalog), data flows, and launch order.
///
/// Shares no code with the planners; it is the soundness oracle for them.
pub fn check_plan(problem: &PlanningProblem, plan: &DeploymentPlan) -> ValidationReport {
    let mut findings = Vec::new();
    let assembly = problem.assembly();
    let catalog = problem.catalog();
    let partition = problem.partition();

    if plan.problem_digest != problem.digest() {
        findings.push(Finding::error(
            FindingCode::DigestMismatch,
            "plan",
            format!(
                "plan digest {} does not match the inputs ({})",
                plan.problem_digest,
                problem.digest()
            ),
        ));
    }

    // component -> (server, node, implementation index)
    let mut placement: BTreeMap<&str, (&str, &str, usize)> = BTreeMap::new();
    let mut duplicated = BTreeSet::new();
    let mut server_ids = BTreeSet::new();
    for server in &plan.servers {
        if !server_ids.insert(server.server_id.as_str()) {
            findings.push(Finding::error(
                FindingCode::ServerMismatch,
                server.server_id.clone(),
                "server declared more than once",
            ));
        }
        if catalog.node(&server.node_id).is_none() {
            findings.push(Finding::error(
                FindingCode::UnknownNode,
                server.server_id.clone(),
                format!("server placed on unknown node `{}`", server.node_id),
            ));
        }
        for placed in &server.components {
            if assembly.component(&placed.id).is_none() {
                findings.push(Finding::error(
                    FindingCode::UnknownComponent,
                    placed.id.clone(),
                    format!("server `{}` hosts an undeclared component", server.server_id),
                ));
                continue;
            }
            let entry = (server.server_id.as_str(), server.node_id.as_str(), placed.implementation_index);
            if placement.insert(placed.id.as_str(), entry).is_some() {
                duplicated.insert(placed.id.as_str());
            }
        }
    }
    for id in &duplicated {
        findings.push(Finding::error(
            FindingCode::ComponentDuplicated,
            *id,
            "component placed in more than one server",
        ));
    }
    for component in &assembly.components {
        if !placement.contains_key(component.id.as_str()) {
            findings.push(Finding::error(
                FindingCode::ComponentUnmapped,
                component.id.clone(),
                "component is not placed in any server",
            ));
        }
    }

    // servers must be exactly the process groups, named after them
    let process_groups = partition.process_groups();
    for server in &plan.servers {
        let members: Vec<&str> = {
            let mut m: Vec<&str> = server.components.iter().map(|c| c.id.as_str()).collect();
            m.sort_unstable();
            m
        };
        let expected = process_groups
            .get(&server.server_id)
            .map(|v| v.iter().map(String::as_str).collect::<Vec<_>>());
        if expected.as_deref() != Some(members.as_slice()) {
            findings.push(Finding::error(
                FindingCode::ServerMismatch,
                server.server_id.clone(),
                format!(
                    "server hosts {members:?} but process group `{}` is {:?}",
                    server.server_id,
                    expected.unwrap_or_default()
                ),
            ));
        }
        let infrastructure = server
            .components
            .iter()
            .any(|c| assembly.component(&c.id).is_some_and(|d| d.is_infrastructure));
        if infrastructure != server.is_infrastructure {
            findings.push(Finding::error(
                FindingCode::ServerMismatch,
                server.server_id.clone(),
                format!("infrastructure flag should be {infrastructure}"),
            ));
        }
    }
    for (group, members) in &process_groups {
        let servers: BTreeSet<&str> = members
            .iter()
            .filter_map(|m| placement.get(m.as_str()).map(|p| p.0))
            .collect();
        if servers.len() > 1 {
            findings.push(Finding::error(
                FindingCode::ProcessCollocationViolated,
                group.clone(),
                format!("process group split across servers {servers:?}"),
            ));
        }
    }
    for (group, members) in partition.host_groups() {
        let nodes: BTreeSet<&str> = members
            .iter()
            .filter_map(|m| placement.get(m.as_str()).map(|p| p.1))
            .collect();
        if nodes.len() > 1 {
            findings.push(Finding::error(
                FindingCode::HostCollocationViolated,
                group.clone(),
                format!("host group split across nodes {nodes:?}"),
            ));
        }
    }

    // platform, capacity, pins
    let mut used: BTreeMap<&str, i64> = BTreeMap::new();
    for component in &assembly.components {
        let Some(&(_, node_id, index)) = placement.get(component.id.as_str()) else {
            continue;
        };
        let Some(node) = catalog.node(node_id) else { continue };
        match component.implementations.get(index) {
            None => findings.push(Finding::error(
                FindingCode::InvalidImplementation,
                component.id.clone(),
                format!("implementation index {index} out of range"),
            )),
            Some(alt) => {
                if !alt.runs_on(&node.arch, &node.os) {
                    findings.push(Finding::error(
                        FindingCode::PlatformMismatch,
                        component.id.clone(),
                        format!(
                            "implementation {index} targets {}/{} but node `{}` is {}/{}",
                            alt.arch, alt.os, node.id, node.arch, node.os
                        ),
                    ));
                }
                *used.entry(node_id).or_default() += alt.memory_mb;
            }
        }
        if let Some(site) = problem.goal().pins.get(&component.id) {
            if !catalog.group_contains(site, node_id) {
                findings.push(Finding::error(
                    FindingCode::PinViolated,
                    component.id.clone(),
                    format!("pinned to `{site}` but placed on `{node_id}`"),
                ));
            }
        }
    }
    for (node_id, total) in used {
        let capacity = catalog.node(node_id).map_or(0, |n| n.memory_mb as i64);
        if total > capacity {
            findings.push(Finding::error(
                FindingCode::CapacityExceeded,
                node_id,
                format!("{total} MB placed on a node with {capacity} MB"),
            ));
        }
    }

    // connections and data flows
    let mut expected_flows = BTreeSet::new();
    let mut declared = BTreeSet::new();
    for connection in &assembly.connections {
        declared.insert(connection.id.as_str());
        let source = placement.get(connection.source.component.as_str());
        let target = placement.get(connection.target.component.as_str());
        let (Some(&(source_server, source_node, _)), Some(&(target_server, target_node, _))) = (source, target) else {
            continue;
        };
        if source_server != target_server {
            expected_flows.insert(DataFlow::new(source_server, target_server, connection.id.clone()));
        }
        let Ok(measured) = path_metrics(catalog, source_node, target_node) else {
            continue;
        };
        if !measured.satisfies(connection.max_latency_ms, connection.min_bandwidth_mbps) {
            findings.push(Finding::error(
                FindingCode::ConnectionRequirementViolated,
                connection.id.clone(),
                format!(
                    "measured {measured} between `{source_node}` and `{target_node}` violates{}{}",
                    connection
                        .max_latency_ms
                        .map_or(String::new(), |b| format!(" maxLatencyMs={b}")),
                    connection
                        .min_bandwidth_mbps
                        .map_or(String::new(), |b| format!(" minBandwidthMbps={b}")),
                ),
            ));
        }
        let planned: Vec<_> = plan.connections.iter().filter(|c| c.connection_id == connection.id).collect();
        match planned.as_slice() {
            [] => findings.push(Finding::error(
                FindingCode::ConnectionMissing,
                connection.id.clone(),
                "connection absent from the plan",
            )),
            [cp] => {
                if cp.source_server != source_server || cp.target_server != target_server {
                    findings.push(Finding::error(
                        FindingCode::ConnectionMismatch,
                        connection.id.clone(),
                        format!("plan links {} -> {}, expected {source_server} -> {target_server}", cp.source_server, cp.target_server),
                    ));
                }
                if cp.required.max_latency_ms != connection.max_latency_ms
                    || cp.required.min_bandwidth_mbps != connection.min_bandwidth_mbps
                {
                    findings.push(Finding::error(
                        FindingCode::ConnectionMismatch,
                        connection.id.clone(),
                        "required bounds differ from the assembly",
                    ));
                }
                if cp.measured != measured {
                    findings.push(Finding::error(
                        FindingCode::StaleConnectionMetrics,
                        connection.id.clone(),
                        format!("plan records {} but the catalog gives {measured}", cp.measured),
                    ));
                }
            }
            _ => findings.push(Finding::error(
                FindingCode::ConnectionMismatch,
                connection.id.clone(),
                "connection listed more than once",
            )),
        }
    }
    for cp in &plan.connections {
        if !declared.contains(cp.connection_id.as_str()) {
            findings.push(Finding::error(
                FindingCode::ConnectionMismatch,
                cp.connection_id.clone(),
                "plan lists a connection the assembly does not declare",
            ));
        }
    }
    let planned_flows: BTreeSet<DataFlow> = plan.data_flows.iter().cloned().collect();
    if planned_flows != expected_flows || planned_flows.len() != plan.data_flows.len() {
        findings.push(Finding::error(
            FindingCode::DataFlowInvalid,
            "plan",
            format!(
                "data flows {:?} do not match the cross-server connections {:?}",
                plan.data_flows, expected_flows
            ),
        ));
    }

    findings.extend(check_launch_order(plan));
    ValidationReport::new(findings)
}

fn check_launch_order(plan: &DeploymentPlan) -> Vec<Finding> {
    let invalid = |message: String| Finding::error(FindingCode::LaunchOrderInvalid, "plan", message);
    let servers: BTreeMap<&str, bool> = plan
        .servers
        .iter()
        .map(|s| (s.server_id.as_str(), s.is_infrastructure))
        .collect();
    let mut rank: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, id) in plan.launch_order.iter().enumerate() {
        if rank.insert(id.as_str(), i).is_some() || !servers.contains_key(id.as_str()) {
            return vec![invalid(format!("launch order is not a permutation of the servers at `{id}`"))];
        }
    }
    if rank.len() != servers.len() {
        return vec![invalid("launch order is not a permutation of the servers".into())];
    }

    let mut findings = Vec::new();
    let last_infra = plan.launch_order.iter().rposition(|id| servers[id.as_str()]);
    let first_other = plan.launch_order.iter().position(|id| !servers[id.as_str()]);
    if let (Some(li), Some(fo)) = (last_infra, first_other) {
        if li > fo {
            findings.push(invalid(format!(
                "infrastructure server `{}` launches after `{}`",
                plan.launch_order[li], plan.launch_order[fo]
            )));
        }
    }

    // Ordering only binds flows between non-infrastructure servers that are
    // not on a common cycle.
    let mut graph = DiGraph::<&str, ()>::new();
    let mut nodes = BTreeMap::new();
    for (&id, &infra) in &servers {
        if !infra {
            nodes.insert(id, graph.add_node(id));
        }
    }
    for flow in &plan.data_flows {
        if let (Some(&p), Some(&c)) = (nodes.get(flow.producer.as_str()), nodes.get(flow.consumer.as_str())) {
            if p != c {
                graph.add_edge(p, c, ());
            }
        }
    }
    let mut scc_of = BTreeMap::new();
    let mut has_cycle = false;
    for (i, scc) in tarjan_scc(&graph).into_iter().enumerate() {
        has_cycle |= scc.len() > 1;
        for n in scc {
            scc_of.insert(graph[n], i);
        }
    }
    for flow in &plan.data_flows {
        let (p, c) = (flow.producer.as_str(), flow.consumer.as_str());
        let (Some(sp), Some(sc)) = (scc_of.get(p), scc_of.get(c)) else { continue };
        if sp != sc && rank[p] > rank[c] {
            findings.push(invalid(format!(
                "producer `{p}` launches after consumer `{c}` (connection `{}`)",
                flow.connection_id
            )));
        }
    }
    if has_cycle && !plan.has_warning(FindingCode::CycleWarning) {
        findings.push(invalid("data flows are cyclic but the plan carries no CYCLE_WARNING".into()));
    }
    findings
}
