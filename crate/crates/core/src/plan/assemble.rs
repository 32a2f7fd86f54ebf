use std::collections::BTreeMap;

use super::launch::compute_launch_order;
use super::model::{ConnectionPlan, DataFlow, DeploymentPlan, PlacedComponent, Requirement, ServerPlacement};
use crate::planner::{PlanError, PlanningProblem};
use crate::resources::path_between;

/// Builds the plan for a placement of host groups (by id) onto nodes (by id).
///
/// One component server per process group, data flows for connections that
/// cross servers, path metrics for every connection, and the launch order.
pub fn assemble_plan(
    problem: &PlanningProblem,
    placement: &BTreeMap<String, String>,
) -> Result<DeploymentPlan, PlanError> {
    let catalog = problem.catalog();
    let positions = problem
        .host_groups()
        .iter()
        .map(|group| {
            let node = placement
                .get(&group.id)
                .ok_or_else(|| PlanError::MissingPlacement(group.id.clone()))?;
            catalog
                .node_position(node)
                .ok_or_else(|| PlanError::UnknownNode(node.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    assemble_positions(problem, &positions)
}

/// Same as [`assemble_plan`] with node positions indexed like
/// `problem.host_groups()`.
pub(crate) fn assemble_positions(problem: &PlanningProblem, positions: &[usize]) -> Result<DeploymentPlan, PlanError> {
    let catalog = problem.catalog();
    let assembly = problem.assembly();
    let partition = problem.partition();

    let mut node_of_component = vec![0usize; assembly.components.len()];
    for (gi, group) in problem.host_groups().iter().enumerate() {
        for &member in &group.members {
            node_of_component[member] = positions[gi];
        }
    }

    let mut servers: BTreeMap<&str, ServerPlacement> = BTreeMap::new();
    for (ci, component) in assembly.components.iter().enumerate() {
        let node = &catalog.nodes()[node_of_component[ci]];
        let implementation_index = component
            .select_implementation(&node.arch, &node.os)
            .ok_or_else(|| PlanError::NoImplementation {
                component: component.id.clone(),
                node: node.id.clone(),
            })?;
        let server_id = partition
            .process_group(&component.id)
            .expect("partition covers every component");
        let server = servers.entry(server_id).or_insert_with(|| ServerPlacement {
            server_id: server_id.to_string(),
            node_id: node.id.clone(),
            is_infrastructure: false,
            components: Vec::new(),
        });
        server.is_infrastructure |= component.is_infrastructure;
        server.components.push(PlacedComponent {
            id: component.id.clone(),
            implementation_index,
        });
    }

    let component_position: BTreeMap<&str, usize> = assembly
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str(), i))
        .collect();

    let mut connections = Vec::with_capacity(assembly.connections.len());
    let mut data_flows = Vec::new();
    for connection in &assembly.connections {
        let source = component_position[connection.source.component.as_str()];
        let target = component_position[connection.target.component.as_str()];
        let measured = path_between(catalog, node_of_component[source], node_of_component[target]);
        let required = Requirement {
            max_latency_ms: connection.max_latency_ms,
            min_bandwidth_mbps: connection.min_bandwidth_mbps,
        };
        if !required.is_met_by(&measured) {
            return Err(PlanError::RequirementViolated {
                connection: connection.id.clone(),
                measured,
            });
        }
        let source_server = partition.process_group(&connection.source.component).expect("partitioned");
        let target_server = partition.process_group(&connection.target.component).expect("partitioned");
        if source_server != target_server {
            data_flows.push(DataFlow::new(source_server, target_server, connection.id.clone()));
        }
        connections.push(ConnectionPlan {
            connection_id: connection.id.clone(),
            source_server: source_server.to_string(),
            target_server: target_server.to_string(),
            measured,
            required,
        });
    }

    let launch = compute_launch_order(
        servers.values().map(|s| (s.server_id.as_str(), s.is_infrastructure)),
        &data_flows,
    );

    let mut plan = DeploymentPlan {
        problem_digest: problem.digest().to_string(),
        servers: servers.into_values().collect(),
        launch_order: launch.order,
        data_flows,
        connections,
        warnings: launch.warnings,
    };
    plan.canonicalize();
    Ok(plan)
}
