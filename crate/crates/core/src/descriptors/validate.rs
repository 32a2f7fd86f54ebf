use std::collections::{BTreeMap, BTreeSet};

use super::collocation::{normalize_collocation, CollocationError};
use super::model::{CollocationKind, ComponentAssembly};
use crate::report::{Finding, FindingCode, ValidationReport};

/// Checks every assembly invariant, including collocation consistency.
///
/// The collocation pass only runs when the structural checks are clean, so a
/// document broken in one place reports one finding.
pub fn validate_assembly(assembly: &ComponentAssembly) -> ValidationReport {
    let structural = validate_structure(assembly);
    if !structural.is_empty() {
        return structural;
    }
    match normalize_collocation(assembly) {
        Ok(_) => ValidationReport::default(),
        Err(CollocationError::Contradiction { group, members }) => {
            ValidationReport::new(vec![Finding::error(
                FindingCode::CollocationContradiction,
                group,
                format!(
                    "members {} have no common (arch, os) implementation and can never share a process",
                    members.join(", ")
                ),
            )])
        }
        Err(CollocationError::UnknownMember(m)) => ValidationReport::new(vec![Finding::error(
            FindingCode::DanglingReference,
            m.clone(),
            format!("collocation names unknown component `{m}`"),
        )]),
    }
}

pub(crate) fn validate_structure(assembly: &ComponentAssembly) -> ValidationReport {
    let mut findings = Vec::new();

    let mut seen = BTreeMap::<&str, usize>::new();
    for component in &assembly.components {
        *seen.entry(component.id.as_str()).or_default() += 1;
    }
    for (id, count) in &seen {
        if id.is_empty() {
            findings.push(Finding::error(FindingCode::EmptyId, "", "component id is empty"));
        } else if *count > 1 {
            findings.push(Finding::error(
                FindingCode::DuplicateId,
                *id,
                format!("component id declared {count} times"),
            ));
        }
    }

    for component in &assembly.components {
        let id = component.id.as_str();
        let mut ports = BTreeSet::new();
        for port in component.provided_ports.iter().chain(&component.used_ports) {
            if !ports.insert(port.as_str()) {
                findings.push(Finding::error(
                    FindingCode::DuplicatePort,
                    id,
                    format!("port `{port}` declared more than once"),
                ));
            }
        }
        if component.implementations.is_empty() {
            findings.push(Finding::error(
                FindingCode::NoImplementation,
                id,
                "component declares no implementation alternative",
            ));
        }
        for (idx, alt) in component.implementations.iter().enumerate() {
            if alt.memory_mb < 0 {
                findings.push(Finding::error(
                    FindingCode::NegativeMemory,
                    id,
                    format!("implementation {idx} requires {} MB", alt.memory_mb),
                ));
            }
        }
    }

    let mut connection_ids = BTreeMap::<&str, usize>::new();
    for connection in &assembly.connections {
        *connection_ids.entry(connection.id.as_str()).or_default() += 1;
    }
    for (id, count) in &connection_ids {
        if id.is_empty() {
            findings.push(Finding::error(FindingCode::EmptyId, "", "connection id is empty"));
        } else if *count > 1 {
            findings.push(Finding::error(
                FindingCode::DuplicateId,
                *id,
                format!("connection id declared {count} times"),
            ));
        }
    }

    for connection in &assembly.connections {
        let id = connection.id.as_str();
        for endpoint in [&connection.source, &connection.target] {
            match assembly.component(&endpoint.component) {
                None => findings.push(Finding::error(
                    FindingCode::DanglingReference,
                    id,
                    format!("unknown component `{}`", endpoint.component),
                )),
                Some(component) if !component.has_port(&endpoint.port) => {
                    findings.push(Finding::error(
                        FindingCode::DanglingReference,
                        id,
                        format!(
                            "component `{}` has no port `{}`",
                            endpoint.component, endpoint.port
                        ),
                    ))
                }
                Some(_) => {}
            }
        }
        if let Some(bound) = connection.max_latency_ms {
            if !(bound >= 0.0 && bound.is_finite()) {
                findings.push(Finding::error(
                    FindingCode::InvalidBound,
                    id,
                    format!("maxLatencyMs must be a non-negative number, got {bound}"),
                ));
            }
        }
        if let Some(bound) = connection.min_bandwidth_mbps {
            if !(bound > 0.0 && bound.is_finite()) {
                findings.push(Finding::error(
                    FindingCode::InvalidBound,
                    id,
                    format!("minBandwidthMbps must be a positive number, got {bound}"),
                ));
            }
        }
        if connection.source.component == connection.target.component && connection.has_requirement() {
            findings.push(Finding::error(
                FindingCode::IntraComponentRequirement,
                id,
                "a connection within one component cannot carry network requirements",
            ));
        }
    }

    let mut process_membership = BTreeMap::<&str, usize>::new();
    for (idx, group) in assembly.collocations.iter().enumerate() {
        let subject = format!("collocation#{idx}");
        let distinct: BTreeSet<&str> = group.members.iter().map(String::as_str).collect();
        for member in &distinct {
            if assembly.component(member).is_none() {
                findings.push(Finding::error(
                    FindingCode::DanglingReference,
                    subject.clone(),
                    format!("unknown component `{member}`"),
                ));
            }
        }
        if distinct.len() < 2 {
            findings.push(Finding::error(
                FindingCode::CollocationTooSmall,
                subject.clone(),
                "a collocation group needs at least two distinct members",
            ));
        }
        if group.kind == CollocationKind::Process {
            for member in distinct {
                *process_membership.entry(member).or_default() += 1;
            }
        }
    }
    for (member, count) in process_membership {
        if count > 1 {
            findings.push(Finding::error(
                FindingCode::ProcessGroupOverlap,
                member,
                format!("component appears in {count} process groups"),
            ));
        }
    }

    ValidationReport::new(findings)
}
