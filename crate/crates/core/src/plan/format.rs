use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::model::{ConnectionPlan, DataFlow, DeploymentPlan, PlanWarning, ServerPlacement};
use crate::descriptors::{canonical_assembly, canonical_goal, ComponentAssembly, UserGoal};
use crate::resources::{canonical_catalog, GridCatalog};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum PlanFormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported formatVersion {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("invalid plan: {0}")]
    Invariant(String),
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PlanDocumentRef<'a> {
    format_version: u32,
    problem_digest: &'a str,
    servers: &'a [ServerPlacement],
    launch_order: &'a [String],
    data_flows: &'a [DataFlow],
    connections: &'a [ConnectionPlan],
    warnings: &'a [PlanWarning],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct PlanDocument {
    format_version: u32,
    problem_digest: String,
    servers: Vec<ServerPlacement>,
    launch_order: Vec<String>,
    data_flows: Vec<DataFlow>,
    connections: Vec<ConnectionPlan>,
    #[serde(default)]
    warnings: Vec<PlanWarning>,
}

/// Canonical plan file: pretty JSON with fixed key order, unordered lists
/// sorted, trailing newline. Equal plans serialize to identical bytes.
pub fn serialize_plan(plan: &DeploymentPlan) -> Vec<u8> {
    let mut plan = plan.clone();
    plan.canonicalize();
    let doc = PlanDocumentRef {
        format_version: FORMAT_VERSION,
        problem_digest: &plan.problem_digest,
        servers: &plan.servers,
        launch_order: &plan.launch_order,
        data_flows: &plan.data_flows,
        connections: &plan.connections,
        warnings: &plan.warnings,
    };
    let mut out = serde_json::to_vec_pretty(&doc).expect("plans always serialize");
    out.push(b'\n');
    out
}

pub fn deserialize_plan(bytes: &[u8]) -> Result<DeploymentPlan, PlanFormatError> {
    let doc: PlanDocument = serde_json::from_slice(bytes).map_err(|e| PlanFormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.format_version != FORMAT_VERSION {
        return Err(PlanFormatError::UnsupportedVersion(doc.format_version));
    }
    let mut plan = DeploymentPlan {
        problem_digest: doc.problem_digest,
        servers: doc.servers,
        launch_order: doc.launch_order,
        data_flows: doc.data_flows,
        connections: doc.connections,
        warnings: doc.warnings,
    };
    plan.canonicalize();
    if let Some(problem) = structural_violations(&plan).into_iter().next() {
        return Err(PlanFormatError::Invariant(problem));
    }
    Ok(plan)
}

/// Invariants a plan must satisfy on its own, without the inputs it was
/// derived from.
pub fn structural_violations(plan: &DeploymentPlan) -> Vec<String> {
    let mut problems = Vec::new();

    let mut servers = BTreeSet::new();
    let mut components = BTreeSet::new();
    for server in &plan.servers {
        if !servers.insert(server.server_id.as_str()) {
            problems.push(format!("server `{}` declared twice", server.server_id));
        }
        if server.components.is_empty() {
            problems.push(format!("server `{}` hosts no component", server.server_id));
        }
        for component in &server.components {
            if !components.insert(component.id.as_str()) {
                problems.push(format!("component `{}` placed twice", component.id));
            }
        }
    }

    let mut launched = BTreeSet::new();
    for id in &plan.launch_order {
        if !servers.contains(id.as_str()) {
            problems.push(format!("launchOrder names unknown server `{id}`"));
        } else if !launched.insert(id.as_str()) {
            problems.push(format!("launchOrder lists server `{id}` twice"));
        }
    }
    if launched.len() != servers.len() {
        problems.push("launchOrder is not a permutation of the servers".to_string());
    }

    for flow in &plan.data_flows {
        for end in [&flow.producer, &flow.consumer] {
            if !servers.contains(end.as_str()) {
                problems.push(format!(
                    "data flow for connection `{}` names unknown server `{end}`",
                    flow.connection_id
                ));
            }
        }
        if !plan.connections.iter().any(|c| c.connection_id == flow.connection_id) {
            problems.push(format!(
                "data flow names undeclared connection `{}`",
                flow.connection_id
            ));
        }
    }

    let mut connection_ids = BTreeSet::new();
    for connection in &plan.connections {
        if !connection_ids.insert(connection.connection_id.as_str()) {
            problems.push(format!("connection `{}` listed twice", connection.connection_id));
        }
        for end in [&connection.source_server, &connection.target_server] {
            if !servers.contains(end.as_str()) {
                problems.push(format!(
                    "connection `{}` names unknown server `{end}`",
                    connection.connection_id
                ));
            }
        }
        if !connection.measured.is_valid() {
            problems.push(format!(
                "connection `{}` carries invalid measured metrics",
                connection.connection_id
            ));
        } else if !connection.required.is_met_by(&connection.measured) {
            problems.push(format!(
                "connection `{}` measured {} does not meet its requirement",
                connection.connection_id, connection.measured
            ));
        }
    }

    problems
}

/// Lowercase hex SHA-256 over the canonical assembly, catalog, and goal
/// serializations joined by newlines.
pub fn problem_digest(assembly: &ComponentAssembly, catalog: &GridCatalog, goal: &UserGoal) -> String {
    let mut hasher = Sha256::new();
    hasher.update(canonical_assembly(assembly));
    hasher.update(b"\n");
    hasher.update(canonical_catalog(catalog));
    hasher.update(b"\n");
    hasher.update(canonical_goal(goal));
    hex::encode(hasher.finalize())
}
