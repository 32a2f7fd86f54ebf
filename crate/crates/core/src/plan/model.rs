use serde::{Deserialize, Serialize};

use crate::report::FindingCode;
use crate::resources::LinkMetrics;

/// Planner output: which component server runs where, in what order the
/// servers start, which references flow between them, and which network
/// connections they need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DeploymentPlan {
    pub problem_digest: String,
    pub servers: Vec<ServerPlacement>,
    pub launch_order: Vec<String>,
    pub data_flows: Vec<DataFlow>,
    pub connections: Vec<ConnectionPlan>,
    #[serde(default)]
    pub warnings: Vec<PlanWarning>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ServerPlacement {
    /// Equal to the id of the process group the server hosts.
    pub server_id: String,
    pub node_id: String,
    #[serde(rename = "infrastructure")]
    pub is_infrastructure: bool,
    pub components: Vec<PlacedComponent>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct PlacedComponent {
    pub id: String,
    pub implementation_index: usize,
}

/// The producer's endpoint reference is handed to the consumer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct DataFlow {
    pub producer: String,
    pub consumer: String,
    pub connection_id: String,
}

impl DataFlow {
    pub fn new(producer: impl Into<String>, consumer: impl Into<String>, connection_id: impl Into<String>) -> Self {
        DataFlow {
            producer: producer.into(),
            consumer: consumer.into(),
            connection_id: connection_id.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct Requirement {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_latency_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_bandwidth_mbps: Option<f64>,
}

impl Requirement {
    pub fn is_met_by(&self, measured: &LinkMetrics) -> bool {
        measured.satisfies(self.max_latency_ms, self.min_bandwidth_mbps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ConnectionPlan {
    pub connection_id: String,
    pub source_server: String,
    pub target_server: String,
    pub measured: LinkMetrics,
    pub required: Requirement,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanWarning {
    pub code: FindingCode,
    pub servers: Vec<String>,
    pub message: String,
}

impl DeploymentPlan {
    pub fn server(&self, id: &str) -> Option<&ServerPlacement> {
        self.servers.iter().find(|s| s.server_id == id)
    }

    /// Server hosting a component.
    pub fn server_of(&self, component: &str) -> Option<&ServerPlacement> {
        self.servers
            .iter()
            .find(|s| s.components.iter().any(|c| c.id == component))
    }

    pub fn has_warning(&self, code: FindingCode) -> bool {
        self.warnings.iter().any(|w| w.code == code)
    }

    /// Sorts every list whose order carries no meaning. The launch order is
    /// left untouched.
    pub fn canonicalize(&mut self) {
        self.servers.sort_by(|a, b| a.server_id.cmp(&b.server_id));
        for server in &mut self.servers {
            server.components.sort();
        }
        self.data_flows.sort();
        self.connections.sort_by(|a, b| a.connection_id.cmp(&b.connection_id));
        self.warnings.sort();
    }
}
