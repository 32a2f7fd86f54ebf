use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// The application side of a planning problem: components, the connections
/// between their ports, and collocation constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentAssembly {
    pub name: String,
    pub components: Vec<ComponentDecl>,
    pub connections: Vec<Connection>,
    pub collocations: Vec<CollocationGroup>,
}

impl ComponentAssembly {
    pub fn component(&self, id: &str) -> Option<&ComponentDecl> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn connection(&self, id: &str) -> Option<&Connection> {
        self.connections.iter().find(|c| c.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDecl {
    pub id: String,
    /// Marks registry-like processes that must be launched before anything else.
    #[serde(rename = "infrastructure", default, skip_serializing_if = "is_false")]
    pub is_infrastructure: bool,
    pub implementations: Vec<ImplementationAlternative>,
    #[serde(rename = "provides", default)]
    pub provided_ports: Vec<String>,
    #[serde(rename = "uses", default)]
    pub used_ports: Vec<String>,
}

impl ComponentDecl {
    pub fn has_port(&self, port: &str) -> bool {
        self.provided_ports.iter().chain(&self.used_ports).any(|p| p == port)
    }

    /// Index of the implementation to run on a node with the given platform:
    /// the cheapest matching alternative, earliest declared on ties.
    pub fn select_implementation(&self, arch: &str, os: &str) -> Option<usize> {
        self.implementations
            .iter()
            .enumerate()
            .filter(|(_, alt)| alt.runs_on(arch, os))
            .min_by_key(|(idx, alt)| (alt.memory_mb, *idx))
            .map(|(idx, _)| idx)
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImplementationAlternative {
    pub arch: String,
    pub os: String,
    /// Resident memory in MiB. Signed so that a negative figure in a document
    /// surfaces as a validation finding instead of a syntax error.
    #[serde(rename = "memoryMB")]
    pub memory_mb: i64,
    /// Carried for information only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dependencies: Vec<String>,
}

impl ImplementationAlternative {
    pub fn runs_on(&self, arch: &str, os: &str) -> bool {
        platform_token_eq(&self.arch, arch) && platform_token_eq(&self.os, os)
    }

    /// Lower-cased `(arch, os)` pair.
    pub fn platform(&self) -> (String, String) {
        (self.arch.to_lowercase(), self.os.to_lowercase())
    }
}

/// Exact token equality, ignoring case.
pub fn platform_token_eq(a: &str, b: &str) -> bool {
    a.to_lowercase() == b.to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CollocationKind {
    Process,
    Host,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollocationGroup {
    pub kind: CollocationKind,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Endpoint {
    pub component: String,
    pub port: String,
}

impl Endpoint {
    pub fn new(component: impl Into<String>, port: impl Into<String>) -> Self {
        Endpoint {
            component: component.into(),
            port: port.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Connection {
    pub id: String,
    #[serde(rename = "from")]
    pub source: Endpoint,
    #[serde(rename = "to")]
    pub target: Endpoint,
    #[serde(rename = "maxLatencyMs", default, skip_serializing_if = "Option::is_none")]
    pub max_latency_ms: Option<f64>,
    #[serde(rename = "minBandwidthMbps", default, skip_serializing_if = "Option::is_none")]
    pub min_bandwidth_mbps: Option<f64>,
}

impl Connection {
    pub fn has_requirement(&self) -> bool {
        self.max_latency_ms.is_some() || self.min_bandwidth_mbps.is_some()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    #[default]
    None,
    MinimizeWorstLatency,
    MinimizeTotalLatency,
    MaximizeMinBandwidth,
}

impl Objective {
    pub const ALL: [Objective; 4] = [
        Objective::None,
        Objective::MinimizeWorstLatency,
        Objective::MinimizeTotalLatency,
        Objective::MaximizeMinBandwidth,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Objective::None => "none",
            Objective::MinimizeWorstLatency => "minimize-worst-latency",
            Objective::MinimizeTotalLatency => "minimize-total-latency",
            Objective::MaximizeMinBandwidth => "maximize-min-bandwidth",
        }
    }
}

/// User-level steering: an objective for the planner and site pins
/// (component id to catalog group id).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserGoal {
    #[serde(default)]
    pub objective: Objective,
    #[serde(default)]
    pub pins: BTreeMap<String, String>,
}

impl UserGoal {
    pub fn with_objective(objective: Objective) -> Self {
        UserGoal {
            objective,
            pins: BTreeMap::new(),
        }
    }
}
