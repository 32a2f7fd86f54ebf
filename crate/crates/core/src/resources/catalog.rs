use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metrics::LinkMetrics;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComputeNode {
    pub id: String,
    pub arch: String,
    pub os: String,
    #[serde(rename = "cpuCount")]
    pub cpu_count: u32,
    #[serde(rename = "cpuSpeedMHz")]
    pub cpu_speed_mhz: u32,
    #[serde(rename = "memoryMB")]
    pub memory_mb: u64,
    #[serde(rename = "storageGB")]
    pub storage_gb: u64,
}

/// A site or sub-site. Direct members (child groups and nodes) talk to each
/// other over `internal`; the group reaches its parent over `uplink`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkGroup {
    pub id: String,
    pub internal: LinkMetrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uplink: Option<LinkMetrics>,
    #[serde(default)]
    pub groups: Vec<NetworkGroup>,
    #[serde(default)]
    pub nodes: Vec<RawNode>,
}

// Capacities are read signed so that a negative figure is reported as a
// capacity error rather than a syntax error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNode {
    pub id: String,
    pub arch: String,
    pub os: String,
    #[serde(rename = "cpuCount")]
    pub cpu_count: i64,
    #[serde(rename = "cpuSpeedMHz")]
    pub cpu_speed_mhz: i64,
    #[serde(rename = "memoryMB")]
    pub memory_mb: i64,
    #[serde(rename = "storageGB")]
    pub storage_gb: i64,
}

impl From<&ComputeNode> for RawNode {
    fn from(n: &ComputeNode) -> Self {
        RawNode {
            id: n.id.clone(),
            arch: n.arch.clone(),
            os: n.os.clone(),
            cpu_count: n.cpu_count as i64,
            cpu_speed_mhz: n.cpu_speed_mhz as i64,
            memory_mb: n.memory_mb as i64,
            storage_gb: n.storage_gb as i64,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct CatalogDocument {
    format_version: u32,
    group: NetworkGroup,
}

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported formatVersion {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("group `{0}` is not the root and has no uplink")]
    MissingUplink(String),
    #[error("root group `{0}` must not declare an uplink")]
    RootUplink(String),
    #[error("invalid link metrics on group `{0}`: latency must be >= 0 and bandwidth > 0")]
    InvalidLink(String),
    #[error("node `{node}`: {field} must be {expected}, got {value}")]
    Capacity {
        node: String,
        field: &'static str,
        expected: &'static str,
        value: i64,
    },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GroupEntry {
    pub id: String,
    pub parent: Option<usize>,
    pub depth: usize,
    pub internal: LinkMetrics,
    pub uplink: Option<LinkMetrics>,
    /// Half-open range into `GridCatalog::nodes` covering the whole subtree.
    pub nodes: (usize, usize),
}

/// A parsed, validated resource catalog.
///
/// Node document order is a pre-order walk: a group's own nodes first, then
/// each child group's subtree in turn. Every subtree is therefore a
/// contiguous run of `nodes()`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCatalog {
    root: NetworkGroup,
    pub(crate) groups: Vec<GroupEntry>,
    nodes: Vec<ComputeNode>,
    pub(crate) node_group: Vec<usize>,
    node_index: HashMap<String, usize>,
    group_index: HashMap<String, usize>,
}

impl GridCatalog {
    pub fn from_root(root: NetworkGroup) -> Result<Self, CatalogError> {
        if root.uplink.is_some() {
            return Err(CatalogError::RootUplink(root.id.clone()));
        }
        let mut catalog = GridCatalog {
            root: root.clone(),
            groups: Vec::new(),
            nodes: Vec::new(),
            node_group: Vec::new(),
            node_index: HashMap::new(),
            group_index: HashMap::new(),
        };
        catalog.index_group(&root, None, 0)?;
        Ok(catalog)
    }

    fn index_group(
        &mut self,
        group: &NetworkGroup,
        parent: Option<usize>,
        depth: usize,
    ) -> Result<(), CatalogError> {
        if parent.is_some() && group.uplink.is_none() {
            return Err(CatalogError::MissingUplink(group.id.clone()));
        }
        if !group.internal.is_valid() || group.uplink.is_some_and(|u| !u.is_valid()) {
            return Err(CatalogError::InvalidLink(group.id.clone()));
        }
        let gidx = self.groups.len();
        if self.group_index.insert(group.id.clone(), gidx).is_some() {
            return Err(CatalogError::DuplicateId(group.id.clone()));
        }
        let start = self.nodes.len();
        self.groups.push(GroupEntry {
            id: group.id.clone(),
            parent,
            depth,
            internal: group.internal,
            uplink: group.uplink,
            nodes: (start, start),
        });
        for raw in &group.nodes {
            let node = validate_node(raw)?;
            if self.node_index.insert(node.id.clone(), self.nodes.len()).is_some() {
                return Err(CatalogError::DuplicateId(node.id));
            }
            self.nodes.push(node);
            self.node_group.push(gidx);
        }
        for child in &group.groups {
            self.index_group(child, Some(gidx), depth + 1)?;
        }
        self.groups[gidx].nodes.1 = self.nodes.len();
        Ok(())
    }

    pub fn root(&self) -> &NetworkGroup {
        &self.root
    }

    /// All nodes in document order.
    pub fn nodes(&self) -> &[ComputeNode] {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<&ComputeNode> {
        self.node_index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn node_position(&self, id: &str) -> Option<usize> {
        self.node_index.get(id).copied()
    }

    pub fn has_group(&self, id: &str) -> bool {
        self.group_index.contains_key(id)
    }

    pub fn group_ids(&self) -> impl Iterator<Item = &str> {
        self.groups.iter().map(|g| g.id.as_str())
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Id of the group a node is a direct member of.
    pub fn group_of(&self, node: &str) -> Option<&str> {
        self.node_index
            .get(node)
            .map(|&i| self.groups[self.node_group[i]].id.as_str())
    }

    /// Positions (into `nodes()`) of every node under a group.
    pub fn subtree_positions(&self, group: &str) -> Result<std::ops::Range<usize>, CatalogError> {
        let gidx = self
            .group_index
            .get(group)
            .ok_or_else(|| CatalogError::UnknownGroup(group.to_string()))?;
        let (start, end) = self.groups[*gidx].nodes;
        Ok(start..end)
    }

    /// Whether a node lies anywhere under a group.
    pub fn group_contains(&self, group: &str, node: &str) -> bool {
        match (self.subtree_positions(group), self.node_index.get(node)) {
            (Ok(range), Some(pos)) => range.contains(pos),
            _ => false,
        }
    }
}

fn validate_node(raw: &RawNode) -> Result<ComputeNode, CatalogError> {
    let positive = |field: &'static str, value: i64| {
        if value >= 1 {
            Ok(value)
        } else {
            Err(CatalogError::Capacity {
                node: raw.id.clone(),
                field,
                expected: "positive",
                value,
            })
        }
    };
    let cpu_count = positive("cpuCount", raw.cpu_count)?;
    let cpu_speed = positive("cpuSpeedMHz", raw.cpu_speed_mhz)?;
    let memory = positive("memoryMB", raw.memory_mb)?;
    if raw.storage_gb < 0 {
        return Err(CatalogError::Capacity {
            node: raw.id.clone(),
            field: "storageGB",
            expected: "non-negative",
            value: raw.storage_gb,
        });
    }
    let too_large = |field: &'static str, value: i64| CatalogError::Capacity {
        node: raw.id.clone(),
        field,
        expected: "at most 4294967295",
        value,
    };
    Ok(ComputeNode {
        id: raw.id.clone(),
        arch: raw.arch.clone(),
        os: raw.os.clone(),
        cpu_count: u32::try_from(cpu_count).map_err(|_| too_large("cpuCount", cpu_count))?,
        cpu_speed_mhz: u32::try_from(cpu_speed).map_err(|_| too_large("cpuSpeedMHz", cpu_speed))?,
        memory_mb: memory as u64,
        storage_gb: raw.storage_gb as u64,
    })
}

pub fn parse_catalog(bytes: &[u8]) -> Result<GridCatalog, CatalogError> {
    let doc: CatalogDocument = serde_json::from_slice(bytes).map_err(|e| CatalogError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if doc.format_version != FORMAT_VERSION {
        return Err(CatalogError::UnsupportedVersion(doc.format_version));
    }
    GridCatalog::from_root(doc.group)
}

fn document(catalog: &GridCatalog) -> CatalogDocument {
    CatalogDocument {
        format_version: FORMAT_VERSION,
        group: catalog.root.clone(),
    }
}

pub fn serialize_catalog(catalog: &GridCatalog) -> Vec<u8> {
    let mut out =
        serde_json::to_vec_pretty(&document(catalog)).expect("catalog documents always serialize");
    out.push(b'\n');
    out
}

/// Compact form used for content digests.
pub fn canonical_catalog(catalog: &GridCatalog) -> Vec<u8> {
    serde_json::to_vec(&document(catalog)).expect("catalog documents always serialize")
}

/// Node ids under a group, in document order.
pub fn nodes_in_group(catalog: &GridCatalog, group: &str) -> Result<Vec<String>, CatalogError> {
    let range = catalog.subtree_positions(group)?;
    Ok(catalog.nodes()[range].iter().map(|n| n.id.clone()).collect())
}
