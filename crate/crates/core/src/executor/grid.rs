use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::resources::GridCatalog;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MiddlewareError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{node}` has {free} MB free, server needs {requested} MB")]
    InsufficientMemory { node: String, requested: u64, free: u64 },
    #[error("middleware rejected the submission to node `{0}` (injected failure)")]
    Injected(String),
    #[error("node `{node}` already runs server `{server}`")]
    DuplicateServer { node: String, server: String },
    #[error("unknown job `{0}`")]
    UnknownJob(String),
}

/// What a bootstrap job needs: the server to start and its memory footprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServerSpec {
    pub server_id: String,
    pub memory_mb: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SimProcess {
    pub job: String,
    pub server_id: String,
    #[serde(rename = "memoryMB")]
    pub memory_mb: u64,
    pub suspended: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeLedger {
    #[serde(rename = "capacityMB")]
    pub capacity_mb: u64,
    #[serde(rename = "freeMB")]
    pub free_mb: u64,
}

/// In-process stand-in for a grid access middleware: accepts job
/// submissions on bare nodes, tracks the processes they start, and keeps a
/// per-node memory ledger. Job handles come from a counter, so a replay of
/// the same calls yields the same handles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct SimulatedGrid {
    nodes: BTreeMap<String, NodeLedger>,
    processes: BTreeMap<String, Vec<SimProcess>>,
    #[serde(default)]
    failure_injections: BTreeSet<String>,
    next_job: u64,
}

impl SimulatedGrid {
    pub fn new(catalog: &GridCatalog) -> Self {
        let nodes = catalog
            .nodes()
            .iter()
            .map(|n| {
                (
                    n.id.clone(),
                    NodeLedger {
                        capacity_mb: n.memory_mb,
                        free_mb: n.memory_mb,
                    },
                )
            })
            .collect();
        SimulatedGrid {
            nodes,
            processes: BTreeMap::new(),
            failure_injections: BTreeSet::new(),
            next_job: 1,
        }
    }

    /// Every later submission to `node` fails.
    pub fn inject_failure(&mut self, node: impl Into<String>) -> &mut Self {
        self.failure_injections.insert(node.into());
        self
    }

    pub fn clear_failure(&mut self, node: &str) {
        self.failure_injections.remove(node);
    }

    pub fn submit_job(&mut self, node: &str, spec: &ServerSpec) -> Result<String, MiddlewareError> {
        let ledger = self
            .nodes
            .get(node)
            .ok_or_else(|| MiddlewareError::UnknownNode(node.to_string()))?;
        if self.failure_injections.contains(node) {
            return Err(MiddlewareError::Injected(node.to_string()));
        }
        if self
            .processes
            .get(node)
            .is_some_and(|ps| ps.iter().any(|p| p.server_id == spec.server_id))
        {
            return Err(MiddlewareError::DuplicateServer {
                node: node.to_string(),
                server: spec.server_id.clone(),
            });
        }
        if ledger.free_mb < spec.memory_mb {
            return Err(MiddlewareError::InsufficientMemory {
                node: node.to_string(),
                requested: spec.memory_mb,
                free: ledger.free_mb,
            });
        }
        let job = format!("job-{:06}", self.next_job);
        self.next_job += 1;
        self.nodes.get_mut(node).expect("checked above").free_mb -= spec.memory_mb;
        self.processes.entry(node.to_string()).or_default().push(SimProcess {
            job: job.clone(),
            server_id: spec.server_id.clone(),
            memory_mb: spec.memory_mb,
            suspended: false,
        });
        Ok(job)
    }

    fn find_job(&mut self, job: &str) -> Result<(String, usize), MiddlewareError> {
        self.processes
            .iter()
            .find_map(|(node, ps)| ps.iter().position(|p| p.job == job).map(|i| (node.clone(), i)))
            .ok_or_else(|| MiddlewareError::UnknownJob(job.to_string()))
    }

    /// Terminates a job and returns its memory to the node.
    pub fn cancel_job(&mut self, job: &str) -> Result<(), MiddlewareError> {
        let (node, idx) = self.find_job(job)?;
        let processes = self.processes.get_mut(&node).expect("found above");
        let process = processes.remove(idx);
        if processes.is_empty() {
            self.processes.remove(&node);
        }
        self.nodes.get_mut(&node).expect("processes only run on known nodes").free_mb += process.memory_mb;
        Ok(())
    }

    pub fn set_suspended(&mut self, job: &str, suspended: bool) -> Result<(), MiddlewareError> {
        let (node, idx) = self.find_job(job)?;
        self.processes.get_mut(&node).expect("found above")[idx].suspended = suspended;
        Ok(())
    }

    pub fn free_memory(&self, node: &str) -> Option<u64> {
        self.nodes.get(node).map(|l| l.free_mb)
    }

    pub fn capacity(&self, node: &str) -> Option<u64> {
        self.nodes.get(node).map(|l| l.capacity_mb)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(String::as_str)
    }

    pub fn processes(&self, node: &str) -> &[SimProcess] {
        self.processes.get(node).map_or(&[], Vec::as_slice)
    }

    /// Whether the grid models exactly the catalog's nodes and capacities.
    pub fn matches_catalog(&self, catalog: &GridCatalog) -> bool {
        self.nodes.len() == catalog.nodes().len()
            && catalog
                .nodes()
                .iter()
                .all(|n| self.capacity(&n.id) == Some(n.memory_mb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::{LinkMetrics, NetworkGroup, RawNode};

    fn grid() -> SimulatedGrid {
        let root = NetworkGroup {
            id: "root".into(),
            internal: LinkMetrics::new(0.1, 1000.0),
            uplink: None,
            groups: vec![],
            nodes: vec![RawNode {
                id: "n1".into(),
                arch: "x86_64".into(),
                os: "linux".into(),
                cpu_count: 4,
                cpu_speed_mhz: 2000,
                memory_mb: 1024,
                storage_gb: 10,
            }],
        };
        SimulatedGrid::new(&GridCatalog::from_root(root).unwrap())
    }

    fn spec(id: &str, mb: u64) -> ServerSpec {
        ServerSpec {
            server_id: id.into(),
            memory_mb: mb,
        }
    }

    #[test]
    fn submission_charges_the_ledger() {
        let mut g = grid();
        let job = g.submit_job("n1", &spec("s1", 600)).unwrap();
        assert_eq!(job, "job-000001");
        assert_eq!(g.free_memory("n1"), Some(424));
        assert_eq!(
            g.submit_job("n1", &spec("s2", 600)),
            Err(MiddlewareError::InsufficientMemory {
                node: "n1".into(),
                requested: 600,
                free: 424
            })
        );
        assert_eq!(g.free_memory("n1"), Some(424));
    }

    #[test]
    fn injected_failure_leaves_ledger_alone() {
        let mut g = grid();
        g.inject_failure("n1");
        assert_eq!(g.submit_job("n1", &spec("s1", 600)), Err(MiddlewareError::Injected("n1".into())));
        assert_eq!(g.free_memory("n1"), Some(1024));
        assert!(g.processes("n1").is_empty());
    }

    #[test]
    fn unknown_node_and_duplicate_server() {
        let mut g = grid();
        assert_eq!(g.submit_job("zz", &spec("s1", 1)), Err(MiddlewareError::UnknownNode("zz".into())));
        g.submit_job("n1", &spec("s1", 1)).unwrap();
        assert!(matches!(
            g.submit_job("n1", &spec("s1", 1)),
            Err(MiddlewareError::DuplicateServer { .. })
        ));
    }

    #[test]
    fn cancel_releases_memory_and_handles_are_fresh() {
        let mut g = grid();
        let first = g.submit_job("n1", &spec("s1", 1024)).unwrap();
        g.cancel_job(&first).unwrap();
        assert_eq!(g.free_memory("n1"), Some(1024));
        let second = g.submit_job("n1", &spec("s1", 1024)).unwrap();
        assert_ne!(first, second);
        assert_eq!(g.cancel_job(&first), Err(MiddlewareError::UnknownJob(first)));
    }
}
