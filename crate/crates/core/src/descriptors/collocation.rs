use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::model::{CollocationKind, ComponentAssembly};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupIds {
    pub process: String,
    pub host: String,
}

/// Every component's derived process group and host group.
///
/// Group ids are the lexicographically smallest member id, so the partition
/// does not depend on the order in which collocation entries were written.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CollocationPartition {
    entries: BTreeMap<String, GroupIds>,
}

impl CollocationPartition {
    pub fn get(&self, component: &str) -> Option<&GroupIds> {
        self.entries.get(component)
    }

    pub fn process_group(&self, component: &str) -> Option<&str> {
        self.entries.get(component).map(|g| g.process.as_str())
    }

    pub fn host_group(&self, component: &str) -> Option<&str> {
        self.entries.get(component).map(|g| g.host.as_str())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GroupIds)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Host group id → members, both sorted.
    pub fn host_groups(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (component, ids) in &self.entries {
            out.entry(ids.host.clone()).or_default().push(component.clone());
        }
        out
    }

    /// Process group id → members, both sorted.
    pub fn process_groups(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (component, ids) in &self.entries {
            out.entry(ids.process.clone()).or_default().push(component.clone());
        }
        out
    }

    /// Process group ids contained in a host group, sorted.
    pub fn process_groups_in(&self, host: &str) -> Vec<String> {
        self.entries
            .values()
            .filter(|ids| ids.host == host)
            .map(|ids| ids.process.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CollocationError {
    #[error("collocation group references unknown component `{0}`")]
    UnknownMember(String),
    #[error(
        "process group `{group}` can never share a process: members {members:?} have no common (arch, os) implementation"
    )]
    Contradiction { group: String, members: Vec<String> },
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Derives process and host groups from the assembly's collocation entries.
///
/// Process groups are the connected components of the process-kind entries.
/// Host groups are the connected components of host-kind entries together
/// with the derived process groups, so process collocation implies host
/// collocation.
pub fn normalize_collocation(
    assembly: &ComponentAssembly,
) -> Result<CollocationPartition, CollocationError> {
    let ids: Vec<&str> = assembly.components.iter().map(|c| c.id.as_str()).collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();

    let mut process = DisjointSets::new(ids.len());
    let mut host = DisjointSets::new(ids.len());
    for group in &assembly.collocations {
        let members = group
            .members
            .iter()
            .map(|m| {
                index
                    .get(m.as_str())
                    .copied()
                    .ok_or_else(|| CollocationError::UnknownMember(m.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        for pair in members.windows(2) {
            host.union(pair[0], pair[1]);
            if group.kind == CollocationKind::Process {
                process.union(pair[0], pair[1]);
            }
        }
    }

    let process_ids = group_names(&mut process, &ids);
    let host_ids = group_names(&mut host, &ids);

    // Members of one process group must agree on at least one platform.
    let mut by_process: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, pid) in process_ids.iter().enumerate() {
        by_process.entry(pid.as_str()).or_default().push(i);
    }
    for (pid, members) in &by_process {
        if members.len() < 2 {
            continue;
        }
        let mut common: Option<BTreeSet<(String, String)>> = None;
        for &m in members {
            let platforms: BTreeSet<_> = assembly.components[m]
                .implementations
                .iter()
                .map(|alt| alt.platform())
                .collect();
            common = Some(match common {
                None => platforms,
                Some(acc) => acc.intersection(&platforms).cloned().collect(),
            });
        }
        if common.is_some_and(|c| c.is_empty()) {
            let mut names: Vec<String> = members.iter().map(|&m| ids[m].to_string()).collect();
            names.sort();
            return Err(CollocationError::Contradiction {
                group: pid.to_string(),
                members: names,
            });
        }
    }

    let entries = ids
        .iter()
        .enumerate()
        .map(|(i, id)| {
            (
                id.to_string(),
                GroupIds {
                    process: process_ids[i].clone(),
                    host: host_ids[i].clone(),
                },
            )
        })
        .collect();
    Ok(CollocationPartition { entries })
}

fn group_names(sets: &mut DisjointSets, ids: &[&str]) -> Vec<String> {
    let mut smallest: BTreeMap<usize, &str> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let root = sets.find(i);
        let entry = smallest.entry(root).or_insert(id);
        if *id < *entry {
            *entry = id;
        }
    }
    (0..ids.len())
        .map(|i| smallest[&sets.find(i)].to_string())
        .collect()
}
