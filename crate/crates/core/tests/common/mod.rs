//! Random problem generation and a brute-force reference planner.
//!
//! The oracle works from the raw documents only: it walks the network tree
//! itself, picks implementations itself and enumerates every
//! component-to-node mapping. Nothing here calls into the planners.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use gridplan::descriptors::{
    CollocationGroup, CollocationKind, ComponentAssembly, ComponentDecl, Connection, Endpoint,
    ImplementationAlternative, Objective, UserGoal,
};
use gridplan::plan::DataFlow;
use gridplan::planner::PlanningProblem;
use gridplan::resources::{Bandwidth, GridCatalog, LinkMetrics, NetworkGroup, RawNode};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap()
}

const PLATFORMS: [(&str, &str); 2] = [("x86_64", "linux"), ("ppc64", "aix")];
const BANDWIDTHS: [f64; 5] = [10.0, 50.0, 100.0, 1000.0, 10000.0];

/// Multiples of 1/8 add up exactly in binary floating point, so sums taken
/// in different orders still compare equal.
fn eighths(rng: &mut impl Rng, lo: u32, hi: u32) -> f64 {
    f64::from(rng.random_range(lo..=hi)) / 8.0
}

fn bandwidth_at_least(rng: &mut impl Rng, floor: f64) -> Bandwidth {
    if rng.random_bool(0.15) {
        return Bandwidth::Unbounded;
    }
    let options: Vec<f64> = BANDWIDTHS.iter().copied().filter(|b| *b >= floor).collect();
    Bandwidth::Mbps(*options.choose(rng).unwrap())
}

/// Random tree with `nodes` nodes spread over up to `max_groups` groups.
///
/// When `hierarchical` is set every non-root group keeps its internal
/// latency within twice its uplink latency and its internal bandwidth at
/// least its uplink bandwidth.
pub fn random_tree(rng: &mut impl Rng, nodes: usize, max_groups: usize, hierarchical: bool) -> NetworkGroup {
    let groups = rng.random_range(1..=max_groups.max(1));
    let mut parent = vec![None];
    for g in 1..groups {
        parent.push(Some(rng.random_range(0..g)));
    }
    let mut shells: Vec<NetworkGroup> = (0..groups)
        .map(|g| {
            let (internal, uplink) = if g == 0 {
                (LinkMetrics::new(eighths(rng, 0, 8), 1.0), None)
            } else {
                let up_latency = eighths(rng, 1, 64);
                let up_bandwidth = *BANDWIDTHS[..4].choose(rng).unwrap();
                let uplink = LinkMetrics::new(up_latency, up_bandwidth);
                let internal = if hierarchical {
                    LinkMetrics {
                        latency_ms: eighths(rng, 0, (up_latency * 16.0) as u32),
                        bandwidth: bandwidth_at_least(rng, up_bandwidth),
                    }
                } else {
                    LinkMetrics {
                        latency_ms: eighths(rng, 0, 160),
                        bandwidth: bandwidth_at_least(rng, 0.0),
                    }
                };
                (internal, Some(uplink))
            };
            NetworkGroup {
                id: format!("g{g}"),
                internal,
                uplink,
                groups: Vec::new(),
                nodes: Vec::new(),
            }
        })
        .collect();
    shells[0].id = "root".into();
    shells[0].internal.bandwidth = bandwidth_at_least(rng, 0.0);

    // Ids are drawn from a shuffled pool so that id order and document order
    // disagree.
    let mut ids: Vec<usize> = (0..nodes).collect();
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    for id in ids {
        let g = rng.random_range(0..groups);
        let (arch, os) = if rng.random_bool(0.8) { PLATFORMS[0] } else { PLATFORMS[1] };
        shells[g].nodes.push(RawNode {
            id: format!("n{id}"),
            arch: arch.into(),
            os: os.into(),
            cpu_count: rng.random_range(1..=16),
            cpu_speed_mhz: 2000,
            memory_mb: *[512, 1024, 1536, 2048].choose(rng).unwrap(),
            storage_gb: 100,
        });
    }
    for g in (1..groups).rev() {
        let child = shells.pop().unwrap();
        debug_assert_eq!(shells.len(), g);
        let p = parent[g].unwrap();
        shells[p].groups.insert(0, child);
    }
    shells.pop().unwrap()
}

/// Flat view of a network tree used by the oracle.
#[derive(Debug, Clone)]
pub struct OracleTree {
    pub group_ids: Vec<String>,
    parent: Vec<Option<usize>>,
    internal: Vec<(f64, Option<f64>)>,
    uplink: Vec<(f64, Option<f64>)>,
    /// In document order.
    pub nodes: Vec<RawNode>,
    node_group: Vec<usize>,
}

fn raw(m: &LinkMetrics) -> (f64, Option<f64>) {
    let bw = match m.bandwidth {
        Bandwidth::Mbps(b) => Some(b),
        Bandwidth::Unbounded => None,
    };
    (m.latency_ms, bw)
}

impl OracleTree {
    pub fn new(root: &NetworkGroup) -> Self {
        let mut t = OracleTree {
            group_ids: Vec::new(),
            parent: Vec::new(),
            internal: Vec::new(),
            uplink: Vec::new(),
            nodes: Vec::new(),
            node_group: Vec::new(),
        };
        t.visit(root, None);
        t
    }

    fn visit(&mut self, g: &NetworkGroup, parent: Option<usize>) {
        let me = self.group_ids.len();
        self.group_ids.push(g.id.clone());
        self.parent.push(parent);
        self.internal.push(raw(&g.internal));
        self.uplink.push(g.uplink.as_ref().map_or((0.0, None), raw));
        for n in &g.nodes {
            self.nodes.push(n.clone());
            self.node_group.push(me);
        }
        for child in &g.groups {
            self.visit(child, Some(me));
        }
    }

    fn chain(&self, mut g: usize) -> Vec<usize> {
        let mut out = vec![g];
        while let Some(p) = self.parent[g] {
            out.push(p);
            g = p;
        }
        out
    }

    pub fn node_index(&self, id: &str) -> usize {
        self.nodes.iter().position(|n| n.id == id).unwrap()
    }

    /// (latency, bandwidth) between nodes `a` and `b`; `None` bandwidth is
    /// unbounded. Walks both root chains to the lowest common group.
    pub fn path(&self, a: usize, b: usize) -> (f64, Option<f64>) {
        if a == b {
            return (0.0, None);
        }
        let (ca, cb) = (self.chain(self.node_group[a]), self.chain(self.node_group[b]));
        let lca = *ca.iter().find(|g| cb.contains(g)).unwrap();
        let mut links = vec![self.internal[lca]];
        for chain in [&ca, &cb] {
            for &g in chain.iter().take_while(|&&g| g != lca) {
                links.push(self.uplink[g]);
            }
        }
        let latency: f64 = links.iter().map(|l| l.0).sum();
        let bandwidth = links
            .iter()
            .filter_map(|l| l.1)
            .fold(None, |acc: Option<f64>, b| Some(acc.map_or(b, |x| x.min(b))));
        (latency, bandwidth)
    }

    /// Whether node `n` sits in the subtree of group `id`.
    pub fn in_group(&self, n: usize, id: &str) -> bool {
        self.chain(self.node_group[n]).iter().any(|&g| self.group_ids[g] == id)
    }
}

pub struct Case {
    pub seed: u64,
    pub assembly: ComponentAssembly,
    pub root: NetworkGroup,
    pub catalog: GridCatalog,
    pub goal: UserGoal,
    pub problem: PlanningProblem,
    pub tree: OracleTree,
}

fn random_assembly(rng: &mut impl Rng, components: usize) -> ComponentAssembly {
    let names = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot"];
    let mut ids: Vec<&str> = names[..components].to_vec();
    for i in (1..ids.len()).rev() {
        ids.swap(i, rng.random_range(0..=i));
    }
    let decls: Vec<ComponentDecl> = ids
        .iter()
        .map(|id| {
            let alternatives = rng.random_range(1..=2);
            let implementations = (0..alternatives)
                .map(|_| {
                    let (arch, os) = if rng.random_bool(0.75) { PLATFORMS[0] } else { PLATFORMS[1] };
                    ImplementationAlternative {
                        arch: arch.into(),
                        os: os.into(),
                        memory_mb: *[128, 256, 384, 512, 768].choose(rng).unwrap(),
                        dependencies: Vec::new(),
                    }
                })
                .collect();
            ComponentDecl {
                id: id.to_string(),
                is_infrastructure: rng.random_bool(0.15),
                implementations,
                provided_ports: vec!["out".into()],
                used_ports: vec!["in".into()],
            }
        })
        .collect();

    let mut connections = Vec::new();
    if components > 1 {
        for k in 0..rng.random_range(0..=6) {
            let a = rng.random_range(0..components);
            let mut b = rng.random_range(0..components - 1);
            if b >= a {
                b += 1;
            }
            connections.push(Connection {
                id: format!("k{k}"),
                source: Endpoint {
                    component: ids[a].into(),
                    port: "out".into(),
                },
                target: Endpoint {
                    component: ids[b].into(),
                    port: "in".into(),
                },
                max_latency_ms: rng.random_bool(0.5).then(|| *[0.5, 2.0, 8.0, 12.5, 30.0].choose(rng).unwrap()),
                min_bandwidth_mbps: rng.random_bool(0.3).then(|| *[10.0, 50.0, 100.0, 500.0].choose(rng).unwrap()),
            });
        }
    }

    let mut collocations = Vec::new();
    if components > 1 {
        for _ in 0..rng.random_range(0..=2) {
            let size = rng.random_range(2..=components.min(3));
            let mut pool = ids.clone();
            for i in (1..pool.len()).rev() {
                pool.swap(i, rng.random_range(0..=i));
            }
            collocations.push(CollocationGroup {
                kind: if rng.random_bool(0.5) {
                    CollocationKind::Process
                } else {
                    CollocationKind::Host
                },
                members: pool[..size].iter().map(|s| s.to_string()).collect(),
            });
        }
    }
    ComponentAssembly {
        name: "random".into(),
        components: decls,
        connections,
        collocations,
    }
}

/// A valid random problem: at most `max_components` components and
/// `max_nodes` nodes. Invalid draws are retried with the same generator.
pub fn random_case(seed: u64, max_components: usize, max_nodes: usize) -> Case {
    let mut rng = rng(seed);
    loop {
        let nodes = rng.random_range(1..=max_nodes);
        let hierarchical = rng.random_bool(0.7);
        let root = random_tree(&mut rng, nodes, 4, hierarchical);
        let catalog = GridCatalog::from_root(root.clone()).unwrap();
        let tree = OracleTree::new(&root);
        let components = rng.random_range(1..=max_components);
        let assembly = random_assembly(&mut rng, components);
        let objective = *Objective::ALL.choose(&mut rng).unwrap();
        let mut pins = BTreeMap::new();
        if rng.random_bool(0.3) {
            let c = assembly.components.choose(&mut rng).unwrap().id.clone();
            pins.insert(c, tree.group_ids.choose(&mut rng).unwrap().clone());
        }
        let goal = UserGoal { objective, pins };
        if let Ok(problem) = PlanningProblem::new(assembly.clone(), catalog.clone(), goal.clone()) {
            return Case {
                seed,
                assembly,
                root,
                catalog,
                goal,
                problem,
                tree,
            };
        }
    }
}

/// Implementation a component would use on a node: cheapest match,
/// earliest declared on ties.
pub fn oracle_implementation(c: &ComponentDecl, node: &RawNode) -> Option<usize> {
    let mut best: Option<(i64, usize)> = None;
    for (i, alt) in c.implementations.iter().enumerate() {
        let fits = alt.arch.eq_ignore_ascii_case(&node.arch) && alt.os.eq_ignore_ascii_case(&node.os);
        if fits && best.is_none_or(|(m, _)| alt.memory_mb < m) {
            best = Some((alt.memory_mb, i));
        }
    }
    best.map(|(_, i)| i)
}

/// Objective value of a component-to-node mapping (node indices into
/// `tree.nodes`), or `None` if the mapping breaks a constraint.
pub fn oracle_cost(case: &Case, mapping: &[usize]) -> Option<f64> {
    let a = &case.assembly;
    let tree = &case.tree;
    let index: HashMap<&str, usize> = a.components.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();

    let mut used = vec![0i64; tree.nodes.len()];
    for (i, c) in a.components.iter().enumerate() {
        let node = &tree.nodes[mapping[i]];
        let imp = oracle_implementation(c, node)?;
        used[mapping[i]] += c.implementations[imp].memory_mb;
    }
    if used.iter().zip(&tree.nodes).any(|(u, n)| *u > n.memory_mb) {
        return None;
    }
    for group in &a.collocations {
        let first = mapping[index[group.members[0].as_str()]];
        if group.members.iter().any(|m| mapping[index[m.as_str()]] != first) {
            return None;
        }
    }
    for (component, site) in &case.goal.pins {
        if !tree.in_group(mapping[index[component.as_str()]], site) {
            return None;
        }
    }
    let mut samples = Vec::new();
    for conn in &a.connections {
        let (s, t) = (mapping[index[conn.source.component.as_str()]], mapping[index[conn.target.component.as_str()]]);
        let (lat, bw) = tree.path(s, t);
        if conn.max_latency_ms.is_some_and(|max| lat > max) {
            return None;
        }
        if let (Some(min), Some(bw)) = (conn.min_bandwidth_mbps, bw) {
            if bw < min {
                return None;
            }
        }
        if s != t {
            samples.push((lat, bw));
        }
    }
    Some(match case.goal.objective {
        Objective::None => 0.0,
        Objective::MinimizeWorstLatency => samples.iter().map(|s| s.0).fold(0.0, f64::max),
        Objective::MinimizeTotalLatency => samples.iter().map(|s| s.0).sum(),
        Objective::MaximizeMinBandwidth => {
            match samples.iter().filter_map(|s| s.1).reduce(f64::min) {
                Some(b) => -b,
                None => 0.0,
            }
        }
    })
}

/// Minimum objective over every feasible mapping, or `None` if none is.
pub fn brute_force(case: &Case) -> Option<f64> {
    let n = case.tree.nodes.len();
    let k = case.assembly.components.len();
    let mut mapping = vec![0usize; k];
    let mut best: Option<f64> = None;
    loop {
        if let Some(cost) = oracle_cost(case, &mapping) {
            if best.is_none_or(|b| cost < b) {
                best = Some(cost);
            }
        }
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            mapping[i] += 1;
            if mapping[i] < n {
                break;
            }
            mapping[i] = 0;
            i += 1;
        }
    }
}

/// Seeds shared by the property tests and the acceptance run.
pub fn seeds(count: u64, salt: u64) -> impl Iterator<Item = u64> {
    (0..count).map(move |i| i.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
}

pub struct Graph {
    pub servers: Vec<(String, bool)>,
    pub flows: Vec<DataFlow>,
}

/// Random servers with an acyclic flow graph: edges only go forward in a
/// hidden random ranking.
pub fn random_dag(rng: &mut impl Rng, n: usize) -> Graph {
    let mut rank: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        rank.swap(i, rng.random_range(0..=i));
    }
    let servers: Vec<(String, bool)> = (0..n).map(|i| (format!("s{i:02}"), rng.random_bool(0.15))).collect();
    let mut flows = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if rank[a] < rank[b] && rng.random_bool(0.2) {
                flows.push(DataFlow::new(servers[a].0.clone(), servers[b].0.clone(), format!("f{}", flows.len())));
            }
        }
    }
    Graph { servers, flows }
}
