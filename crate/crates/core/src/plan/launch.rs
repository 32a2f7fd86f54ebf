use std::collections::{BTreeMap, BTreeSet};

use super::model::{DataFlow, PlanWarning};
use crate::report::FindingCode;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaunchOrder {
    pub order: Vec<String>,
    pub warnings: Vec<PlanWarning>,
}

/// Orders servers for launch.
///
/// Infrastructure servers come first, sorted by id. The rest follow in a
/// topological order of the data flows (producer before consumer), taking
/// the smallest id whenever several servers are ready. Servers on a data-flow
/// cycle are emitted together, sorted by id, at the point the cycle becomes
/// ready, and the cycle is reported as a `CYCLE_WARNING`.
///
/// Flows touching an infrastructure server, self-loops, and flows naming
/// unknown servers impose no ordering.
pub fn compute_launch_order<'a, I>(servers: I, flows: &[DataFlow]) -> LaunchOrder
where
    I: IntoIterator<Item = (&'a str, bool)>,
{
    let mut infrastructure = BTreeSet::new();
    let mut rest = BTreeSet::new();
    for (id, infra) in servers {
        if infra {
            infrastructure.insert(id);
        } else {
            rest.insert(id);
        }
    }
    // an id declared both ways counts as infrastructure
    rest.retain(|id| !infrastructure.contains(id));

    let ids: Vec<&str> = rest.iter().copied().collect();
    let index: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut successors: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ids.len()];
    for flow in flows {
        if let (Some(&p), Some(&c)) = (index.get(flow.producer.as_str()), index.get(flow.consumer.as_str())) {
            if p != c {
                successors[p].insert(c);
            }
        }
    }

    let components = strongly_connected(&successors);
    // ids are sorted, so the smallest index in a component is its smallest id
    let mut component_of = vec![0usize; ids.len()];
    for (ci, members) in components.iter().enumerate() {
        for &m in members {
            component_of[m] = ci;
        }
    }
    let key = |ci: usize| components[ci][0];

    let mut indegree = vec![0usize; components.len()];
    let mut condensed: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); components.len()];
    for (from, succ) in successors.iter().enumerate() {
        for &to in succ {
            let (cf, ct) = (component_of[from], component_of[to]);
            if cf != ct && condensed[cf].insert(ct) {
                indegree[ct] += 1;
            }
        }
    }

    let mut ready: BTreeSet<(usize, usize)> = (0..components.len())
        .filter(|&ci| indegree[ci] == 0)
        .map(|ci| (key(ci), ci))
        .collect();

    let mut order: Vec<String> = infrastructure.iter().map(|s| s.to_string()).collect();
    let mut warnings = Vec::new();
    while let Some((_, ci)) = ready.pop_first() {
        let members = &components[ci];
        if members.len() > 1 {
            let names: Vec<String> = members.iter().map(|&m| ids[m].to_string()).collect();
            warnings.push(PlanWarning {
                code: FindingCode::CycleWarning,
                message: format!(
                    "data flows form a cycle between {}; launch order among them is by id",
                    names.join(", ")
                ),
                servers: names,
            });
        }
        order.extend(members.iter().map(|&m| ids[m].to_string()));
        for &next in &condensed[ci] {
            indegree[next] -= 1;
            if indegree[next] == 0 {
                ready.insert((key(next), next));
            }
        }
    }

    LaunchOrder { order, warnings }
}

/// Tarjan's algorithm. Each returned component is sorted ascending.
fn strongly_connected(successors: &[BTreeSet<usize>]) -> Vec<Vec<usize>> {
    struct State<'g> {
        graph: &'g [BTreeSet<usize>],
        next_index: usize,
        index: Vec<Option<usize>>,
        lowlink: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        out: Vec<Vec<usize>>,
    }

    fn visit(s: &mut State<'_>, v: usize) {
        s.index[v] = Some(s.next_index);
        s.lowlink[v] = s.next_index;
        s.next_index += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for &w in s.graph[v].iter() {
            match s.index[w] {
                None => {
                    visit(s, w);
                    s.lowlink[v] = s.lowlink[v].min(s.lowlink[w]);
                }
                Some(wi) if s.on_stack[w] => s.lowlink[v] = s.lowlink[v].min(wi),
                Some(_) => {}
            }
        }
        if Some(s.lowlink[v]) == s.index[v] {
            let mut component = Vec::new();
            loop {
                let w = s.stack.pop().expect("root is still on the stack");
                s.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            component.sort_unstable();
            s.out.push(component);
        }
    }

    let n = successors.len();
    let mut state = State {
        graph: successors,
        next_index: 0,
        index: vec![None; n],
        lowlink: vec![0; n],
        on_stack: vec![false; n],
        stack: Vec::new(),
        out: Vec::new(),
    };
    for v in 0..n {
        if state.index[v].is_none() {
            visit(&mut state, v);
        }
    }
    state.out
}
