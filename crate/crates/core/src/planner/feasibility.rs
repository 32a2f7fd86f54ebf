use super::problem::PlanningProblem;

/// Memory a host group needs on the node at `position`, or `None` when some
/// member has no implementation for the node's platform or is pinned to a
/// site the node is not in.
pub(crate) fn group_demand(problem: &PlanningProblem, group: usize, position: usize) -> Option<u64> {
    let catalog = problem.catalog();
    let node = &catalog.nodes()[position];
    let assembly = problem.assembly();
    let mut total = 0u64;
    for &member in &problem.host_groups()[group].members {
        let component = &assembly.components[member];
        let alt = component.select_implementation(&node.arch, &node.os)?;
        if let Some(site) = problem.goal().pins.get(&component.id) {
            if !catalog.group_contains(site, &node.id) {
                return None;
            }
        }
        total += component.implementations[alt].memory_mb.max(0) as u64;
    }
    Some(total)
}

/// Node-independent demand estimate: each member's cheapest alternative.
pub(crate) fn nominal_demand(problem: &PlanningProblem, group: usize) -> u64 {
    let assembly = problem.assembly();
    problem.host_groups()[group]
        .members
        .iter()
        .map(|&m| {
            assembly.components[m]
                .implementations
                .iter()
                .map(|alt| alt.memory_mb.max(0) as u64)
                .min()
                .unwrap_or(0)
        })
        .sum()
}

/// `(position, demand)` for every node that can take the group given the
/// remaining capacity per node, in catalog document order.
pub(crate) fn candidates(problem: &PlanningProblem, group: usize, remaining: &[u64]) -> Vec<(usize, u64)> {
    (0..problem.catalog().nodes().len())
        .filter_map(|pos| {
            group_demand(problem, group, pos)
                .filter(|&demand| demand <= remaining[pos])
                .map(|demand| (pos, demand))
        })
        .collect()
}

pub(crate) fn full_capacity(problem: &PlanningProblem) -> Vec<u64> {
    problem.catalog().nodes().iter().map(|n| n.memory_mb).collect()
}

/// Nodes, in catalog document order, that can host every member of a host
/// group at full capacity: a matching implementation for each member, the
/// summed memory within the node's capacity, and every site pin honored.
///
/// An unknown host group has no feasible node.
pub fn feasible_nodes(problem: &PlanningProblem, host_group: &str) -> Vec<String> {
    let Some(group) = problem.host_group_index(host_group) else {
        return Vec::new();
    };
    let nodes = problem.catalog().nodes();
    candidates(problem, group, &full_capacity(problem))
        .into_iter()
        .map(|(pos, _)| nodes[pos].id.clone())
        .collect()
}
