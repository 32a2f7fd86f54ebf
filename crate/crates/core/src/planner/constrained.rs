use std::cmp::Reverse;

use super::cost::objective_value;
use super::feasibility::{candidates, full_capacity, nominal_demand};
use super::{PlanError, Planner, PlannerKind, PlanningProblem};
use crate::plan::{assemble_positions, DeploymentPlan};
use crate::resources::path_between;

/// Greedy placement, largest host group first.
///
/// Host groups are taken by descending memory demand (ties by id). Each goes
/// to the admissible node with the best marginal objective against the
/// neighbors already placed, ties broken by catalog order. A node is
/// admissible when it has the capacity and every connection to an
/// already-placed neighbor meets its latency and bandwidth bounds.
///
/// Greedy choices are never revisited, so a failure does not prove that no
/// plan exists.
#[derive(Debug, Default, Clone, Copy)]
pub struct Constrained;

impl Planner for Constrained {
    fn kind(&self) -> PlannerKind {
        PlannerKind::Constrained
    }

    fn plan(&self, problem: &PlanningProblem) -> Result<DeploymentPlan, PlanError> {
        let groups = problem.host_groups();
        let catalog = problem.catalog();
        let objective = problem.goal().objective;
        let connections = &problem.assembly().connections;

        let mut order: Vec<usize> = (0..groups.len()).collect();
        order.sort_by_key(|&gi| (Reverse(nominal_demand(problem, gi)), groups[gi].id.as_str()));

        let mut remaining = full_capacity(problem);
        let mut placed: Vec<Option<usize>> = vec![None; groups.len()];
        for gi in order {
            let mut best: Option<(f64, usize, u64)> = None;
            'candidates: for (pos, demand) in candidates(problem, gi, &remaining) {
                let mut samples = Vec::new();
                for link in problem.links() {
                    let other = if link.source_group == gi {
                        link.target_group
                    } else if link.target_group == gi {
                        link.source_group
                    } else {
                        continue;
                    };
                    let other_pos = if other == gi {
                        pos
                    } else {
                        match placed[other] {
                            Some(p) => p,
                            None => continue,
                        }
                    };
                    let measured = path_between(catalog, pos, other_pos);
                    let connection = &connections[link.connection];
                    if !measured.satisfies(connection.max_latency_ms, connection.min_bandwidth_mbps) {
                        continue 'candidates;
                    }
                    samples.push((measured, pos != other_pos));
                }
                let score = objective_value(objective, samples);
                if best.is_none_or(|(best_score, _, _)| score < best_score) {
                    best = Some((score, pos, demand));
                }
            }
            let Some((_, pos, demand)) = best else {
                return Err(PlanError::Infeasible {
                    planner: PlannerKind::Constrained,
                    group: groups[gi].id.clone(),
                });
            };
            remaining[pos] -= demand;
            placed[gi] = Some(pos);
        }

        let positions: Vec<usize> = placed
            .into_iter()
            .map(|p| p.expect("every host group is placed"))
            .collect();
        // assembling re-verifies every connection requirement
        assemble_positions(problem, &positions)
    }
}
