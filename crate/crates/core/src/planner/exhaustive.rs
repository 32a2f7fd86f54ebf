use std::cmp::Ordering;

use super::cost::assignment_value;
use super::feasibility::{candidates, full_capacity};
use super::{PlanError, Planner, PlannerKind, PlanningProblem};
use crate::descriptors::Objective;
use crate::plan::{assemble_positions, DeploymentPlan};
use crate::resources::path_between;

/// Largest number of assignments the exhaustive planner will enumerate.
pub const SEARCH_SPACE_LIMIT: u128 = 1_000_000;

/// Enumerates every assignment of host groups to nodes and keeps the
/// cheapest feasible one.
///
/// Enumeration is lexicographic in (host group id, catalog node order); among
/// equal costs the first assignment in that order wins, so the result does
/// not depend on whether the search runs in parallel.
#[derive(Debug, Clone, Copy)]
pub struct Exhaustive {
    parallel: bool,
}

impl Default for Exhaustive {
    fn default() -> Self {
        Exhaustive {
            parallel: cfg!(feature = "parallel"),
        }
    }
}

impl Exhaustive {
    pub fn sequential() -> Self {
        Exhaustive { parallel: false }
    }

    /// Splits the search across the rayon pool. Without the `parallel`
    /// feature this is the same as [`Exhaustive::sequential`].
    pub fn parallel() -> Self {
        Exhaustive { parallel: true }
    }

    pub fn is_parallel(&self) -> bool {
        self.parallel && cfg!(feature = "parallel")
    }
}

#[derive(Debug, Clone)]
struct Best {
    cost: f64,
    /// Candidate index chosen for each host group; lexicographic order on
    /// this is enumeration order.
    choice: Vec<usize>,
    positions: Vec<usize>,
}

impl Best {
    fn beats(&self, other: &Best) -> bool {
        match self.cost.partial_cmp(&other.cost).expect("costs are never NaN") {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.choice < other.choice,
        }
    }
}

fn keep_better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.beats(&a) { b } else { a }),
        (a, b) => a.or(b),
    }
}

struct Search<'p> {
    problem: &'p PlanningProblem,
    candidates: Vec<Vec<(usize, u64)>>,
    /// Links whose later endpoint (in host group order) is this group; they
    /// can be checked as soon as this group is placed.
    closing: Vec<Vec<usize>>,
    first_only: bool,
}

struct Frame {
    remaining: Vec<u64>,
    choice: Vec<usize>,
    positions: Vec<usize>,
}

impl Search<'_> {
    fn admissible(&self, group: usize, positions: &[usize]) -> bool {
        let catalog = self.problem.catalog();
        let connections = &self.problem.assembly().connections;
        self.closing[group].iter().all(|&li| {
            let link = self.problem.links()[li];
            let connection = &connections[link.connection];
            let measured = path_between(catalog, positions[link.source_group], positions[link.target_group]);
            measured.satisfies(connection.max_latency_ms, connection.min_bandwidth_mbps)
        })
    }

    fn descend(&self, frame: &mut Frame, best: &mut Option<Best>) {
        let group = frame.positions.len();
        if group == self.candidates.len() {
            let leaf = Best {
                cost: assignment_value(self.problem, &frame.positions),
                choice: frame.choice.clone(),
                positions: frame.positions.clone(),
            };
            if best.as_ref().is_none_or(|b| leaf.beats(b)) {
                *best = Some(leaf);
            }
            return;
        }
        for (ci, &(pos, demand)) in self.candidates[group].iter().enumerate() {
            if self.first_only && best.is_some() {
                return;
            }
            if frame.remaining[pos] < demand {
                continue;
            }
            frame.positions.push(pos);
            if self.admissible(group, &frame.positions) {
                frame.remaining[pos] -= demand;
                frame.choice.push(ci);
                self.descend(frame, best);
                frame.choice.pop();
                frame.remaining[pos] += demand;
            }
            frame.positions.pop();
        }
    }

    /// Best assignment among those whose first group takes its `ci`-th candidate.
    fn subtree(&self, ci: usize) -> Option<Best> {
        let (pos, demand) = self.candidates[0][ci];
        let mut frame = Frame {
            remaining: full_capacity(self.problem),
            choice: vec![ci],
            positions: vec![pos],
        };
        if !self.admissible(0, &frame.positions) {
            return None;
        }
        frame.remaining[pos] -= demand;
        let mut best = None;
        self.descend(&mut frame, &mut best);
        best
    }

    fn run(&self, parallel: bool) -> Option<Best> {
        if self.candidates.is_empty() {
            return Some(Best {
                cost: 0.0,
                choice: Vec::new(),
                positions: Vec::new(),
            });
        }
        let roots = 0..self.candidates[0].len();
        if parallel {
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                return if self.first_only {
                    roots.into_par_iter().find_map_first(|ci| self.subtree(ci))
                } else {
                    roots
                        .into_par_iter()
                        .map(|ci| self.subtree(ci))
                        .reduce(|| None, keep_better)
                };
            }
        }
        if self.first_only {
            roots.into_iter().find_map(|ci| self.subtree(ci))
        } else {
            roots.map(|ci| self.subtree(ci)).fold(None, keep_better)
        }
    }
}

impl Planner for Exhaustive {
    fn kind(&self) -> PlannerKind {
        PlannerKind::Exhaustive
    }

    fn plan(&self, problem: &PlanningProblem) -> Result<DeploymentPlan, PlanError> {
        let capacity = full_capacity(problem);
        let groups = problem.host_groups().len();
        let candidates: Vec<Vec<(usize, u64)>> = (0..groups).map(|gi| candidates(problem, gi, &capacity)).collect();

        let size = candidates
            .iter()
            .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
        if size > SEARCH_SPACE_LIMIT {
            return Err(PlanError::SearchSpaceTooLarge {
                size,
                limit: SEARCH_SPACE_LIMIT,
            });
        }

        let mut closing = vec![Vec::new(); groups];
        for (li, link) in problem.links().iter().enumerate() {
            closing[link.source_group.max(link.target_group)].push(li);
        }

        let search = Search {
            problem,
            candidates,
            closing,
            first_only: problem.goal().objective == Objective::None,
        };
        let best = search.run(self.is_parallel()).ok_or(PlanError::NoFeasibleAssignment)?;
        assemble_positions(problem, &best.positions)
    }
}
