use std::collections::BTreeMap;

use super::check::check_plan;
use super::problem::PlanningProblem;
use super::PlanError;
use crate::descriptors::Objective;
use crate::plan::DeploymentPlan;
use crate::resources::{path_between, LinkMetrics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanCost {
    /// Milliseconds for the latency objectives, negated Mbps for the
    /// bandwidth objective, 0 without an objective. Lower is better.
    pub objective_value: f64,
    pub feasible: bool,
}

/// Folds per-connection path metrics into an objective value. Each sample
/// is a connection's metrics and whether its endpoints sit on different
/// nodes; samples must come in assembly connection order so that sums are
/// reproducible bit for bit.
pub(crate) fn objective_value<I>(objective: Objective, samples: I) -> f64
where
    I: IntoIterator<Item = (LinkMetrics, bool)>,
{
    let inter_node = samples.into_iter().filter(|(_, inter)| *inter).map(|(m, _)| m);
    match objective {
        Objective::None => 0.0,
        Objective::MinimizeWorstLatency => inter_node.map(|m| m.latency_ms).fold(0.0, f64::max),
        Objective::MinimizeTotalLatency => inter_node.map(|m| m.latency_ms).fold(0.0, |acc, l| acc + l),
        Objective::MaximizeMinBandwidth => inter_node
            .filter_map(|m| m.bandwidth.finite())
            .reduce(f64::min)
            .map_or(0.0, |bw| -bw),
    }
}

/// Objective value of a full assignment of host groups to node positions.
pub(crate) fn assignment_value(problem: &PlanningProblem, positions: &[usize]) -> f64 {
    let objective = problem.goal().objective;
    if objective == Objective::None {
        return 0.0;
    }
    let catalog = problem.catalog();
    objective_value(
        objective,
        problem.links().iter().map(|link| {
            let (a, b) = (positions[link.source_group], positions[link.target_group]);
            (path_between(catalog, a, b), a != b)
        }),
    )
}

/// Scores a plan under the problem's goal. The plan must pass
/// [`check_plan`].
pub fn plan_cost(problem: &PlanningProblem, plan: &DeploymentPlan) -> Result<PlanCost, PlanError> {
    let report = check_plan(problem, plan);
    if !report.is_empty() {
        return Err(PlanError::InvalidPlan(report));
    }
    let catalog = problem.catalog();
    let mut position_of: BTreeMap<&str, usize> = BTreeMap::new();
    for server in &plan.servers {
        let pos = catalog
            .node_position(&server.node_id)
            .expect("checked plans only name catalog nodes");
        for component in &server.components {
            position_of.insert(component.id.as_str(), pos);
        }
    }
    let value = objective_value(
        problem.goal().objective,
        problem.assembly().connections.iter().map(|c| {
            let a = position_of[c.source.component.as_str()];
            let b = position_of[c.target.component.as_str()];
            (path_between(catalog, a, b), a != b)
        }),
    );
    Ok(PlanCost {
        objective_value: value,
        feasible: true,
    })
}
