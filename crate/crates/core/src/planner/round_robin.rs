use super::feasibility::{full_capacity, group_demand};
use super::{PlanError, Planner, PlannerKind, PlanningProblem};
use crate::plan::{assemble_positions, DeploymentPlan};

/// Host groups in id order, each on the next node (wrapping) at or after a
/// cursor that can still take it. The cursor then moves past the chosen
/// node.
///
/// Neither the objective nor connection requirements steer the choice. A
/// placement that breaks a requirement is reported as
/// [`PlanError::RequirementViolated`] rather than returned.
#[derive(Debug, Default, Clone, Copy)]
pub struct RoundRobin;

impl Planner for RoundRobin {
    fn kind(&self) -> PlannerKind {
        PlannerKind::RoundRobin
    }

    fn plan(&self, problem: &PlanningProblem) -> Result<DeploymentPlan, PlanError> {
        let node_count = problem.catalog().nodes().len();
        let mut remaining = full_capacity(problem);
        let mut cursor = 0;
        let mut positions = Vec::with_capacity(problem.host_groups().len());
        for (gi, group) in problem.host_groups().iter().enumerate() {
            let chosen = (0..node_count)
                .map(|step| (cursor + step) % node_count)
                .find_map(|pos| {
                    group_demand(problem, gi, pos)
                        .filter(|&demand| demand <= remaining[pos])
                        .map(|demand| (pos, demand))
                });
            let Some((pos, demand)) = chosen else {
                return Err(PlanError::Infeasible {
                    planner: PlannerKind::RoundRobin,
                    group: group.id.clone(),
                });
            };
            remaining[pos] -= demand;
            cursor = (pos + 1) % node_count;
            positions.push(pos);
        }
        assemble_positions(problem, &positions)
    }
}
