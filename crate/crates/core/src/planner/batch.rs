use super::{PlanError, PlannerKind, PlanningProblem};
use crate::plan::DeploymentPlan;

/// Plans every problem with the given planner, results in input order.
///
/// Problems are spread over the rayon pool when `parallel` is set and the
/// `parallel` feature is enabled; otherwise they run one after another.
pub fn plan_many(kind: PlannerKind, problems: &[PlanningProblem], parallel: bool) -> Vec<Result<DeploymentPlan, PlanError>> {
    let planner = kind.planner();
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return problems.par_iter().map(|p| planner.plan(p)).collect();
    }
    let _ = parallel;
    problems.iter().map(|p| planner.plan(p)).collect()
}
