//! Planners map host groups onto nodes and emit a [`DeploymentPlan`].
//!
//! Three interchangeable algorithms implement [`Planner`]:
//!
//! * [`RoundRobin`] cycles through the catalog and ignores network
//!   requirements and the objective while choosing nodes;
//! * [`Constrained`] is a greedy first-fit that honors network requirements
//!   and scores candidates by their marginal objective;
//! * [`Exhaustive`] enumerates every assignment and returns the optimum. It
//!   doubles as the reference the other two are tested against.
//!
//! [`check_plan`] verifies any plan against its problem without relying on
//! planner internals.

mod batch;
mod check;
mod constrained;
mod cost;
mod exhaustive;
mod feasibility;
mod problem;
mod round_robin;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::plan::DeploymentPlan;
use crate::report::ValidationReport;
use crate::resources::LinkMetrics;

pub use batch::plan_many;
pub use check::check_plan;
pub use constrained::Constrained;
pub use cost::{plan_cost, PlanCost};
pub use exhaustive::{Exhaustive, SEARCH_SPACE_LIMIT};
pub use feasibility::feasible_nodes;
pub use problem::{validate_goal, HostGroup, PlanningProblem, ProblemError};
pub use round_robin::RoundRobin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, clap::ValueEnum)]
pub enum PlannerKind {
    RoundRobin,
    Constrained,
    Exhaustive,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::RoundRobin, PlannerKind::Constrained, PlannerKind::Exhaustive];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::RoundRobin => "round-robin",
            PlannerKind::Constrained => "constrained",
            PlannerKind::Exhaustive => "exhaustive",
        }
    }

    pub fn planner(self) -> Box<dyn Planner> {
        match self {
            PlannerKind::RoundRobin => Box::new(RoundRobin),
            PlannerKind::Constrained => Box::new(Constrained),
            PlannerKind::Exhaustive => Box::new(Exhaustive::default()),
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlannerKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown planner `{s}`"))
    }
}

fn incompleteness_caveat(planner: &PlannerKind) -> &'static str {
    match planner {
        PlannerKind::Constrained => {
            " (greedy search is incomplete: a feasible plan may still exist; try the exhaustive planner)"
        }
        _ => "",
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("{planner} planner found no admissible node for host group `{group}`{}", incompleteness_caveat(.planner))]
    Infeasible { planner: PlannerKind, group: String },
    #[error("no feasible assignment exists")]
    NoFeasibleAssignment,
    #[error("search space of {size} assignments exceeds the limit of {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error("connection `{connection}` requirement not met by the chosen placement ({measured})")]
    RequirementViolated { connection: String, measured: LinkMetrics },
    #[error("placement does not cover host group `{0}`")]
    MissingPlacement(String),
    #[error("placement names unknown node `{0}`")]
    UnknownNode(String),
    #[error("component `{component}` has no implementation for node `{node}`")]
    NoImplementation { component: String, node: String },
    #[error("invalid plan:\n{0}")]
    InvalidPlan(ValidationReport),
}

/// A deployment planning algorithm.
pub trait Planner: Send + Sync {
    fn kind(&self) -> PlannerKind;

    fn plan(&self, problem: &PlanningProblem) -> Result<DeploymentPlan, PlanError>;
}

/// Runs the planner of the given kind with its default settings.
pub fn plan_with(kind: PlannerKind, problem: &PlanningProblem) -> Result<DeploymentPlan, PlanError> {
    kind.planner().plan(problem)
}
