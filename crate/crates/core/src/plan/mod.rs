//! The deployment plan: the contract between planners and the executor.

mod assemble;
mod format;
mod launch;
mod model;

pub use assemble::assemble_plan;
pub use format::{
    deserialize_plan, problem_digest, serialize_plan, structural_violations, PlanFormatError,
    FORMAT_VERSION,
};
pub use launch::{compute_launch_order, LaunchOrder};
pub use model::{
    ConnectionPlan, DataFlow, DeploymentPlan, PlacedComponent, PlanWarning, Requirement,
    ServerPlacement,
};

pub(crate) use assemble::assemble_positions;
