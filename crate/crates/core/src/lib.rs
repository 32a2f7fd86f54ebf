//! Deployment planning for component-based applications on hierarchical
//! resource pools, with a simulated grid middleware to execute plans.
//!
//! The pipeline: parse an assembly ([`descriptors`]) and a resource catalog
//! ([`resources`]), build a [`planner::PlanningProblem`], run one of the
//! planners to get a [`plan::DeploymentPlan`], then execute it with
//! [`executor::deploy`]. The [`cli`] module drives all of it from the
//! command line.

pub mod cli;
pub mod descriptors;
pub mod executor;
pub mod plan;
pub mod planner;
pub mod report;
pub mod resources;
