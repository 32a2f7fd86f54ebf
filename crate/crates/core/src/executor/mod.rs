//! Plan execution against a simulated grid middleware.
//!
//! [`deploy`] bootstraps each server with a job submission, walks it through
//! install, configure and activate, and wires references through a name
//! registry. The resulting [`ExecutionSession`] tracks both handle sorts per
//! server and accepts [`LifecycleAction`]s.

mod grid;
mod session;

pub use grid::{MiddlewareError, NodeLedger, ServerSpec, SimProcess, SimulatedGrid};
pub use session::{
    component_ref, deploy, transition, DeployError, Event, ExecError, ExecutionHandle, ExecutionSession,
    HandleState, LifecycleAction, LifecycleError, LoggedEvent, NameRegistry, SnapshotError,
    SNAPSHOT_FORMAT_VERSION,
};
