use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::grid::{MiddlewareError, ServerSpec, SimulatedGrid};
use crate::plan::DeploymentPlan;
use crate::planner::{check_plan, PlanningProblem};
use crate::report::ValidationReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HandleState {
    Submitted,
    Running,
    Suspended,
    Cancelled,
    Failed,
}

impl HandleState {
    pub const ALL: [HandleState; 5] = [
        HandleState::Submitted,
        HandleState::Running,
        HandleState::Suspended,
        HandleState::Cancelled,
        HandleState::Failed,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            HandleState::Submitted => "Submitted",
            HandleState::Running => "Running",
            HandleState::Suspended => "Suspended",
            HandleState::Cancelled => "Cancelled",
            HandleState::Failed => "Failed",
        }
    }

    /// Whether a process in this state holds memory on its node.
    pub fn holds_memory(self) -> bool {
        matches!(self, HandleState::Submitted | HandleState::Running | HandleState::Suspended)
    }
}

impl fmt::Display for HandleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LifecycleAction {
    Cancel,
    Suspend,
    Resume,
    Restart,
}

impl LifecycleAction {
    pub const ALL: [LifecycleAction; 4] = [
        LifecycleAction::Cancel,
        LifecycleAction::Suspend,
        LifecycleAction::Resume,
        LifecycleAction::Restart,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LifecycleAction::Cancel => "cancel",
            LifecycleAction::Suspend => "suspend",
            LifecycleAction::Resume => "resume",
            LifecycleAction::Restart => "restart",
        }
    }
}

impl fmt::Display for LifecycleAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The lifecycle transition table. `None` marks an illegal pair. A restart
/// targets `Running` but ends in `Failed` if resubmission fails.
pub fn transition(state: HandleState, action: LifecycleAction) -> Option<HandleState> {
    use HandleState::*;
    use LifecycleAction::*;
    match (state, action) {
        (Running, Suspend) => Some(Suspended),
        (Suspended, Resume) => Some(Running),
        (Running | Suspended, Cancel) => Some(Cancelled),
        (Running | Suspended | Cancelled | Failed, Restart) => Some(Running),
        _ => None,
    }
}

/// One component server as seen by the executor. Carries both handle
/// sorts: the middleware job token and the component reference.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ExecutionHandle {
    pub server_id: String,
    pub node_id: String,
    #[serde(rename = "infrastructure")]
    pub is_infrastructure: bool,
    #[serde(rename = "memoryMB")]
    pub memory_mb: u64,
    /// Registry names of the server's provided ports, "<component>/<port>".
    pub bound_names: Vec<String>,
    pub middleware_handle: Option<String>,
    pub component_ref: Option<String>,
    pub state: HandleState,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NameRegistry {
    bindings: BTreeMap<String, String>,
}

impl NameRegistry {
    pub fn bind(&mut self, name: &str, reference: &str) -> Result<(), ExecError> {
        if self.bindings.contains_key(name) {
            return Err(ExecError::NameAlreadyBound(name.to_string()));
        }
        self.bindings.insert(name.to_string(), reference.to_string());
        Ok(())
    }

    pub fn unbind(&mut self, name: &str) -> Option<String> {
        self.bindings.remove(name)
    }

    pub fn resolve(&self, name: &str) -> Result<&str, ExecError> {
        self.bindings
            .get(name)
            .map(String::as_str)
            .ok_or_else(|| ExecError::UnknownName(name.to_string()))
    }

    pub fn bindings(&self) -> &BTreeMap<String, String> {
        &self.bindings
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum Event {
    JobSubmitted { server_id: String, node_id: String, job: String },
    SubmissionFailed { server_id: String, node_id: String, reason: String },
    Installed { server_id: String },
    Configured { server_id: String, registry_ref: Option<String> },
    Activated { server_id: String, component_ref: String },
    RegistryStarted { server_id: String, component_ref: String },
    NameBound { name: String, component_ref: String },
    NameUnbound { name: String },
    ReferenceInjected {
        connection_id: String,
        producer: String,
        consumer: String,
        component_ref: String,
    },
    Suspended { server_id: String, job: String },
    Resumed { server_id: String, job: String },
    Cancelled { server_id: String, job: String },
    Restarting { server_id: String, previous_job: Option<String> },
}

/// A log entry. `time` is a logical clock: the entry's 1-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoggedEvent {
    pub time: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("name `{0}` is already bound")]
    NameAlreadyBound(String),
}

#[derive(Debug, Error)]
pub enum DeployError {
    #[error("plan digest {plan} does not match the inputs ({expected})")]
    DigestMismatch { plan: String, expected: String },
    #[error("the simulated grid does not model the catalog's nodes")]
    GridMismatch,
    #[error("plan is invalid:\n{0}")]
    InvalidPlan(ValidationReport),
    #[error("submission of server `{server}` failed: {source}")]
    Submission {
        /// State at the point of failure: earlier servers running, the
        /// failed one `Failed`, later ones not attempted.
        session: Box<ExecutionSession>,
        server: String,
        source: MiddlewareError,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LifecycleError {
    #[error("no handle for server `{0}`")]
    UnknownServer(String),
    #[error("illegal transition: cannot {action} server `{server}` in state {state}")]
    IllegalTransition {
        server: String,
        state: HandleState,
        action: LifecycleAction,
    },
    #[error("restart of server `{server}` failed: {source}")]
    RestartFailed { server: String, source: MiddlewareError },
    #[error("middleware error on server `{server}`: {source}")]
    Middleware { server: String, source: MiddlewareError },
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("malformed session snapshot: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported session snapshot formatVersion {0}")]
    UnsupportedVersion(u64),
}

pub const SNAPSHOT_FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct Snapshot {
    format_version: u64,
    handles: Vec<ExecutionHandle>,
    bindings: NameRegistry,
    event_log: Vec<LoggedEvent>,
    registry_ref: Option<String>,
    plan: DeploymentPlan,
    grid: SimulatedGrid,
}

/// Live deployment state. Single owner: callers serialize all operations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionSession {
    plan: DeploymentPlan,
    grid: SimulatedGrid,
    /// In submission order.
    handles: Vec<ExecutionHandle>,
    registry: NameRegistry,
    registry_ref: Option<String>,
    event_log: Vec<LoggedEvent>,
}

pub fn component_ref(node: &str, server: &str) -> String {
    format!("sim://{node}/{server}")
}

/// Executes `plan` on `grid`: walks the launch order, bootstraps each
/// server with a job submission, runs install, configure and activate, binds
/// provided ports in the registry and injects references along data flows.
///
/// Stops at the first failed submission; see [`DeployError::Submission`].
pub fn deploy(grid: SimulatedGrid, plan: &DeploymentPlan, problem: &PlanningProblem) -> Result<ExecutionSession, DeployError> {
    if plan.problem_digest != problem.digest() {
        return Err(DeployError::DigestMismatch {
            plan: plan.problem_digest.clone(),
            expected: problem.digest().to_string(),
        });
    }
    if !grid.matches_catalog(problem.catalog()) {
        return Err(DeployError::GridMismatch);
    }
    let report = check_plan(problem, plan);
    if !report.is_empty() {
        return Err(DeployError::InvalidPlan(report));
    }

    let assembly = problem.assembly();
    let mut session = ExecutionSession {
        plan: plan.clone(),
        grid,
        handles: Vec::new(),
        registry: NameRegistry::default(),
        registry_ref: None,
        event_log: Vec::new(),
    };
    for server_id in &plan.launch_order {
        let server = plan.server(server_id).expect("checked plans launch only their servers");
        let mut memory_mb = 0;
        let mut names = Vec::new();
        for placed in &server.components {
            let decl = assembly.component(&placed.id).expect("checked plans place declared components");
            memory_mb += decl.implementations[placed.implementation_index].memory_mb as u64;
            names.extend(decl.provided_ports.iter().map(|p| format!("{}/{p}", decl.id)));
        }
        session.handles.push(ExecutionHandle {
            server_id: server.server_id.clone(),
            node_id: server.node_id.clone(),
            is_infrastructure: server.is_infrastructure,
            memory_mb,
            bound_names: names,
            middleware_handle: None,
            component_ref: None,
            state: HandleState::Submitted,
        });
        let index = session.handles.len() - 1;
        if let Err(source) = session.start(index) {
            return Err(DeployError::Submission {
                session: Box::new(session),
                server: server_id.clone(),
                source,
            });
        }
    }
    Ok(session)
}

impl ExecutionSession {
    pub fn plan(&self) -> &DeploymentPlan {
        &self.plan
    }

    pub fn grid(&self) -> &SimulatedGrid {
        &self.grid
    }

    /// Handles in submission order.
    pub fn handles(&self) -> &[ExecutionHandle] {
        &self.handles
    }

    pub fn handle(&self, server: &str) -> Option<&ExecutionHandle> {
        self.handles.iter().find(|h| h.server_id == server)
    }

    pub fn registry(&self) -> &NameRegistry {
        &self.registry
    }

    /// Reference of the first activated infrastructure server, if any.
    pub fn registry_ref(&self) -> Option<&str> {
        self.registry_ref.as_deref()
    }

    pub fn event_log(&self) -> &[LoggedEvent] {
        &self.event_log
    }

    pub fn resolve(&self, name: &str) -> Result<&str, ExecError> {
        self.registry.resolve(name)
    }

    fn log(&mut self, event: Event) {
        let time = self.event_log.len() as u64 + 1;
        self.event_log.push(LoggedEvent { time, event });
    }

    fn index_of(&self, server: &str) -> Result<usize, LifecycleError> {
        self.handles
            .iter()
            .position(|h| h.server_id == server)
            .ok_or_else(|| LifecycleError::UnknownServer(server.to_string()))
    }

    /// Submits the bootstrap job for handle `index` and brings it to
    /// `Running`. On submission failure the handle is left `Failed`.
    fn start(&mut self, index: usize) -> Result<(), MiddlewareError> {
        let handle = &self.handles[index];
        let (server_id, node_id) = (handle.server_id.clone(), handle.node_id.clone());
        let spec = ServerSpec {
            server_id: server_id.clone(),
            memory_mb: handle.memory_mb,
        };
        let job = match self.grid.submit_job(&node_id, &spec) {
            Ok(job) => job,
            Err(e) => {
                self.handles[index].state = HandleState::Failed;
                self.log(Event::SubmissionFailed {
                    server_id,
                    node_id,
                    reason: e.to_string(),
                });
                return Err(e);
            }
        };
        self.handles[index].middleware_handle = Some(job.clone());
        self.handles[index].state = HandleState::Submitted;
        self.log(Event::JobSubmitted {
            server_id: server_id.clone(),
            node_id: node_id.clone(),
            job,
        });

        self.log(Event::Installed {
            server_id: server_id.clone(),
        });
        self.log(Event::Configured {
            server_id: server_id.clone(),
            registry_ref: self.registry_ref.clone(),
        });
        let reference = component_ref(&node_id, &server_id);
        self.handles[index].component_ref = Some(reference.clone());
        self.handles[index].state = HandleState::Running;
        self.log(Event::Activated {
            server_id: server_id.clone(),
            component_ref: reference.clone(),
        });
        if self.handles[index].is_infrastructure && self.registry_ref.as_ref().is_none_or(|r| *r == reference) {
            self.registry_ref = Some(reference.clone());
            self.log(Event::RegistryStarted {
                server_id: server_id.clone(),
                component_ref: reference.clone(),
            });
        }
        for name in self.handles[index].bound_names.clone() {
            self.registry
                .bind(&name, &reference)
                .expect("names are unbound whenever their server stops");
            self.log(Event::NameBound {
                name,
                component_ref: reference.clone(),
            });
        }
        self.inject(&server_id);
        Ok(())
    }

    /// Hands producer references to consumers on every data flow touching
    /// `server` whose two ends are running.
    fn inject(&mut self, server: &str) {
        let running = |s: &ExecutionSession, id: &str| {
            s.handle(id)
                .filter(|h| h.state == HandleState::Running)
                .and_then(|h| h.component_ref.clone())
        };
        let flows: Vec<_> = self
            .plan
            .data_flows
            .iter()
            .filter(|f| f.producer == server || f.consumer == server)
            .cloned()
            .collect();
        for flow in flows {
            if let (Some(reference), Some(_)) = (running(self, &flow.producer), running(self, &flow.consumer)) {
                self.log(Event::ReferenceInjected {
                    connection_id: flow.connection_id,
                    producer: flow.producer,
                    consumer: flow.consumer,
                    component_ref: reference,
                });
            }
        }
    }

    /// Stops the job of handle `index` and unbinds its names.
    fn stop(&mut self, index: usize) -> Result<String, LifecycleError> {
        let server_id = self.handles[index].server_id.clone();
        let job = self.handles[index]
            .middleware_handle
            .clone()
            .expect("a running or suspended server has a job");
        self.grid
            .cancel_job(&job)
            .map_err(|source| LifecycleError::Middleware {
                server: server_id.clone(),
                source,
            })?;
        for name in self.handles[index].bound_names.clone() {
            if self.registry.unbind(&name).is_some() {
                self.log(Event::NameUnbound { name });
            }
        }
        Ok(job)
    }

    /// Applies a lifecycle action. A failed restart leaves the handle
    /// `Failed` and returns [`LifecycleError::RestartFailed`].
    pub fn lifecycle(&mut self, server: &str, action: LifecycleAction) -> Result<&ExecutionHandle, LifecycleError> {
        let index = self.index_of(server)?;
        let state = self.handles[index].state;
        let Some(target) = transition(state, action) else {
            return Err(LifecycleError::IllegalTransition {
                server: server.to_string(),
                state,
                action,
            });
        };
        let server_id = self.handles[index].server_id.clone();
        let middleware = |source| LifecycleError::Middleware {
            server: server_id.clone(),
            source,
        };
        match action {
            LifecycleAction::Suspend | LifecycleAction::Resume => {
                let job = self.handles[index].middleware_handle.clone().expect("running servers have a job");
                let suspend = action == LifecycleAction::Suspend;
                self.grid.set_suspended(&job, suspend).map_err(middleware)?;
                self.handles[index].state = target;
                self.log(if suspend {
                    Event::Suspended {
                        server_id: server_id.clone(),
                        job,
                    }
                } else {
                    Event::Resumed {
                        server_id: server_id.clone(),
                        job,
                    }
                });
            }
            LifecycleAction::Cancel => {
                let job = self.stop(index)?;
                self.handles[index].state = target;
                self.log(Event::Cancelled {
                    server_id: server_id.clone(),
                    job,
                });
            }
            LifecycleAction::Restart => {
                let previous_job = self.handles[index].middleware_handle.clone();
                if state.holds_memory() {
                    self.stop(index)?;
                }
                self.log(Event::Restarting {
                    server_id: server_id.clone(),
                    previous_job,
                });
                self.start(index).map_err(|source| LifecycleError::RestartFailed {
                    server: server_id.clone(),
                    source,
                })?;
            }
        }
        Ok(&self.handles[index])
    }

    /// Mutable access to the grid, for scripting failures mid-session.
    pub fn grid_mut(&mut self) -> &mut SimulatedGrid {
        &mut self.grid
    }

    /// Canonical UTF-8 JSON snapshot with a trailing newline.
    pub fn snapshot(&self) -> Vec<u8> {
        let doc = Snapshot {
            format_version: SNAPSHOT_FORMAT_VERSION,
            handles: self.handles.clone(),
            bindings: self.registry.clone(),
            event_log: self.event_log.clone(),
            registry_ref: self.registry_ref.clone(),
            plan: self.plan.clone(),
            grid: self.grid.clone(),
        };
        let mut bytes = serde_json::to_vec_pretty(&doc).expect("snapshots always serialize");
        bytes.push(b'\n');
        bytes
    }

    pub fn from_snapshot(bytes: &[u8]) -> Result<Self, SnapshotError> {
        let value: serde_json::Value = serde_json::from_slice(bytes)?;
        let version = value.get("formatVersion").and_then(serde_json::Value::as_u64);
        if version != Some(SNAPSHOT_FORMAT_VERSION) {
            return Err(SnapshotError::UnsupportedVersion(version.unwrap_or(0)));
        }
        let doc: Snapshot = serde_json::from_value(value)?;
        Ok(ExecutionSession {
            plan: doc.plan,
            grid: doc.grid,
            handles: doc.handles,
            registry: doc.bindings,
            registry_ref: doc.registry_ref,
            event_log: doc.event_log,
        })
    }
}
