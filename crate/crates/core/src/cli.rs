//! Command-line driver.
//!
//! Exit codes: 0 on success, 1 on a domain failure (invalid input, no
//! feasible plan, failed deployment, illegal transition), 2 when a file
//! cannot be read, parsed or written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::descriptors::{parse_assembly_unchecked, parse_goal, validate_assembly, ComponentAssembly, UserGoal};
use crate::executor::{deploy, DeployError, ExecutionHandle, ExecutionSession, LifecycleAction, LifecycleError, SimulatedGrid};
use crate::plan::{deserialize_plan, serialize_plan};
use crate::planner::{plan_cost, plan_with, validate_goal, PlannerKind, PlanningProblem, ProblemError};
use crate::report::{Severity, ValidationReport};
use crate::resources::{format_quantity, hierarchy_findings, parse_catalog, path_metrics, GridCatalog};

#[derive(Debug, Parser)]
#[command(name = "gridplan", version, about = "Plan and run component deployments on a simulated grid")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an assembly and a resource catalog.
    Validate {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        resources: PathBuf,
    },
    /// Compute a deployment plan.
    Plan {
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        resources: PathBuf,
        #[arg(long, value_enum)]
        planner: PlannerKind,
        /// Overrides the goal embedded in the assembly.
        #[arg(long)]
        goal_file: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the network path metrics between two nodes.
    Paths {
        #[arg(long)]
        resources: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Execute a plan on a fresh simulated grid and save the session.
    Deploy {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        app: PathBuf,
        #[arg(long)]
        resources: PathBuf,
        #[arg(long)]
        session: PathBuf,
        /// Goal the plan was computed with, if not the embedded one.
        #[arg(long)]
        goal_file: Option<PathBuf>,
        /// Make every job submission to this node fail.
        #[arg(long)]
        inject_failure: Vec<String>,
    },
    /// Print one line per server of a saved session.
    Status {
        #[arg(long)]
        session: PathBuf,
    },
    /// Apply a lifecycle action to one server of a saved session.
    Control {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        server: String,
        #[arg(long, value_enum)]
        action: LifecycleAction,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(String),
    Environment(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Environment(_) => 2,
        }
    }
}

type Outcome = Result<(), Failure>;

/// Runs one command and returns its exit code. Reports go to `out`,
/// diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Validate { app, resources } => validate(&app, &resources, out),
        Command::Plan {
            app,
            resources,
            planner,
            goal_file,
            out: target,
        } => plan(&app, &resources, planner, goal_file.as_deref(), &target, out),
        Command::Paths { resources, from, to } => paths(&resources, &from, &to, out),
        Command::Deploy {
            plan,
            app,
            resources,
            session,
            goal_file,
            inject_failure,
        } => deploy_cmd(&plan, &app, &resources, &session, goal_file.as_deref(), &inject_failure, out),
        Command::Status { session } => status(&session, out),
        Command::Control { session, server, action } => control(&session, &server, action, out),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            let (Failure::Domain(message) | Failure::Environment(message)) = &failure;
            let _ = writeln!(err, "error: {message}");
            failure.code()
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Environment(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::Environment(format!("cannot write {}: {e}", path.display())))
}

fn load_assembly(path: &Path) -> Result<(ComponentAssembly, Option<UserGoal>), Failure> {
    parse_assembly_unchecked(&read(path)?).map_err(|e| Failure::Environment(format!("{}: {e}", path.display())))
}

fn load_catalog(path: &Path) -> Result<GridCatalog, Failure> {
    parse_catalog(&read(path)?).map_err(|e| Failure::Environment(format!("{}: {e}", path.display())))
}

fn load_goal(path: Option<&Path>, embedded: Option<UserGoal>) -> Result<UserGoal, Failure> {
    match path {
        Some(path) => parse_goal(&read(path)?).map_err(|e| Failure::Environment(format!("{}: {e}", path.display()))),
        None => Ok(embedded.unwrap_or_default()),
    }
}

fn print_report(out: &mut dyn Write, report: &ValidationReport) {
    for finding in report.findings() {
        let _ = writeln!(out, "{finding}");
    }
}

fn problem(assembly: ComponentAssembly, catalog: GridCatalog, goal: UserGoal) -> Result<PlanningProblem, Failure> {
    PlanningProblem::new(assembly, catalog, goal).map_err(|e| match e {
        ProblemError::InvalidAssembly(report) | ProblemError::InvalidGoal(report) => {
            Failure::Domain(format!("invalid input:\n{report}"))
        }
    })
}

fn validate(app: &Path, resources: &Path, out: &mut dyn Write) -> Outcome {
    let (assembly, goal) = load_assembly(app)?;
    let catalog = load_catalog(resources)?;
    let mut report = validate_assembly(&assembly);
    if let Some(goal) = &goal {
        report = report.merge(validate_goal(goal, &assembly, &catalog));
    }
    let report = report.merge(hierarchy_findings(&catalog));
    print_report(out, &report);
    if report.has_errors() {
        let errors = report.findings().iter().filter(|f| f.severity == Severity::Error).count();
        return Err(Failure::Domain(format!("{errors} error(s) found")));
    }
    Ok(())
}

fn plan(
    app: &Path,
    resources: &Path,
    planner: PlannerKind,
    goal_file: Option<&Path>,
    target: &Path,
    out: &mut dyn Write,
) -> Outcome {
    let (assembly, embedded) = load_assembly(app)?;
    let catalog = load_catalog(resources)?;
    let goal = load_goal(goal_file, embedded)?;
    let problem = problem(assembly, catalog, goal)?;
    let plan = plan_with(planner, &problem).map_err(|e| Failure::Domain(e.to_string()))?;
    let cost = plan_cost(&problem, &plan).map_err(|e| Failure::Domain(e.to_string()))?;
    write(target, &serialize_plan(&plan))?;
    let _ = writeln!(
        out,
        "planner={planner} servers={} cost={} feasible={}",
        plan.servers.len(),
        format_quantity(cost.objective_value),
        cost.feasible
    );
    Ok(())
}

fn paths(resources: &Path, from: &str, to: &str, out: &mut dyn Write) -> Outcome {
    let catalog = load_catalog(resources)?;
    let metrics = path_metrics(&catalog, from, to).map_err(|e| Failure::Environment(e.to_string()))?;
    let _ = writeln!(out, "{metrics}");
    Ok(())
}

fn status_line(h: &ExecutionHandle) -> String {
    format!(
        "server={} state={} job={} ref={}",
        h.server_id,
        h.state,
        h.middleware_handle.as_deref().unwrap_or("-"),
        h.component_ref.as_deref().unwrap_or("-")
    )
}

fn print_status(out: &mut dyn Write, session: &ExecutionSession) {
    for h in session.handles() {
        let _ = writeln!(out, "{}", status_line(h));
    }
}

fn deploy_cmd(
    plan_path: &Path,
    app: &Path,
    resources: &Path,
    session_path: &Path,
    goal_file: Option<&Path>,
    inject: &[String],
    out: &mut dyn Write,
) -> Outcome {
    let plan = deserialize_plan(&read(plan_path)?)
        .map_err(|e| Failure::Environment(format!("{}: {e}", plan_path.display())))?;
    let (assembly, embedded) = load_assembly(app)?;
    let catalog = load_catalog(resources)?;
    let goal = load_goal(goal_file, embedded)?;
    let problem = problem(assembly, catalog, goal)?;
    let mut grid = SimulatedGrid::new(problem.catalog());
    for node in inject {
        grid.inject_failure(node.clone());
    }
    match deploy(grid, &plan, &problem) {
        Ok(session) => {
            write(session_path, &session.snapshot())?;
            print_status(out, &session);
            Ok(())
        }
        Err(DeployError::Submission { session, server, source }) => {
            write(session_path, &session.snapshot())?;
            print_status(out, &session);
            Err(Failure::Domain(format!("deployment stopped at server `{server}`: {source}")))
        }
        Err(e) => Err(Failure::Domain(e.to_string())),
    }
}

fn load_session(path: &Path) -> Result<ExecutionSession, Failure> {
    ExecutionSession::from_snapshot(&read(path)?).map_err(|e| Failure::Environment(format!("{}: {e}", path.display())))
}

fn status(session_path: &Path, out: &mut dyn Write) -> Outcome {
    print_status(out, &load_session(session_path)?);
    Ok(())
}

fn control(session_path: &Path, server: &str, action: LifecycleAction, out: &mut dyn Write) -> Outcome {
    let mut session = load_session(session_path)?;
    match session.lifecycle(server, action) {
        Ok(handle) => {
            let line = status_line(handle);
            write(session_path, &session.snapshot())?;
            let _ = writeln!(out, "{line}");
            Ok(())
        }
        Err(e @ LifecycleError::RestartFailed { .. }) => {
            write(session_path, &session.snapshot())?;
            if let Some(h) = session.handle(server) {
                let _ = writeln!(out, "{}", status_line(h));
            }
            Err(Failure::Domain(e.to_string()))
        }
        Err(e) => Err(Failure::Domain(e.to_string())),
    }
}
