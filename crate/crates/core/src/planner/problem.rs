use std::collections::BTreeMap;

use thiserror::Error;

use crate::descriptors::{
    normalize_collocation, validate_assembly, CollocationPartition, ComponentAssembly, UserGoal,
};
use crate::plan::problem_digest;
use crate::report::{Finding, FindingCode, ValidationReport};
use crate::resources::GridCatalog;

#[derive(Debug, Error, PartialEq)]
pub enum ProblemError {
    #[error("invalid assembly:\n{0}")]
    InvalidAssembly(ValidationReport),
    #[error("invalid goal:\n{0}")]
    InvalidGoal(ValidationReport),
}

/// A set of components that must share one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostGroup {
    pub id: String,
    /// Component positions in the assembly, sorted by component id.
    pub members: Vec<usize>,
}

/// A connection between two components in different host groups, or in the
/// same one, seen from the planner's side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Link {
    pub connection: usize,
    pub source_group: usize,
    pub target_group: usize,
}

/// Everything a planner needs: the validated assembly, its collocation
/// partition, the catalog, and the user goal.
#[derive(Debug, Clone)]
pub struct PlanningProblem {
    assembly: ComponentAssembly,
    partition: CollocationPartition,
    catalog: GridCatalog,
    goal: UserGoal,
    digest: String,
    host_groups: Vec<HostGroup>,
    links: Vec<Link>,
}

impl PlanningProblem {
    pub fn new(
        assembly: ComponentAssembly,
        catalog: GridCatalog,
        goal: UserGoal,
    ) -> Result<Self, ProblemError> {
        let report = validate_assembly(&assembly);
        if report.has_errors() {
            return Err(ProblemError::InvalidAssembly(report));
        }
        let goal_report = validate_goal(&goal, &assembly, &catalog);
        if goal_report.has_errors() {
            return Err(ProblemError::InvalidGoal(goal_report));
        }
        let partition = normalize_collocation(&assembly)
            .expect("validated assemblies have a consistent collocation partition");

        let position: BTreeMap<&str, usize> = assembly
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.as_str(), i))
            .collect();
        let host_groups: Vec<HostGroup> = partition
            .host_groups()
            .into_iter()
            .map(|(id, members)| HostGroup {
                id,
                members: members.iter().map(|m| position[m.as_str()]).collect(),
            })
            .collect();
        let mut group_of_component = vec![0; assembly.components.len()];
        for (gi, group) in host_groups.iter().enumerate() {
            for &m in &group.members {
                group_of_component[m] = gi;
            }
        }
        let links = assembly
            .connections
            .iter()
            .enumerate()
            .map(|(ci, c)| Link {
                connection: ci,
                source_group: group_of_component[position[c.source.component.as_str()]],
                target_group: group_of_component[position[c.target.component.as_str()]],
            })
            .collect();

        let digest = problem_digest(&assembly, &catalog, &goal);
        Ok(PlanningProblem {
            assembly,
            partition,
            catalog,
            goal,
            digest,
            host_groups,
            links,
        })
    }

    pub fn assembly(&self) -> &ComponentAssembly {
        &self.assembly
    }

    pub fn partition(&self) -> &CollocationPartition {
        &self.partition
    }

    pub fn catalog(&self) -> &GridCatalog {
        &self.catalog
    }

    pub fn goal(&self) -> &UserGoal {
        &self.goal
    }

    /// Content digest of the inputs; plans carry it as `problemDigest`.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    /// Host groups sorted by id.
    pub fn host_groups(&self) -> &[HostGroup] {
        &self.host_groups
    }

    pub fn host_group_index(&self, id: &str) -> Option<usize> {
        self.host_groups.binary_search_by(|g| g.id.as_str().cmp(id)).ok()
    }

    pub(crate) fn links(&self) -> &[Link] {
        &self.links
    }

    /// Same problem with another goal. Pins are re-checked.
    pub fn with_goal(&self, goal: UserGoal) -> Result<Self, ProblemError> {
        PlanningProblem::new(self.assembly.clone(), self.catalog.clone(), goal)
    }
}

/// Pins must name declared components and catalog groups.
pub fn validate_goal(goal: &UserGoal, assembly: &ComponentAssembly, catalog: &GridCatalog) -> ValidationReport {
    let mut findings = Vec::new();
    for (component, site) in &goal.pins {
        if assembly.component(component).is_none() {
            findings.push(Finding::error(
                FindingCode::UnknownPinComponent,
                component.clone(),
                format!("goal pins unknown component `{component}`"),
            ));
        }
        if !catalog.has_group(site) {
            findings.push(Finding::error(
                FindingCode::UnknownPinSite,
                component.clone(),
                format!("goal pins `{component}` to unknown site `{site}`"),
            ));
        }
    }
    ValidationReport::new(findings)
}
