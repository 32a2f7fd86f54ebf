use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{CollocationGroup, ComponentAssembly, ComponentDecl, Connection, UserGoal};
use super::validate::validate_structure;
use crate::report::{Finding, FindingCode};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, PartialEq)]
pub enum DescriptorError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported formatVersion {0} (expected {FORMAT_VERSION})")]
    UnsupportedVersion(u32),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("dangling reference in `{subject}`: {message}")]
    DanglingReference { subject: String, message: String },
    #[error("constraint violation ({code}) in `{subject}`: {message}")]
    ConstraintViolation {
        code: FindingCode,
        subject: String,
        message: String,
    },
}

impl DescriptorError {
    pub(crate) fn from_json(err: serde_json::Error) -> Self {
        DescriptorError::Syntax {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }

    fn from_finding(finding: Finding) -> Self {
        match finding.code {
            FindingCode::DuplicateId => DescriptorError::DuplicateId(finding.subject),
            FindingCode::DanglingReference => DescriptorError::DanglingReference {
                subject: finding.subject,
                message: finding.message,
            },
            code => DescriptorError::ConstraintViolation {
                code,
                subject: finding.subject,
                message: finding.message,
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct AssemblyDocument {
    format_version: u32,
    name: String,
    components: Vec<ComponentDecl>,
    #[serde(default)]
    connections: Vec<Connection>,
    #[serde(default)]
    collocations: Vec<CollocationGroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    goal: Option<UserGoal>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct GoalDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    format_version: Option<u32>,
    #[serde(default)]
    objective: super::model::Objective,
    #[serde(default)]
    pins: std::collections::BTreeMap<String, String>,
}

/// Parses an assembly document without checking the assembly invariants.
/// Returns the embedded goal, if the document carries one.
pub fn parse_assembly_unchecked(
    bytes: &[u8],
) -> Result<(ComponentAssembly, Option<UserGoal>), DescriptorError> {
    let doc: AssemblyDocument = serde_json::from_slice(bytes).map_err(DescriptorError::from_json)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(DescriptorError::UnsupportedVersion(doc.format_version));
    }
    let assembly = ComponentAssembly {
        name: doc.name,
        components: doc.components,
        connections: doc.connections,
        collocations: doc.collocations,
    };
    Ok((assembly, doc.goal))
}

/// Parses an assembly document and enforces the structural invariants.
///
/// Collocation contradictions are left to
/// [`normalize_collocation`](super::normalize_collocation).
pub fn parse_assembly_document(
    bytes: &[u8],
) -> Result<(ComponentAssembly, Option<UserGoal>), DescriptorError> {
    let (assembly, goal) = parse_assembly_unchecked(bytes)?;
    if let Some(first) = validate_structure(&assembly).into_iter().next() {
        return Err(DescriptorError::from_finding(first));
    }
    Ok((assembly, goal))
}

pub fn parse_assembly(bytes: &[u8]) -> Result<ComponentAssembly, DescriptorError> {
    parse_assembly_document(bytes).map(|(assembly, _)| assembly)
}

fn to_document(assembly: &ComponentAssembly, goal: Option<&UserGoal>) -> AssemblyDocument {
    AssemblyDocument {
        format_version: FORMAT_VERSION,
        name: assembly.name.clone(),
        components: assembly.components.clone(),
        connections: assembly.connections.clone(),
        collocations: assembly.collocations.clone(),
        goal: goal.cloned(),
    }
}

/// Pretty-printed document, declaration order preserved.
pub fn serialize_assembly(assembly: &ComponentAssembly, goal: Option<&UserGoal>) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&to_document(assembly, goal))
        .expect("assembly documents always serialize");
    out.push(b'\n');
    out
}

/// Compact form used for content digests. Never includes the goal.
pub fn canonical_assembly(assembly: &ComponentAssembly) -> Vec<u8> {
    serde_json::to_vec(&to_document(assembly, None)).expect("assembly documents always serialize")
}

/// A standalone goal file: the same object as the assembly's `goal` key,
/// optionally carrying `formatVersion`.
pub fn parse_goal(bytes: &[u8]) -> Result<UserGoal, DescriptorError> {
    let doc: GoalDocument = serde_json::from_slice(bytes).map_err(DescriptorError::from_json)?;
    match doc.format_version {
        Some(v) if v != FORMAT_VERSION => Err(DescriptorError::UnsupportedVersion(v)),
        _ => Ok(UserGoal {
            objective: doc.objective,
            pins: doc.pins,
        }),
    }
}

pub fn canonical_goal(goal: &UserGoal) -> Vec<u8> {
    serde_json::to_vec(goal).expect("goals always serialize")
}
