//! Findings produced by the validators and the plan checker.
//!
//! Findings are data, not failures: a validator always returns a report and
//! the caller decides what an error-severity finding means for it.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        }
    }
}

/// Stable machine-readable finding codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FindingCode {
    // assembly
    DuplicateId,
    DuplicatePort,
    EmptyId,
    NoImplementation,
    NegativeMemory,
    InvalidBound,
    DanglingReference,
    IntraComponentRequirement,
    CollocationTooSmall,
    ProcessGroupOverlap,
    CollocationContradiction,
    // goal
    UnknownPinComponent,
    UnknownPinSite,
    // catalog
    NonHierarchicalLink,
    // plan
    DigestMismatch,
    ComponentUnmapped,
    ComponentDuplicated,
    UnknownComponent,
    UnknownNode,
    ServerMismatch,
    ProcessCollocationViolated,
    HostCollocationViolated,
    InvalidImplementation,
    PlatformMismatch,
    CapacityExceeded,
    PinViolated,
    ConnectionMissing,
    ConnectionMismatch,
    StaleConnectionMetrics,
    ConnectionRequirementViolated,
    DataFlowInvalid,
    LaunchOrderInvalid,
    CycleWarning,
}

impl FindingCode {
    pub fn as_str(self) -> &'static str {
        use FindingCode::*;
        match self {
            DuplicateId => "DUPLICATE_ID",
            DuplicatePort => "DUPLICATE_PORT",
            EmptyId => "EMPTY_ID",
            NoImplementation => "NO_IMPLEMENTATION",
            NegativeMemory => "NEGATIVE_MEMORY",
            InvalidBound => "INVALID_BOUND",
            DanglingReference => "DANGLING_REFERENCE",
            IntraComponentRequirement => "INTRA_COMPONENT_REQUIREMENT",
            CollocationTooSmall => "COLLOCATION_TOO_SMALL",
            ProcessGroupOverlap => "PROCESS_GROUP_OVERLAP",
            CollocationContradiction => "COLLOCATION_CONTRADICTION",
            UnknownPinComponent => "UNKNOWN_PIN_COMPONENT",
            UnknownPinSite => "UNKNOWN_PIN_SITE",
            NonHierarchicalLink => "NON_HIERARCHICAL_LINK",
            DigestMismatch => "DIGEST_MISMATCH",
            ComponentUnmapped => "COMPONENT_UNMAPPED",
            ComponentDuplicated => "COMPONENT_DUPLICATED",
            UnknownComponent => "UNKNOWN_COMPONENT",
            UnknownNode => "UNKNOWN_NODE",
            ServerMismatch => "SERVER_MISMATCH",
            ProcessCollocationViolated => "PROCESS_COLLOCATION_VIOLATED",
            HostCollocationViolated => "HOST_COLLOCATION_VIOLATED",
            InvalidImplementation => "INVALID_IMPLEMENTATION",
            PlatformMismatch => "PLATFORM_MISMATCH",
            CapacityExceeded => "CAPACITY_EXCEEDED",
            PinViolated => "PIN_VIOLATED",
            ConnectionMissing => "CONNECTION_MISSING",
            ConnectionMismatch => "CONNECTION_MISMATCH",
            StaleConnectionMetrics => "STALE_CONNECTION_METRICS",
            ConnectionRequirementViolated => "CONNECTION_REQUIREMENT_VIOLATED",
            DataFlowInvalid => "DATA_FLOW_INVALID",
            LaunchOrderInvalid => "LAUNCH_ORDER_INVALID",
            CycleWarning => "CYCLE_WARNING",
        }
    }
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Finding {
    pub subject: String,
    pub code: FindingCode,
    pub severity: Severity,
    pub message: String,
}

impl Finding {
    pub fn error(code: FindingCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            subject: subject.into(),
            code,
            severity: Severity::Error,
            message: message.into(),
        }
    }

    pub fn warning(code: FindingCode, subject: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Warning,
            ..Finding::error(code, subject, message)
        }
    }
}

/// `SEVERITY CODE subject: message`
impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {}: {}",
            self.severity.as_str(),
            self.code,
            self.subject,
            self.message
        )
    }
}

/// An ordered list of findings. Ordering is by subject, then code, then
/// message, so two runs over the same input always print the same report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn new(mut findings: Vec<Finding>) -> Self {
        findings.sort();
        findings.dedup();
        ValidationReport { findings }
    }

    pub fn findings(&self) -> &[Finding] {
        &self.findings
    }

    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.findings.len()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn codes(&self) -> Vec<FindingCode> {
        self.findings.iter().map(|f| f.code).collect()
    }

    pub fn contains(&self, code: FindingCode) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn merge(self, other: ValidationReport) -> ValidationReport {
        let mut all = self.findings;
        all.extend(other.findings);
        ValidationReport::new(all)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        Ok(())
    }
}

impl IntoIterator for ValidationReport {
    type Item = Finding;
    type IntoIter = std::vec::IntoIter<Finding>;

    fn into_iter(self) -> Self::IntoIter {
        self.findings.into_iter()
    }
}
