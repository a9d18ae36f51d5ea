//! Per-statement and per-case fault records.
//!
//! Nothing in the evaluation pipeline aborts a story: problems are recorded
//! as faults, the offending statement or case is skipped, and counts surface
//! in the run reports.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    /// Line did not match any accepted statement form.
    UnparsedLine,
    /// Statement form not legal under the active prompt style.
    IllegalForm,
    UnknownEntity,
    UnknownAttribute,
    KindMismatch,
    UnknownFunction,
    ArityMismatch,
    /// A story() call names a function with no definition block.
    MissingDef,
    /// An undeclared entity was referenced and declared on the fly.
    AutoDeclared,
    /// A print argument could not be resolved to a value.
    PrintFailed,
    EmptyCompletion,
    CacheMiss,
    Transport,
    ScorerFailure,
    Unanswerable,
    AllSamplesUnparseable,
}

impl FaultKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FaultKind::UnparsedLine => "unparsed_line",
            FaultKind::IllegalForm => "illegal_form",
            FaultKind::UnknownEntity => "unknown_entity",
            FaultKind::UnknownAttribute => "unknown_attribute",
            FaultKind::KindMismatch => "kind_mismatch",
            FaultKind::UnknownFunction => "unknown_function",
            FaultKind::ArityMismatch => "arity_mismatch",
            FaultKind::MissingDef => "missing_def",
            FaultKind::AutoDeclared => "auto_declared",
            FaultKind::PrintFailed => "print_failed",
            FaultKind::EmptyCompletion => "empty_completion",
            FaultKind::CacheMiss => "cache_miss",
            FaultKind::Transport => "transport",
            FaultKind::ScorerFailure => "scorer_failure",
            FaultKind::Unanswerable => "unanswerable",
            FaultKind::AllSamplesUnparseable => "all_samples_unparseable",
        }
    }
}

impl std::fmt::Display for FaultKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub kind: FaultKind,
    /// 1-based source line in the program text, when the fault is tied to one.
    pub line: Option<u32>,
    pub detail: String,
}

impl Fault {
    pub fn new(kind: FaultKind, line: Option<u32>, detail: impl Into<String>) -> Self {
        Fault {
            kind,
            line,
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for Fault {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "{} (line {}): {}", self.kind, line, self.detail),
            None => write!(f, "{}: {}", self.kind, self.detail),
        }
    }
}
