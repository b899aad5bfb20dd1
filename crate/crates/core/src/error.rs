use std::fmt;

use thiserror::Error;

use crate::multiset::Symbol;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Position-carrying error from the chemistry DSL parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    UndeclaredSymbol(Symbol),
    DuplicateReaction(String),
    EmptyReactionInput(String),
    OverlappingEquivalence(Symbol),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            ParseErrorKind::UndeclaredSymbol(s) => write!(f, "undeclared symbol `{s}`"),
            ParseErrorKind::DuplicateReaction(r) => write!(f, "duplicate reaction name `{r}`"),
            ParseErrorKind::EmptyReactionInput(r) => write!(f, "reaction `{r}` has an empty input"),
            ParseErrorKind::OverlappingEquivalence(s) => {
                write!(f, "symbol `{s}` appears in more than one equivalence class")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Errors reading a serialized trace.
#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: malformed record: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Invariant { line: usize, msg: String },
    #[error("empty trace")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("unknown reaction `{0}`")]
    UnknownReaction(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(Symbol),
    #[error("reaction `{reaction}` is not feasible in the given state")]
    Infeasible { reaction: String },
    #[error("state index {index} out of range for a trace of {len} states")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("reaction sequence anchors must be strictly increasing")]
    NonIncreasingAnchors,
    #[error("path enumeration exceeded its budget of {limit} paths")]
    PathBudgetExceeded { limit: usize },
    #[error("enumeration of {count} candidates exceeds the budget of {limit}")]
    CombinatorialBudgetExceeded { count: u128, limit: usize },
    #[error("cycle witness does not match the trace: {0}")]
    WitnessMismatch(String),
    #[error("malformed entity: {0}")]
    MalformedEntity(String),
    #[error("trace is inconsistent with the chemistry: {0}")]
    InconsistentTrace(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Budget exhaustion means "inconclusive", not "no".
    pub fn is_budget_exceeded(&self) -> bool {
        matches!(
            self,
            Error::PathBudgetExceeded { .. } | Error::CombinatorialBudgetExceeded { .. }
        )
    }
}
