use alloc::string::String;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("input contains no samples")]
    Empty,
    #[error("label collapsing requires a 5-class dataset, got {got} classes")]
    NotFiveClass { got: u32 },
    #[error("collapse target must be 2, 3, 4 or 5, got {got}")]
    BadCollapseTarget { got: u32 },
    #[error("invalid synthetic spec: {reason}")]
    BadSynthSpec { reason: String },
    #[error("invalid vocabulary file: {reason}")]
    BadVocab { reason: String },
}
