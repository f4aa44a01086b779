use alloc::vec::Vec;
use thiserror::Error;

/// Errors from tensor construction, tape operations, and the optimizer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("{op}: dimension mismatch between shapes {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: Vec<usize>,
        right: Vec<usize>,
    },
    #[error("{op}: expected a 2-d tensor, got shape {shape:?}")]
    NotTwoD { op: &'static str, shape: Vec<usize> },
    #[error("tensor shape {shape:?} holds {expected} elements, got {got}")]
    DataLength {
        shape: Vec<usize>,
        expected: usize,
        got: usize,
    },
    #[error("tensor shape dimensions must be positive, got {shape:?}")]
    ZeroDim { shape: Vec<usize> },
    #[error("{op}: produced or received a non-finite value")]
    NonFinite { op: &'static str },
    #[error("{op}: axis {axis} out of range for shape {shape:?}")]
    AxisOutOfRange {
        op: &'static str,
        axis: usize,
        shape: Vec<usize>,
    },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("{op}: range {start}..{end} out of bounds for dimension of size {size}")]
    RangeOutOfBounds {
        op: &'static str,
        start: usize,
        end: usize,
        size: usize,
    },
    #[error("{op}: row index {index} out of range for {rows} rows")]
    RowOutOfRange {
        op: &'static str,
        index: usize,
        rows: usize,
    },
    #[error("{op}: mask length {mask} does not match dimension {dim}")]
    MaskLength {
        op: &'static str,
        mask: usize,
        dim: usize,
    },
    #[error("{op}: mask must keep at least one position")]
    EmptyMask { op: &'static str },
    #[error("{op}: needs at least one operand")]
    NoOperands { op: &'static str },
    #[error("value was not produced through this tape")]
    NotOnTape,
    #[error("backward requires a scalar loss, got shape {shape:?}")]
    LossNotScalar { shape: Vec<usize> },
    #[error("optimizer state tracks {state} parameters, update got {got}")]
    ParamCountMismatch { state: usize, got: usize },
}
