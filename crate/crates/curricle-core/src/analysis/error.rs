use alloc::string::String;
use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("phase results disagree on the test set: {reason}")]
    InconsistentResults { reason: String },
    #[error("no phase results supplied")]
    NoPhases,
    #[error("layer {layer} or head {head} out of range for {layers} layers x {heads} heads")]
    HeadOutOfRange {
        layer: usize,
        head: usize,
        layers: usize,
        heads: usize,
    },
    #[error("snapshots disagree on the model config: {reason}")]
    SnapshotMismatch { reason: String },
    #[error("matrices must share one shape: {left:?} vs {right:?}")]
    MatrixShapeMismatch {
        left: alloc::vec::Vec<usize>,
        right: alloc::vec::Vec<usize>,
    },
    #[error("expected a non-empty 2-d matrix")]
    NotAMatrix,
    #[error("bit matrix rows must all have the same width")]
    RaggedRows,
    #[error(transparent)]
    Model(#[from] ModelError),
}
