use alloc::string::String;
use thiserror::Error;

use crate::numerics::NumericsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model config: {0}")]
    InvalidConfig(String),
    #[error("token id {id} out of range for vocabulary of {vocab} entries")]
    TokenOutOfRange { id: u32, vocab: usize },
    #[error("sequence of length {len} exceeds maximum length {max}")]
    SequenceTooLong { len: usize, max: usize },
    #[error("sequence must start with the CLS token")]
    MissingCls,
    #[error("sequence is empty; samples must be tokenized before use")]
    EmptySequence,
    #[error("mask length {mask} does not match sequence length {len}")]
    MaskLengthMismatch { mask: usize, len: usize },
    #[error("dataset contains no samples")]
    EmptyDataset,
    #[error("batch size must be positive")]
    InvalidBatch,
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: u32, classes: usize },
    #[error("corrupt snapshot: {reason}")]
    SnapshotCorrupt { reason: String },
    #[error("snapshot config mismatch: {reason}")]
    SnapshotConfigMismatch { reason: String },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
