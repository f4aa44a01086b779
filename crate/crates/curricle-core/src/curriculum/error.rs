use alloc::string::String;
use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurriculumError {
    #[error("phase count k={k} must satisfy 1 <= k <= {n} samples")]
    BadPhaseCount { k: usize, n: usize },
    #[error("strategy {0:?} is not one of auxiliary|length")]
    UnknownStrategy(String),
    #[error("mode {0:?} is not one of baby_steps|one_pass|individual|none")]
    UnknownMode(String),
    #[error("samples must be tokenized before scoring")]
    NotTokenized,
    #[error("expected one score per train sample: {scores} scores for {samples} samples")]
    ScoreCountMismatch { scores: usize, samples: usize },
    #[error("plan does not cover the training set: {reason}")]
    PlanMismatch { reason: String },
    #[error("no seeds supplied")]
    NoSeeds,
    #[error(transparent)]
    Model(#[from] ModelError),
}
