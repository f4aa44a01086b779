//! Difficulty scoring, phase partitioning, and the four training regimes
//! (Baby Steps, One Pass, Individual, no curriculum).

mod error;
mod plan;
mod replicate;
mod runner;
mod score;

pub use error::CurriculumError;
pub use plan::{partition_phases, plan_csv, CurriculumPlan};
pub use replicate::{aggregate_runs, run_replicated, run_single_seed, ExperimentSpec, ReplicateOutcome, SeedRun};
pub use runner::{run_curriculum, Mode, PhaseResult, RunSeeds, TrainSettings};
pub use score::{mse_score, score_auxiliary, score_sentence_length, DifficultyScore, Strategy};

/// Stream tag for per-phase shuffle seeds (see [`crate::seed::derive_seed`]).
pub const STREAM_SHUFFLE: u64 = 1;
/// Stream tag for the auxiliary scorer's own training run.
pub const STREAM_AUX: u64 = 2;
