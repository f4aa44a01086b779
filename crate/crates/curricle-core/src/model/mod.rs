//! A small multi-head transformer encoder classifier with a CLS-position
//! softmax head and per-head attention capture.

mod config;
mod error;
mod graph;
mod params;
mod run;
mod snapshot;

pub use config::ModelConfig;
pub use error::ModelError;
pub use graph::{build_classifier_logits, build_classifier_loss, LN_EPS};
pub use params::{init_model, ModelParams};
pub use run::{evaluate, forward, mean_loss, train_epochs, EvalResult, ForwardOutput, TrainOutcome};
pub use snapshot::{decode_snapshot, decode_snapshot_expecting, encode_snapshot, SNAPSHOT_MAGIC};
