//! The two analysis artifacts: the per-phase catastrophic-forgetting
//! matrix and the attention Movement Index heatmaps, rendered as
//! bit-exact portable pixmap/graymap bytes.

mod csv;
mod error;
mod forgetting;
mod movement;
mod render;

pub use csv::{forgetting_csv, matrix_csv};
pub use error::AnalysisError;
pub use forgetting::{
    count_forgetting_events, forgetting_matrix, forgetting_matrix_from_bits, ForgettingMatrix,
};
pub use movement::{averaged_movement, movement_all_heads, movement_index};
pub use render::{render_binary, render_diverging, HeatmapImage, RenderMode};
