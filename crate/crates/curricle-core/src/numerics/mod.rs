//! Minimal dense-tensor arithmetic with reverse-mode differentiation and
//! an adaptive-moment optimizer.
//!
//! Double precision throughout, and every reduction accumulates in fixed
//! sequential index order, so identical inputs give bitwise-identical
//! outputs across runs.

mod check;
mod error;
mod optim;
mod tape;
mod tensor;

pub use check::grad_check;
pub use error::NumericsError;
pub use optim::{adam_step, AdamHyper, OptimizerState};
pub use tape::{GradientTape, Gradients, ValueId};
pub use tensor::Tensor;

/// Stable softmax of a vector, as a plain value (no tape involved).
pub fn softmax_probs(logits: &Tensor) -> Result<Tensor, NumericsError> {
    if logits.shape().len() != 1 {
        return Err(NumericsError::NotTwoD {
            op: "softmax_probs",
            shape: alloc::vec::Vec::from(logits.shape()),
        });
    }
    let data = tape::softmax_data(logits.data(), logits.shape(), 0);
    Ok(Tensor::from_parts(alloc::vec::Vec::from(logits.shape()), data))
}
