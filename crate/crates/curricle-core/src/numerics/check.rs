use alloc::vec::Vec;

use super::error::NumericsError;
use super::tape::{GradientTape, ValueId};
use super::tensor::Tensor;
use crate::math;

/// Compares tape gradients of a scalar-valued function against central
/// differences with step `eps`, returning the largest guarded relative
/// error over all components:
/// `|analytic − numeric| / max(1, |analytic|, |numeric|)`.
pub fn grad_check<F, E>(f: F, point: &[Tensor], eps: f64) -> Result<f64, E>
where
    F: Fn(&mut GradientTape, &[ValueId]) -> Result<ValueId, E>,
    E: From<NumericsError>,
{
    let analytic = {
        let mut tape = GradientTape::new();
        let ids: Vec<ValueId> = point.iter().map(|t| tape.parameter(t)).collect();
        let loss = f(&mut tape, &ids)?;
        // force the scalar check before differentiating
        tape.scalar_value(loss)?;
        tape.backward(loss)?
    };

    let mut work: Vec<Tensor> = point.to_vec();
    let mut max_rel = 0.0_f64;
    for ti in 0..point.len() {
        for j in 0..point[ti].numel() {
            let orig = work[ti].data()[j];
            work[ti].data_mut()[j] = orig + eps;
            let up = eval_scalar(&f, &work)?;
            work[ti].data_mut()[j] = orig - eps;
            let down = eval_scalar(&f, &work)?;
            work[ti].data_mut()[j] = orig;

            let numeric = (up - down) / (2.0 * eps);
            let a = analytic.get(ti).data()[j];
            let denom = 1.0_f64.max(math::abs(a)).max(math::abs(numeric));
            max_rel = max_rel.max(math::abs(a - numeric) / denom);
        }
    }
    Ok(max_rel)
}

fn eval_scalar<F, E>(f: &F, point: &[Tensor]) -> Result<f64, E>
where
    F: Fn(&mut GradientTape, &[ValueId]) -> Result<ValueId, E>,
    E: From<NumericsError>,
{
    let mut tape = GradientTape::new();
    let ids: Vec<ValueId> = point.iter().map(|t| tape.parameter(t)).collect();
    let loss = f(&mut tape, &ids)?;
    Ok(tape.scalar_value(loss)?)
}
