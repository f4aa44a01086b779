use alloc::vec::Vec;

use super::error::NumericsError;
use super::tensor::Tensor;
use crate::math;

/// Adaptive-moment hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamHyper {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Per-parameter first/second moment accumulators plus the step counter.
/// Accumulator shapes always match the parameter shapes they track.
pub struct OptimizerState {
    hyper: AdamHyper,
    step: u64,
    first: Vec<Tensor>,
    second: Vec<Tensor>,
}

impl OptimizerState {
    pub fn new(hyper: AdamHyper, params: &[Tensor]) -> Self {
        let first = params.iter().map(|p| Tensor::zeros(p.shape().to_vec())).collect();
        let second = params.iter().map(|p| Tensor::zeros(p.shape().to_vec())).collect();
        Self {
            hyper,
            step: 0,
            first,
            second,
        }
    }

    pub fn hyper(&self) -> &AdamHyper {
        &self.hyper
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected adaptive-moment update, applied to every parameter
/// in slot order. Deterministic given inputs; a zero gradient leaves the
/// parameter unchanged (only the step counter and bias correction move).
pub fn adam_step(
    params: &mut [Tensor],
    grads: &[Tensor],
    state: &mut OptimizerState,
) -> Result<(), NumericsError> {
    if params.len() != state.first.len() {
        return Err(NumericsError::ParamCountMismatch {
            state: state.first.len(),
            got: params.len(),
        });
    }
    if grads.len() != params.len() {
        return Err(NumericsError::ParamCountMismatch {
            state: params.len(),
            got: grads.len(),
        });
    }
    for (p, g) in params.iter().zip(grads.iter()) {
        if p.shape() != g.shape() {
            return Err(NumericsError::ShapeMismatch {
                op: "adam_step",
                left: p.shape().to_vec(),
                right: g.shape().to_vec(),
            });
        }
    }

    state.step += 1;
    let t = state.step as f64;
    let h = state.hyper;
    let bc1 = 1.0 - math::pow(h.beta1, t);
    let bc2 = 1.0 - math::pow(h.beta2, t);

    for slot in 0..params.len() {
        let g = grads[slot].data();
        let m = state.first[slot].data_mut();
        let v = state.second[slot].data_mut();
        let p = params[slot].data_mut();
        for j in 0..g.len() {
            m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * g[j];
            v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * g[j] * g[j];
            let m_hat = m[j] / bc1;
            let v_hat = v[j] / bc2;
            p[j] -= h.learning_rate * m_hat / (math::sqrt(v_hat) + h.epsilon);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn zero_gradient_leaves_parameters_unchanged() {
        let mut params = vec![Tensor::new(vec![2, 2], vec![1.0, -2.0, 0.5, 3.0]).unwrap()];
        let before = params[0].clone();
        let grads = vec![Tensor::zeros(vec![2, 2])];
        let mut state = OptimizerState::new(AdamHyper::default(), &params);
        adam_step(&mut params, &grads, &mut state).unwrap();
        adam_step(&mut params, &grads, &mut state).unwrap();
        assert_eq!(params[0], before);
        assert_eq!(state.step(), 2);
    }

    #[test]
    fn first_step_moves_against_gradient_sign() {
        let mut params = vec![Tensor::new(vec![2], vec![1.0, 1.0]).unwrap()];
        let grads = vec![Tensor::new(vec![2], vec![0.4, -0.4]).unwrap()];
        let mut state = OptimizerState::new(AdamHyper::default(), &params);
        adam_step(&mut params, &grads, &mut state).unwrap();
        // bias correction makes the very first update approach the raw
        // learning rate in magnitude
        let lr = AdamHyper::default().learning_rate;
        assert!(params[0].data()[0] < 1.0);
        assert!(params[0].data()[1] > 1.0);
        assert!((params[0].data()[0] - (1.0 - lr)).abs() < lr * 0.1);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut params = vec![Tensor::zeros(vec![2])];
        let grads = vec![Tensor::zeros(vec![3])];
        let mut state = OptimizerState::new(AdamHyper::default(), &params);
        assert!(matches!(
            adam_step(&mut params, &grads, &mut state),
            Err(NumericsError::ShapeMismatch { .. })
        ));
        let fewer: Vec<Tensor> = vec![];
        assert!(matches!(
            adam_step(&mut params, &fewer, &mut state),
            Err(NumericsError::ParamCountMismatch { .. })
        ));
    }

    #[test]
    fn updates_are_deterministic() {
        let run = || {
            let mut params = vec![Tensor::new(vec![3], vec![0.3, -0.7, 1.1]).unwrap()];
            let grads = vec![Tensor::new(vec![3], vec![0.11, 0.22, -0.5]).unwrap()];
            let mut state = OptimizerState::new(AdamHyper::default(), &params);
            for _ in 0..5 {
                adam_step(&mut params, &grads, &mut state).unwrap();
            }
            params[0].data().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
