use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::error::ModelError;
use super::graph::{build_classifier_logits, validate_input};
use super::params::ModelParams;
use crate::data::LabeledDataset;
use crate::numerics::{adam_step, softmax_probs, GradientTape, OptimizerState, Tensor, ValueId};

/// Result of one forward pass.
///
/// `probabilities` always sum to 1 within 1e-9. When captured, each
/// attention map is row-stochastic over unmasked key positions and
/// exactly 0 in masked key columns; maps are layer-major
/// (`layer * num_heads + head`).
#[derive(Clone, Debug)]
pub struct ForwardOutput {
    pub logits: Tensor,
    pub probabilities: Tensor,
    pub attentions: Option<Vec<Tensor>>,
}

pub struct TrainOutcome {
    pub params: ModelParams,
    /// Mean per-sample loss of each epoch, in epoch order.
    pub epoch_losses: Vec<f64>,
    /// Sample ids in exact consumption order across all epochs.
    pub consumed: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub accuracy: f64,
    /// `correct[i]` is true iff the argmax probability of sample `i`
    /// (ties broken toward the lowest class index) equals its label.
    pub correct: Vec<bool>,
}

/// Runs the classifier on one tokenized sequence.
pub fn forward(
    params: &ModelParams,
    token_ids: &[u32],
    mask: &[bool],
    capture_attention: bool,
) -> Result<ForwardOutput, ModelError> {
    let mut tape = GradientTape::new();
    let ids: Vec<ValueId> = params.tensors().iter().map(|t| tape.constant_ref(t)).collect();
    let (logits_id, attentions) = build_classifier_logits(
        &mut tape,
        &ids,
        params.config(),
        token_ids,
        mask,
        capture_attention,
    )?;
    let logits_row = tape.value(logits_id)?;
    let logits = Tensor::new(
        alloc::vec![params.config().num_classes],
        logits_row.data().to_vec(),
    )?;
    let probabilities = softmax_probs(&logits)?;
    Ok(ForwardOutput {
        logits,
        probabilities,
        attentions,
    })
}

fn check_dataset(params: &ModelParams, data: &LabeledDataset) -> Result<(), ModelError> {
    if data.samples.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let config = params.config();
    for s in &data.samples {
        validate_input(config, &s.token_ids, &s.mask)?;
        if s.label as usize >= config.num_classes {
            return Err(ModelError::LabelOutOfRange {
                label: s.label,
                classes: config.num_classes,
            });
        }
    }
    Ok(())
}

/// Trains for `epochs` passes over `data` with per-batch adaptive-moment
/// steps. Sample order is reshuffled every epoch from one RNG seeded with
/// `shuffle_seed`, so the whole run is a pure function of its inputs.
pub fn train_epochs(
    params: ModelParams,
    data: &LabeledDataset,
    epochs: usize,
    opt: &mut OptimizerState,
    batch_size: usize,
    shuffle_seed: u64,
) -> Result<TrainOutcome, ModelError> {
    if batch_size == 0 {
        return Err(ModelError::InvalidBatch);
    }
    check_dataset(&params, data)?;

    let mut params = params;
    let n = data.samples.len();
    let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
    let mut epoch_losses = Vec::with_capacity(epochs);
    let mut consumed = Vec::with_capacity(epochs * n);

    for _ in 0..epochs {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);

        let mut loss_sum = 0.0;
        for chunk in order.chunks(batch_size) {
            let grads = {
                let config = params.config().clone();
                let mut tape = GradientTape::new();
                let ids: Vec<ValueId> =
                    params.tensors().iter().map(|t| tape.parameter(t)).collect();
                let mut sample_losses = Vec::with_capacity(chunk.len());
                for &si in chunk {
                    let s = &data.samples[si];
                    let (logits, _) = build_classifier_logits(
                        &mut tape,
                        &ids,
                        &config,
                        &s.token_ids,
                        &s.mask,
                        false,
                    )?;
                    sample_losses.push(tape.cross_entropy(logits, s.label as usize)?);
                }
                let total = tape.sum_nodes(&sample_losses)?;
                let mean = tape.mul_scalar(total, 1.0 / chunk.len() as f64)?;
                loss_sum += tape.scalar_value(mean)? * chunk.len() as f64;
                tape.backward(mean)?
            };
            adam_step(params.tensors_mut(), grads.all(), opt)?;
            consumed.extend(chunk.iter().map(|&si| data.samples[si].id));
        }
        epoch_losses.push(loss_sum / n as f64);
    }

    Ok(TrainOutcome {
        params,
        epoch_losses,
        consumed,
    })
}

/// Mean cross-entropy over a dataset under fixed parameters.
pub fn mean_loss(params: &ModelParams, data: &LabeledDataset) -> Result<f64, ModelError> {
    check_dataset(params, data)?;
    let mut sum = 0.0;
    for s in &data.samples {
        let out = forward(params, &s.token_ids, &s.mask, false)?;
        let mut tape = GradientTape::new();
        let logits = tape.constant(out.logits);
        sum += {
            let l = tape.cross_entropy(logits, s.label as usize)?;
            tape.scalar_value(l)?
        };
    }
    Ok(sum / data.samples.len() as f64)
}

/// Accuracy and the per-sample correctness bit-vector, in dataset order.
pub fn evaluate(params: &ModelParams, data: &LabeledDataset) -> Result<EvalResult, ModelError> {
    check_dataset(params, data)?;
    let mut correct = Vec::with_capacity(data.samples.len());
    for s in &data.samples {
        let out = forward(params, &s.token_ids, &s.mask, false)?;
        let predicted = argmax_lowest_tie(out.probabilities.data());
        correct.push(predicted == s.label as usize);
    }
    let hits = correct.iter().filter(|&&c| c).count();
    Ok(EvalResult {
        accuracy: hits as f64 / correct.len() as f64,
        correct,
    })
}

/// Index of the maximum, breaking ties toward the lowest index.
pub(crate) fn argmax_lowest_tie(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
