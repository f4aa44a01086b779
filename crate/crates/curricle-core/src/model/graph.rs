use alloc::vec::Vec;

use super::config::ModelConfig;
use super::error::ModelError;
use super::params::param_layout;
use crate::data::CLS_ID;
use crate::math;
use crate::numerics::{GradientTape, Tensor, ValueId};

/// Layer-norm stabilizer.
pub const LN_EPS: f64 = 1e-5;

/// Checks one tokenized input against the model config.
pub(crate) fn validate_input(
    config: &ModelConfig,
    token_ids: &[u32],
    mask: &[bool],
) -> Result<(), ModelError> {
    if token_ids.is_empty() {
        return Err(ModelError::EmptySequence);
    }
    if token_ids.len() > config.max_len {
        return Err(ModelError::SequenceTooLong {
            len: token_ids.len(),
            max: config.max_len,
        });
    }
    if mask.len() != token_ids.len() {
        return Err(ModelError::MaskLengthMismatch {
            mask: mask.len(),
            len: token_ids.len(),
        });
    }
    if token_ids[0] != CLS_ID || !mask[0] {
        return Err(ModelError::MissingCls);
    }
    if let Some(&bad) = token_ids.iter().find(|&&id| id as usize >= config.vocab_size) {
        return Err(ModelError::TokenOutOfRange {
            id: bad,
            vocab: config.vocab_size,
        });
    }
    Ok(())
}

/// Records the classifier forward pass on `tape` and returns the CLS
/// logits node (shape `[1 × num_classes]`), plus the per-head attention
/// maps (layer-major: index `layer * num_heads + head`) when requested.
///
/// `param_ids` must hold the model tensors in canonical layout order.
pub fn build_classifier_logits(
    tape: &mut GradientTape<'_>,
    param_ids: &[ValueId],
    config: &ModelConfig,
    token_ids: &[u32],
    mask: &[bool],
    capture_attention: bool,
) -> Result<(ValueId, Option<Vec<Tensor>>), ModelError> {
    validate_input(config, token_ids, mask)?;
    let (specs, index) = param_layout(config);
    if param_ids.len() != specs.len() {
        return Err(ModelError::InvalidConfig(alloc::format!(
            "expected {} bound parameters, got {}",
            specs.len(),
            param_ids.len()
        )));
    }

    let seq_len = token_ids.len();
    let rows: Vec<usize> = token_ids.iter().map(|&t| t as usize).collect();
    let mut captures = if capture_attention {
        Some(Vec::with_capacity(config.num_layers * config.num_heads))
    } else {
        None
    };

    // embeddings: token rows plus the matching positional rows
    let tok = tape.gather_rows(param_ids[index.token_embed], &rows)?;
    let pos = tape.slice_rows(param_ids[index.pos_embed], 0, seq_len)?;
    let mut x = tape.add(tok, pos)?;

    let head_dim = config.head_dim();
    let scale = 1.0 / math::sqrt(head_dim as f64);

    for layer in &index.layers {
        // projections for all heads at once
        let q = {
            let m = tape.matmul(x, param_ids[layer.wq])?;
            tape.add_row_broadcast(m, param_ids[layer.bq])?
        };
        let k = {
            let m = tape.matmul(x, param_ids[layer.wk])?;
            tape.add_row_broadcast(m, param_ids[layer.bk])?
        };
        let v = {
            let m = tape.matmul(x, param_ids[layer.wv])?;
            tape.add_row_broadcast(m, param_ids[layer.bv])?
        };

        let mut head_outputs = Vec::with_capacity(config.num_heads);
        for h in 0..config.num_heads {
            let start = h * head_dim;
            let qh = tape.slice_cols(q, start, head_dim)?;
            let kh = tape.slice_cols(k, start, head_dim)?;
            let vh = tape.slice_cols(v, start, head_dim)?;
            let kt = tape.transpose(kh)?;
            let scores = tape.matmul(qh, kt)?;
            let scaled = tape.mul_scalar(scores, scale)?;
            let attn = tape.masked_softmax_rows(scaled, mask)?;
            if let Some(captured) = captures.as_mut() {
                captured.push(tape.value(attn)?.clone());
            }
            head_outputs.push(tape.matmul(attn, vh)?);
        }
        let merged = tape.concat_cols(&head_outputs)?;
        let projected = {
            let m = tape.matmul(merged, param_ids[layer.wo])?;
            tape.add_row_broadcast(m, param_ids[layer.bo])?
        };
        let res1 = tape.add(x, projected)?;
        let normed1 = tape.layer_norm(
            res1,
            param_ids[layer.ln1_scale],
            param_ids[layer.ln1_offset],
            LN_EPS,
        )?;

        let hidden = {
            let m = tape.matmul(normed1, param_ids[layer.ffn_w1])?;
            let b = tape.add_row_broadcast(m, param_ids[layer.ffn_b1])?;
            tape.relu(b)?
        };
        let ffn_out = {
            let m = tape.matmul(hidden, param_ids[layer.ffn_w2])?;
            tape.add_row_broadcast(m, param_ids[layer.ffn_b2])?
        };
        let res2 = tape.add(normed1, ffn_out)?;
        x = tape.layer_norm(
            res2,
            param_ids[layer.ln2_scale],
            param_ids[layer.ln2_offset],
            LN_EPS,
        )?;
    }

    // classify from the CLS position only
    let cls = tape.slice_rows(x, 0, 1)?;
    let logits = {
        let m = tape.matmul(cls, param_ids[index.head_w])?;
        tape.add_row_broadcast(m, param_ids[index.head_b])?
    };
    Ok((logits, captures))
}

/// Records the per-sample training loss (cross-entropy of the CLS logits
/// against `label`) and returns the scalar loss node.
pub fn build_classifier_loss(
    tape: &mut GradientTape<'_>,
    param_ids: &[ValueId],
    config: &ModelConfig,
    token_ids: &[u32],
    mask: &[bool],
    label: u32,
) -> Result<ValueId, ModelError> {
    if label as usize >= config.num_classes {
        return Err(ModelError::LabelOutOfRange {
            label,
            classes: config.num_classes,
        });
    }
    let (logits, _) = build_classifier_logits(tape, param_ids, config, token_ids, mask, false)?;
    Ok(tape.cross_entropy(logits, label as usize)?)
}
