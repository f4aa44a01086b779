use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ModelConfig;
use super::error::ModelError;
use crate::math;
use crate::numerics::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ParamKind {
    /// 2-d weight matrix, Xavier-uniform initialized.
    Weight,
    /// 1-d bias/offset, zero initialized.
    Bias,
    /// 1-d layer-norm scale, one initialized.
    NormScale,
}

pub(crate) struct ParamSpec {
    pub name: String,
    pub shape: Vec<usize>,
    pub kind: ParamKind,
}

/// Flat indices of every tensor in the canonical parameter order.
pub(crate) struct LayerIndex {
    pub wq: usize,
    pub bq: usize,
    pub wk: usize,
    pub bk: usize,
    pub wv: usize,
    pub bv: usize,
    pub wo: usize,
    pub bo: usize,
    pub ln1_scale: usize,
    pub ln1_offset: usize,
    pub ffn_w1: usize,
    pub ffn_b1: usize,
    pub ffn_w2: usize,
    pub ffn_b2: usize,
    pub ln2_scale: usize,
    pub ln2_offset: usize,
}

pub(crate) struct ParamIndex {
    pub token_embed: usize,
    pub pos_embed: usize,
    pub layers: Vec<LayerIndex>,
    pub head_w: usize,
    pub head_b: usize,
}

/// Canonical parameter layout for a config: names, shapes, kinds, and the
/// positional index used by the graph builder and the snapshot format.
pub(crate) fn param_layout(config: &ModelConfig) -> (Vec<ParamSpec>, ParamIndex) {
    let d = config.embed_dim;
    let mut specs: Vec<ParamSpec> = Vec::new();
    fn push(name: String, shape: Vec<usize>, kind: ParamKind, specs: &mut Vec<ParamSpec>) -> usize {
        specs.push(ParamSpec { name, shape, kind });
        specs.len() - 1
    }

    let token_embed = push(
        "embed.token".into(),
        alloc::vec![config.vocab_size, d],
        ParamKind::Weight,
        &mut specs,
    );
    let pos_embed = push(
        "embed.pos".into(),
        alloc::vec![config.max_len, d],
        ParamKind::Weight,
        &mut specs,
    );

    let mut layers = Vec::with_capacity(config.num_layers);
    for l in 0..config.num_layers {
        let w = |field: &str| format!("layer{l}.{field}");
        let layer = LayerIndex {
            wq: push(w("attn.wq"), alloc::vec![d, d], ParamKind::Weight, &mut specs),
            bq: push(w("attn.bq"), alloc::vec![d], ParamKind::Bias, &mut specs),
            wk: push(w("attn.wk"), alloc::vec![d, d], ParamKind::Weight, &mut specs),
            bk: push(w("attn.bk"), alloc::vec![d], ParamKind::Bias, &mut specs),
            wv: push(w("attn.wv"), alloc::vec![d, d], ParamKind::Weight, &mut specs),
            bv: push(w("attn.bv"), alloc::vec![d], ParamKind::Bias, &mut specs),
            wo: push(w("attn.wo"), alloc::vec![d, d], ParamKind::Weight, &mut specs),
            bo: push(w("attn.bo"), alloc::vec![d], ParamKind::Bias, &mut specs),
            ln1_scale: push(w("ln1.scale"), alloc::vec![d], ParamKind::NormScale, &mut specs),
            ln1_offset: push(w("ln1.offset"), alloc::vec![d], ParamKind::Bias, &mut specs),
            ffn_w1: push(
                w("ffn.w1"),
                alloc::vec![d, config.ffn_dim],
                ParamKind::Weight,
                &mut specs,
            ),
            ffn_b1: push(w("ffn.b1"), alloc::vec![config.ffn_dim], ParamKind::Bias, &mut specs),
            ffn_w2: push(
                w("ffn.w2"),
                alloc::vec![config.ffn_dim, d],
                ParamKind::Weight,
                &mut specs,
            ),
            ffn_b2: push(w("ffn.b2"), alloc::vec![d], ParamKind::Bias, &mut specs),
            ln2_scale: push(w("ln2.scale"), alloc::vec![d], ParamKind::NormScale, &mut specs),
            ln2_offset: push(w("ln2.offset"), alloc::vec![d], ParamKind::Bias, &mut specs),
        };
        layers.push(layer);
    }

    let head_w = push(
        "head.w".into(),
        alloc::vec![d, config.num_classes],
        ParamKind::Weight,
        &mut specs,
    );
    let head_b = push(
        "head.b".into(),
        alloc::vec![config.num_classes],
        ParamKind::Bias,
        &mut specs,
    );

    (
        specs,
        ParamIndex {
            token_embed,
            pos_embed,
            layers,
            head_w,
            head_b,
        },
    )
}

/// All weights of one model, stored in the canonical layout order.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    config: ModelConfig,
    tensors: Vec<Tensor>,
}

impl ModelParams {
    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn tensors(&self) -> &[Tensor] {
        &self.tensors
    }

    pub(crate) fn tensors_mut(&mut self) -> &mut [Tensor] {
        &mut self.tensors
    }

    /// `(name, tensor)` pairs in canonical order.
    pub fn named(&self) -> Vec<(String, &Tensor)> {
        let (specs, _) = param_layout(&self.config);
        specs
            .into_iter()
            .map(|s| s.name)
            .zip(self.tensors.iter())
            .collect()
    }

    /// Rebuilds params from tensors that must match the canonical layout.
    pub fn from_tensors(config: ModelConfig, tensors: Vec<Tensor>) -> Result<Self, ModelError> {
        config.validate()?;
        let (specs, _) = param_layout(&config);
        if specs.len() != tensors.len() {
            return Err(ModelError::InvalidConfig(format!(
                "expected {} parameter tensors, got {}",
                specs.len(),
                tensors.len()
            )));
        }
        for (spec, tensor) in specs.iter().zip(tensors.iter()) {
            if spec.shape != tensor.shape() {
                return Err(ModelError::InvalidConfig(format!(
                    "tensor {} must have shape {:?}, got {:?}",
                    spec.name,
                    spec.shape,
                    tensor.shape()
                )));
            }
        }
        Ok(Self { config, tensors })
    }

    /// Total scalar parameter count.
    pub fn num_scalars(&self) -> usize {
        self.tensors.iter().map(|t| t.numel()).sum()
    }
}

/// Initializes all weights deterministically from `config.seed`:
/// Xavier-uniform weight matrices, zero offsets, unit layer-norm scales.
/// The same config and seed always yield bitwise-identical parameters.
pub fn init_model(config: &ModelConfig) -> Result<ModelParams, ModelError> {
    config.validate()?;
    let (specs, _) = param_layout(config);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tensors = specs
        .iter()
        .map(|spec| {
            let numel: usize = spec.shape.iter().product();
            match spec.kind {
                ParamKind::Weight => {
                    let (fan_in, fan_out) = (spec.shape[0], spec.shape[1]);
                    let limit = math::sqrt(6.0 / (fan_in + fan_out) as f64);
                    let data: Vec<f64> = (0..numel).map(|_| rng.random_range(-limit..limit)).collect();
                    Tensor::from_parts(spec.shape.clone(), data)
                }
                ParamKind::Bias => Tensor::zeros(spec.shape.clone()),
                ParamKind::NormScale => Tensor::filled(spec.shape.clone(), 1.0),
            }
        })
        .collect();
    Ok(ModelParams {
        config: config.clone(),
        tensors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ModelConfig {
        ModelConfig {
            vocab_size: 11,
            embed_dim: 8,
            num_layers: 2,
            num_heads: 2,
            ffn_dim: 12,
            max_len: 6,
            num_classes: 3,
            seed: 5,
        }
    }

    #[test]
    fn same_seed_is_bitwise_identical() {
        let a = init_model(&tiny()).unwrap();
        let b = init_model(&tiny()).unwrap();
        for (ta, tb) in a.tensors().iter().zip(b.tensors().iter()) {
            let bits_a: Vec<u64> = ta.data().iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = tb.data().iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
    }

    #[test]
    fn different_seed_differs() {
        let a = init_model(&tiny()).unwrap();
        let mut cfg = tiny();
        cfg.seed += 1;
        let b = init_model(&cfg).unwrap();
        assert_ne!(a.tensors()[0], b.tensors()[0]);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = tiny();
        cfg.embed_dim = 33;
        assert!(matches!(init_model(&cfg), Err(ModelError::InvalidConfig(_))));
    }

    #[test]
    fn layout_names_are_unique_and_ordered() {
        let (specs, index) = param_layout(&tiny());
        let mut names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(specs.len(), 2 + 2 * 16 + 2);
        assert_eq!(index.token_embed, 0);
        assert_eq!(index.head_b, specs.len() - 1);
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), specs.len());
    }

    #[test]
    fn biases_zero_and_scales_one() {
        let params = init_model(&tiny()).unwrap();
        let named = params.named();
        for (name, tensor) in named {
            if name.ends_with(".scale") {
                assert!(tensor.data().iter().all(|&v| v == 1.0), "{name}");
            } else if name.contains(".b") || name.ends_with(".offset") {
                assert!(tensor.data().iter().all(|&v| v == 0.0), "{name}");
            }
        }
    }
}
