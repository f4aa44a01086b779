use alloc::format;
use alloc::vec::Vec;

use super::error::AnalysisError;
use crate::model::{forward, ModelParams};
use crate::numerics::Tensor;

/// Attention maps of every head under one parameter snapshot, restricted
/// to the given tokenization (run unpadded so the maps cover exactly the
/// real tokens, CLS included).
fn attention_maps(
    params: &ModelParams,
    token_ids: &[u32],
    mask: &[bool],
) -> Result<Vec<Tensor>, AnalysisError> {
    let out = forward(params, token_ids, mask, true)?;
    Ok(out.attentions.expect("capture was requested"))
}

fn check_same_config(prev: &ModelParams, cur: &ModelParams) -> Result<(), AnalysisError> {
    if prev.config() != cur.config() {
        return Err(AnalysisError::SnapshotMismatch {
            reason: format!("{:?} vs {:?}", prev.config(), cur.config()),
        });
    }
    Ok(())
}

/// Movement index of one head: the elementwise difference between the
/// head's attention map after the current phase and after the previous
/// one, on the same tokenization. Entries lie in [−1, 1].
pub fn movement_index(
    prev: &ModelParams,
    cur: &ModelParams,
    token_ids: &[u32],
    mask: &[bool],
    layer: usize,
    head: usize,
) -> Result<Tensor, AnalysisError> {
    check_same_config(prev, cur)?;
    let config = cur.config();
    if layer >= config.num_layers || head >= config.num_heads {
        return Err(AnalysisError::HeadOutOfRange {
            layer,
            head,
            layers: config.num_layers,
            heads: config.num_heads,
        });
    }
    let all = movement_all_heads(prev, cur, token_ids, mask)?;
    Ok(all.into_iter().nth(layer * config.num_heads + head).unwrap())
}

/// Movement indices of every head, layer-major
/// (`layer * num_heads + head`).
pub fn movement_all_heads(
    prev: &ModelParams,
    cur: &ModelParams,
    token_ids: &[u32],
    mask: &[bool],
) -> Result<Vec<Tensor>, AnalysisError> {
    check_same_config(prev, cur)?;
    let before = attention_maps(prev, token_ids, mask)?;
    let after = attention_maps(cur, token_ids, mask)?;
    debug_assert_eq!(before.len(), after.len());
    before
        .iter()
        .zip(after.iter())
        .map(|(b, a)| {
            let data: Vec<f64> = a
                .data()
                .iter()
                .zip(b.data().iter())
                .map(|(x, y)| x - y)
                .collect();
            Ok(Tensor::new(a.shape().to_vec(), data).expect("difference of finite maps"))
        })
        .collect()
}

/// Elementwise mean over all head/layer movement matrices of one
/// transition.
pub fn averaged_movement(per_head: &[Tensor]) -> Result<Tensor, AnalysisError> {
    if per_head.is_empty() {
        return Err(AnalysisError::NotAMatrix);
    }
    let shape = per_head[0].shape().to_vec();
    for m in per_head {
        if m.shape() != shape.as_slice() {
            return Err(AnalysisError::MatrixShapeMismatch {
                left: shape,
                right: m.shape().to_vec(),
            });
        }
    }
    let numel: usize = shape.iter().product();
    let mut acc = alloc::vec![0.0; numel];
    for m in per_head {
        for (a, v) in acc.iter_mut().zip(m.data().iter()) {
            *a += v;
        }
    }
    let scale = 1.0 / per_head.len() as f64;
    for a in acc.iter_mut() {
        *a *= scale;
    }
    Ok(Tensor::new(shape, acc).expect("mean of finite maps"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_tsv, Split, Vocab};
    use crate::model::{init_model, train_epochs, ModelConfig};
    use crate::numerics::{AdamHyper, OptimizerState};

    fn fixture() -> (ModelParams, ModelParams, Vec<u32>, Vec<bool>) {
        let raw = parse_tsv(
            "0\tbad dull film\n1\tfine film\n0\tdull\n1\tfine fine\n",
            Split::Train,
            2,
        )
        .unwrap();
        let vocab = Vocab::build(&raw, 1);
        let data = raw.tokenized(&vocab, 8);
        let config = ModelConfig {
            vocab_size: vocab.size(),
            embed_dim: 8,
            num_layers: 2,
            num_heads: 2,
            ffn_dim: 8,
            max_len: 8,
            num_classes: 2,
            seed: 4,
        };
        let before = init_model(&config).unwrap();
        let mut opt = OptimizerState::new(AdamHyper::default(), before.tensors());
        let after = train_epochs(before.clone(), &data, 3, &mut opt, 2, 11)
            .unwrap()
            .params;
        let sample = &data.samples[0];
        (before, after, sample.token_ids.clone(), sample.mask.clone())
    }

    #[test]
    fn identical_snapshots_give_zero_movement() {
        let (before, _, ids, mask) = fixture();
        let m = movement_index(&before, &before, &ids, &mask, 0, 1).unwrap();
        assert!(m.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn entries_are_bounded_by_one() {
        let (before, after, ids, mask) = fixture();
        for m in movement_all_heads(&before, &after, &ids, &mask).unwrap() {
            assert!(m.data().iter().all(|&v| (-1.0..=1.0).contains(&v)));
            assert_eq!(m.dims2().unwrap(), (ids.len(), ids.len()));
        }
    }

    #[test]
    fn transitions_telescope_to_endpoint_difference() {
        // three snapshots along one training trajectory
        let (s1, s2, ids, mask) = fixture();
        let mut opt = OptimizerState::new(AdamHyper::default(), s2.tensors());
        let raw = parse_tsv("0\tbad dull film\n1\tfine film\n", Split::Train, 2).unwrap();
        let vocab = Vocab::build(&raw, 1);
        let data = raw.tokenized(&vocab, 8);
        let s3 = train_epochs(s2.clone(), &data, 2, &mut opt, 2, 13).unwrap().params;

        let m2 = movement_all_heads(&s1, &s2, &ids, &mask).unwrap();
        let m3 = movement_all_heads(&s2, &s3, &ids, &mask).unwrap();
        let direct = movement_all_heads(&s1, &s3, &ids, &mask).unwrap();
        for ((a, b), d) in m2.iter().zip(m3.iter()).zip(direct.iter()) {
            for ((x, y), z) in a.data().iter().zip(b.data().iter()).zip(d.data().iter()) {
                assert!((x + y - z).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn averaging_matches_brute_force_sum() {
        let (before, after, ids, mask) = fixture();
        let all = movement_all_heads(&before, &after, &ids, &mask).unwrap();
        let avg = averaged_movement(&all).unwrap();
        let n = all.len() as f64;
        for idx in 0..avg.numel() {
            let brute: f64 = all.iter().map(|m| m.data()[idx]).sum::<f64>() / n;
            assert!((avg.data()[idx] - brute).abs() < 1e-12);
        }
    }

    #[test]
    fn single_head_average_is_identity_and_identical_heads_collapse() {
        let (before, after, ids, mask) = fixture();
        let all = movement_all_heads(&before, &after, &ids, &mask).unwrap();
        let one = averaged_movement(&all[..1]).unwrap();
        assert_eq!(one, all[0]);
        let same = [all[0].clone(), all[0].clone(), all[0].clone()];
        let avg = averaged_movement(&same).unwrap();
        for (a, b) in avg.data().iter().zip(all[0].data().iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn config_mismatch_and_bad_head_are_rejected() {
        let (before, after, ids, mask) = fixture();
        let mut other_config = before.config().clone();
        other_config.seed += 1;
        other_config.num_classes = 3;
        let other = init_model(&other_config).unwrap();
        assert!(matches!(
            movement_all_heads(&before, &other, &ids, &mask),
            Err(AnalysisError::SnapshotMismatch { .. })
        ));
        assert!(matches!(
            movement_index(&before, &after, &ids, &mask, 9, 0),
            Err(AnalysisError::HeadOutOfRange { .. })
        ));
    }
}
