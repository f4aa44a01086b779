//! Property coverage for partition algebra and the regime semantics that
//! unit tests only spot-check.

use std::collections::BTreeSet;

use curricle_core::curriculum::{
    partition_phases, run_curriculum, score_sentence_length, DifficultyScore, Mode, RunSeeds,
    Strategy, TrainSettings,
};
use curricle_core::data::{synth_dataset, LabeledDataset, Split, SynthSpec, Vocab};
use curricle_core::model::{ModelConfig, ModelParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partition_algebra_holds(
        raw_scores in prop::collection::vec(0.0f64..100.0, 1..120),
        k_pick in 1usize..12,
    ) {
        let n = raw_scores.len();
        let k = 1 + (k_pick - 1) % n.min(11);
        let scores: Vec<DifficultyScore> = raw_scores
            .iter()
            .enumerate()
            .map(|(i, &score)| DifficultyScore { sample_id: i as u32, score })
            .collect();
        let plan = partition_phases(&scores, k, Strategy::Auxiliary).unwrap();

        // exact cover, disjointness
        let mut seen = BTreeSet::new();
        for bucket in &plan.buckets {
            for &id in bucket {
                prop_assert!(seen.insert(id), "id {id} duplicated");
            }
        }
        prop_assert_eq!(seen.len(), n);

        // near-equal sizes
        let sizes: Vec<usize> = plan.buckets.iter().map(Vec::len).collect();
        let min = *sizes.iter().min().unwrap();
        let max = *sizes.iter().max().unwrap();
        prop_assert!(max - min <= 1, "sizes {sizes:?}");

        // monotone score boundaries
        for w in plan.buckets.windows(2) {
            let hi_of_lo = w[0].iter().map(|&i| raw_scores[i as usize]).fold(f64::MIN, f64::max);
            let lo_of_hi = w[1].iter().map(|&i| raw_scores[i as usize]).fold(f64::MAX, f64::min);
            prop_assert!(hi_of_lo <= lo_of_hi);
        }
    }
}

fn tokenized_fixture() -> (LabeledDataset, LabeledDataset, LabeledDataset, ModelConfig) {
    let spec = |n, seed| SynthSpec {
        n,
        num_classes: 3,
        noise: 0.2,
        min_len: 2,
        max_len: 6,
        seed,
    };
    let raw_train = synth_dataset(&spec(24, 31), Split::Train).unwrap();
    let raw_dev = synth_dataset(&spec(9, 32), Split::Dev).unwrap();
    let raw_test = synth_dataset(&spec(9, 33), Split::Test).unwrap();
    let vocab = Vocab::build(&raw_train, 1);
    let config = ModelConfig {
        vocab_size: vocab.size(),
        embed_dim: 8,
        num_layers: 1,
        num_heads: 2,
        ffn_dim: 10,
        max_len: 10,
        num_classes: 3,
        seed: 0,
    };
    (
        raw_train.tokenized(&vocab, 10),
        raw_dev.tokenized(&vocab, 10),
        raw_test.tokenized(&vocab, 10),
        config,
    )
}

fn bits(params: &ModelParams) -> Vec<u64> {
    params
        .tensors()
        .iter()
        .flat_map(|t| t.data().iter().map(|v| v.to_bits()))
        .collect()
}

/// A phase of Individual only depends on its own bucket: shuffling the
/// other buckets' contents among themselves leaves the phase result
/// bitwise unchanged.
#[test]
fn individual_phases_are_independent_of_other_buckets() {
    let (train, dev, test, config) = tokenized_fixture();
    let scores = score_sentence_length(&train).unwrap();
    let plan = partition_phases(&scores, 3, Strategy::SentenceLength).unwrap();
    let settings = TrainSettings {
        epochs_per_phase: 1,
        batch_size: 4,
        adam: Default::default(),
    };
    let seeds = RunSeeds { init: 3, shuffle: 8 };
    let baseline =
        run_curriculum(&plan, Mode::Individual, &train, &dev, &test, &config, &settings, &seeds)
            .unwrap();

    // swap contents between buckets 1 and 3 (phase 2 untouched)
    let mut shuffled = plan.clone();
    let moved = shuffled.buckets[2].len().min(shuffled.buckets[0].len());
    for i in 0..moved {
        let a = shuffled.buckets[0][i];
        let b = shuffled.buckets[2][i];
        shuffled.buckets[0][i] = b;
        shuffled.buckets[2][i] = a;
    }
    assert_ne!(shuffled.buckets[0], plan.buckets[0]);

    let permuted =
        run_curriculum(&shuffled, Mode::Individual, &train, &dev, &test, &config, &settings, &seeds)
            .unwrap();

    assert_eq!(bits(&baseline[1].params), bits(&permuted[1].params));
    assert_eq!(baseline[1].test_correct, permuted[1].test_correct);
    assert_eq!(baseline[1].test_accuracy, permuted[1].test_accuracy);
}

/// Sentence-length scores are exactly token counts, and auxiliary scores
/// stay within [0, 2] (checked at training scale in the acceptance
/// suite; here on the desk fixture).
#[test]
fn score_ranges() {
    let (train, _, _, config) = tokenized_fixture();
    let lengths = score_sentence_length(&train).unwrap();
    for s in &lengths {
        assert_eq!(s.score.fract(), 0.0);
        assert!(s.score >= 0.0);
    }
    let aux = curricle_core::curriculum::score_auxiliary(
        &train,
        &config,
        4,
        1,
        Default::default(),
        99,
    )
    .unwrap();
    assert_eq!(aux.len(), train.len());
    for s in &aux {
        assert!((0.0..=2.0 + 1e-12).contains(&s.score), "score {}", s.score);
    }
}
