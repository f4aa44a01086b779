use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::error::CurriculumError;
use crate::data::LabeledDataset;
use crate::model::{forward, init_model, train_epochs, ModelConfig};
use crate::numerics::{AdamHyper, OptimizerState};

/// How sample difficulty is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Squared error of an auxiliary model's predicted distribution
    /// against the one-hot label.
    Auxiliary,
    /// Real-token count; longer sentences are harder.
    SentenceLength,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Auxiliary => "auxiliary",
            Strategy::SentenceLength => "length",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = CurriculumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auxiliary" => Ok(Strategy::Auxiliary),
            "length" => Ok(Strategy::SentenceLength),
            other => Err(CurriculumError::UnknownStrategy(String::from(other))),
        }
    }
}

/// A sample's difficulty; higher means harder.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifficultyScore {
    pub sample_id: u32,
    pub score: f64,
}

/// Scores every train sample by its real-token count (CLS and padding
/// excluded), in dataset order.
pub fn score_sentence_length(train: &LabeledDataset) -> Result<Vec<DifficultyScore>, CurriculumError> {
    train
        .samples
        .iter()
        .map(|s| {
            if s.token_ids.is_empty() {
                return Err(CurriculumError::NotTokenized);
            }
            let real = s.mask.iter().filter(|&&m| m).count() - 1;
            Ok(DifficultyScore {
                sample_id: s.id,
                score: real as f64,
            })
        })
        .collect()
}

/// Squared error between a predicted class distribution and the one-hot
/// label: `sum_j (p_j - y_j)^2`. Bounded by [0, 2] for probability
/// vectors.
pub fn mse_score(probabilities: &[f64], label: usize) -> f64 {
    let mut sum = 0.0;
    for (j, &p) in probabilities.iter().enumerate() {
        let y = if j == label { 1.0 } else { 0.0 };
        sum += (p - y) * (p - y);
    }
    sum
}

/// Trains an auxiliary model of the same architecture on the full train
/// split (no curriculum, same hyperparameters, `total_epochs` passes)
/// and scores every sample by [`mse_score`] of the model's prediction.
/// Scores are returned in dataset order.
pub fn score_auxiliary(
    train: &LabeledDataset,
    config: &ModelConfig,
    batch_size: usize,
    total_epochs: usize,
    adam: AdamHyper,
    seed: u64,
) -> Result<Vec<DifficultyScore>, CurriculumError> {
    let mut aux_config = config.clone();
    aux_config.seed = seed;
    let params = init_model(&aux_config)?;
    let mut opt = OptimizerState::new(adam, params.tensors());
    let shuffle = crate::seed::derive_seed(seed, super::STREAM_SHUFFLE);
    let outcome = train_epochs(params, train, total_epochs, &mut opt, batch_size, shuffle)?;

    let mut scores = Vec::with_capacity(train.len());
    for s in &train.samples {
        let out = forward(&outcome.params, &s.token_ids, &s.mask, false)?;
        scores.push(DifficultyScore {
            sample_id: s.id,
            score: mse_score(out.probabilities.data(), s.label as usize),
        });
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{parse_tsv, Split, Vocab};

    #[test]
    fn mse_closed_forms() {
        // exactly one-hot on the true class
        assert_eq!(mse_score(&[0.0, 1.0, 0.0], 1), 0.0);
        // one-hot on a wrong class: (1-0)^2 + (0-1)^2
        assert_eq!(mse_score(&[1.0, 0.0, 0.0], 1), 2.0);
        // uniform over five classes: 0.8^2 + 4 * 0.2^2
        let uniform = [0.2; 5];
        assert!((mse_score(&uniform, 0) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn sentence_length_counts_real_tokens() {
        let raw = parse_tsv("0\tgood\n1\t\n2\tone two three\n", Split::Train, 5).unwrap();
        let vocab = Vocab::build(&raw, 1);
        let data = raw.tokenized(&vocab, 32);
        let scores = score_sentence_length(&data).unwrap();
        assert_eq!(scores[0].score, 1.0);
        assert_eq!(scores[1].score, 0.0);
        assert_eq!(scores[2].score, 3.0);
    }

    #[test]
    fn sentence_length_order_matches_token_count_order() {
        let raw = parse_tsv("0\ta b c d\n1\ta\n2\ta b\n", Split::Train, 5).unwrap();
        let vocab = Vocab::build(&raw, 1);
        let data = raw.tokenized(&vocab, 32);
        let mut scores = score_sentence_length(&data).unwrap();
        scores.sort_by(|a, b| a.score.total_cmp(&b.score));
        let by_score: alloc::vec::Vec<u32> = scores.iter().map(|s| s.sample_id).collect();
        assert_eq!(by_score, alloc::vec![1, 2, 0]);
    }

    #[test]
    fn untokenized_dataset_is_rejected() {
        let raw = parse_tsv("0\tgood\n", Split::Train, 5).unwrap();
        assert_eq!(
            score_sentence_length(&raw).unwrap_err(),
            CurriculumError::NotTokenized
        );
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("auxiliary".parse::<Strategy>().unwrap(), Strategy::Auxiliary);
        assert_eq!("length".parse::<Strategy>().unwrap(), Strategy::SentenceLength);
        assert!("sorting-hat".parse::<Strategy>().is_err());
    }
}
