use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use curricle_core::curriculum::{
    score_auxiliary, score_sentence_length, DifficultyScore, Strategy, STREAM_AUX,
};
use curricle_core::data::LabeledDataset;
use curricle_core::seed::derive_seed;

use crate::config::{load_config, Overrides};
use crate::error::CliResult;
use crate::fsio;

/// Scores the train split under the configured strategy and writes the
/// ranked `sample_id,score,rank` CSV. With `dump`, prints the 50 easiest
/// and 50 hardest sentences.
pub fn run(config_path: &Path, overrides: &Overrides, out: Option<PathBuf>, dump: bool) -> CliResult<()> {
    let cfg = load_config(config_path, overrides)?;
    let out = out.unwrap_or_else(|| PathBuf::from("scores.csv"));

    let (train, _vocab) = super::load_train_only(&cfg)?;
    let first_seed = cfg.seeds[0];
    let scores = match cfg.strategy {
        Strategy::SentenceLength => {
            score_sentence_length(&train).map_err(|e| anyhow::anyhow!("{e}"))?
        }
        Strategy::Auxiliary => {
            let model = cfg.model_config(_vocab.size(), first_seed);
            score_auxiliary(
                &train,
                &model,
                cfg.settings.batch_size,
                cfg.settings.epochs_per_phase * cfg.k,
                cfg.settings.adam,
                derive_seed(first_seed, STREAM_AUX),
            )
            .map_err(|e| anyhow::anyhow!("{e}"))?
        }
    };

    let ranked = rank(&scores);
    fsio::write_string(&out, &scores_csv(&ranked))?;
    println!(
        "wrote {} scores ({} strategy) to {}",
        ranked.len(),
        cfg.strategy,
        out.display()
    );

    if dump {
        print!("{}", dump_text(&ranked, &train));
    }
    Ok(())
}

/// Scores sorted ascending by (score, sample id), paired with 1-based
/// ranks.
pub fn rank(scores: &[DifficultyScore]) -> Vec<(usize, DifficultyScore)> {
    let mut sorted: Vec<DifficultyScore> = scores.to_vec();
    sorted.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then_with(|| a.sample_id.cmp(&b.sample_id))
    });
    sorted
        .into_iter()
        .enumerate()
        .map(|(i, s)| (i + 1, s))
        .collect()
}

pub fn scores_csv(ranked: &[(usize, DifficultyScore)]) -> String {
    let mut out = String::from("sample_id,score,rank\n");
    for (rank, score) in ranked {
        let _ = writeln!(out, "{},{},{}", score.sample_id, score.score, rank);
    }
    out
}

/// The easiest and hardest 50 sentences (fewer only when the corpus is
/// smaller), hardest first in the hard section.
pub fn dump_text(ranked: &[(usize, DifficultyScore)], train: &LabeledDataset) -> String {
    let text_of = |id: u32| {
        train
            .samples
            .iter()
            .find(|s| s.id == id)
            .map(|s| (s.label, s.text.as_str()))
            .unwrap_or((0, "<unknown sample>"))
    };
    let take = ranked.len().min(50);
    let mut out = String::new();
    let _ = writeln!(out, "== easiest {take} ==");
    for (_, score) in ranked.iter().take(take) {
        let (label, text) = text_of(score.sample_id);
        let _ = writeln!(out, "{}\t{}\t{}", score.score, label, text);
    }
    let _ = writeln!(out, "== hardest {take} ==");
    for (_, score) in ranked.iter().rev().take(take) {
        let (label, text) = text_of(score.sample_id);
        let _ = writeln!(out, "{}\t{}\t{}", score.score, label, text);
    }
    out
}
