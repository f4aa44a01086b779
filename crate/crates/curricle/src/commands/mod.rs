//! Subcommand implementations.

pub mod analyze;
pub mod prepare;
pub mod report;
pub mod score;
pub mod train;

use anyhow::{Context, Result};
use curricle_core::data::{parse_tsv, synth_dataset, LabeledDataset, Split, SynthSpec, Vocab};
use curricle_core::seed::derive_seed;

use crate::config::{DataSource, ResolvedConfig};
use crate::fsio;

/// Stream tags for the synthetic dev/test splits, derived from the
/// generator seed in the config.
const STREAM_SYNTH_DEV: u64 = 101;
const STREAM_SYNTH_TEST: u64 = 102;

pub struct LoadedData {
    pub train: LabeledDataset,
    pub dev: LabeledDataset,
    pub test: LabeledDataset,
    pub vocab: Vocab,
}

fn load_split(cfg: &ResolvedConfig, split: Split) -> Result<LabeledDataset> {
    match &cfg.raw.data {
        DataSource::Files { train, dev, test } => {
            let path = match split {
                Split::Train => train,
                Split::Dev => dev,
                Split::Test => test,
            };
            let content = fsio::read_to_string(path)?;
            parse_tsv(&content, split, cfg.classes)
                .with_context(|| format!("parsing {}", path.display()))
        }
        DataSource::Synthetic {
            n_train,
            n_dev,
            n_test,
            noise,
            min_len,
            max_len,
            seed,
        } => {
            let (n, split_seed) = match split {
                Split::Train => (*n_train, *seed),
                Split::Dev => (*n_dev, derive_seed(*seed, STREAM_SYNTH_DEV)),
                Split::Test => (*n_test, derive_seed(*seed, STREAM_SYNTH_TEST)),
            };
            let spec = SynthSpec {
                n,
                num_classes: cfg.classes,
                noise: *noise,
                min_len: *min_len,
                max_len: *max_len,
                seed: split_seed,
            };
            synth_dataset(&spec, split).context("generating synthetic data")
        }
    }
}

/// Loads only the train split and its vocabulary; difficulty scores are
/// a function of the train split alone.
pub fn load_train_only(cfg: &ResolvedConfig) -> Result<(LabeledDataset, Vocab)> {
    let raw = load_split(cfg, Split::Train)?;
    let vocab = Vocab::build(&raw, cfg.min_freq);
    let train = raw.tokenized(&vocab, cfg.raw.model.max_len);
    Ok((train, vocab))
}

/// Loads all three splits, building the vocabulary from train only.
pub fn load_datasets(cfg: &ResolvedConfig) -> Result<LoadedData> {
    let raw_train = load_split(cfg, Split::Train)?;
    let raw_dev = load_split(cfg, Split::Dev)?;
    let raw_test = load_split(cfg, Split::Test)?;
    let vocab = Vocab::build(&raw_train, cfg.min_freq);
    let max_len = cfg.raw.model.max_len;
    Ok(LoadedData {
        train: raw_train.tokenized(&vocab, max_len),
        dev: raw_dev.tokenized(&vocab, max_len),
        test: raw_test.tokenized(&vocab, max_len),
        vocab,
    })
}
