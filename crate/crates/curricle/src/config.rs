use std::path::{Path, PathBuf};

use curricle_core::curriculum::{Mode, Strategy, TrainSettings};
use curricle_core::model::ModelConfig;
use curricle_core::numerics::AdamHyper;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::fsio;

fn default_k() -> usize {
    5
}
fn default_epochs() -> usize {
    2
}
fn default_batch() -> usize {
    8
}
fn default_min_freq() -> usize {
    2
}
fn default_learning_rate() -> f64 {
    1e-3
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("runs")
}

/// Where samples come from: three TSV files or the synthetic generator.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Files {
        train: PathBuf,
        dev: PathBuf,
        test: PathBuf,
    },
    Synthetic {
        n_train: usize,
        n_dev: usize,
        n_test: usize,
        noise: f64,
        min_len: usize,
        max_len: usize,
        seed: u64,
    },
}

/// Model-architecture fields exposed in config files. Vocabulary size,
/// class count, and the run seed are filled in by the pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSettings {
    pub embed_dim: usize,
    pub num_layers: usize,
    pub num_heads: usize,
    pub ffn_dim: usize,
    pub max_len: usize,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            embed_dim: 32,
            num_layers: 2,
            num_heads: 2,
            ffn_dim: 64,
            max_len: 64,
        }
    }
}

/// The experiment description as written in a TOML config file.
/// Input TSVs must already carry labels below `classes`; the `prepare`
/// subcommand produces the collapsed SST-x variants from 5-class input.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub classes: u32,
    pub strategy: String,
    pub mode: String,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_epochs")]
    pub epochs_per_phase: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_min_freq")]
    pub min_freq: usize,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    /// Base seed; expands to five runs `seed..seed+4` unless `seeds` is
    /// given explicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    pub data: DataSource,
    #[serde(default)]
    pub model: ModelSettings,
}

/// Command-line values that override config-file fields.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<String>,
    pub strategy: Option<String>,
    pub classes: Option<u32>,
    pub k: Option<usize>,
    pub epochs: Option<usize>,
    pub seed: Option<u64>,
    pub seeds: Option<String>,
    pub out: Option<PathBuf>,
}

/// A validated experiment with concrete enum values and the final seed
/// list.
#[derive(Clone, Debug)]
pub struct ResolvedConfig {
    pub raw: ExperimentConfig,
    pub classes: u32,
    pub strategy: Strategy,
    pub mode: Mode,
    pub k: usize,
    pub min_freq: usize,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub tag: String,
    pub settings: TrainSettings,
}

impl ResolvedConfig {
    /// Model config for this experiment; `vocab_size` comes from the
    /// built vocabulary and `seed` from the individual run.
    pub fn model_config(&self, vocab_size: usize, seed: u64) -> ModelConfig {
        ModelConfig {
            vocab_size,
            embed_dim: self.raw.model.embed_dim,
            num_layers: self.raw.model.num_layers,
            num_heads: self.raw.model.num_heads,
            ffn_dim: self.raw.model.ffn_dim,
            max_len: self.raw.model.max_len,
            num_classes: self.classes as usize,
            seed,
        }
    }

    /// The resolved config serialized back to TOML (seed list explicit),
    /// as persisted into run directories.
    pub fn to_toml(&self) -> String {
        let mut raw = self.raw.clone();
        raw.classes = self.classes;
        raw.strategy = self.strategy.name().to_string();
        raw.mode = self.mode.name().to_string();
        raw.k = self.k;
        raw.epochs_per_phase = self.settings.epochs_per_phase;
        raw.seed = None;
        raw.seeds = Some(self.seeds.clone());
        raw.out_dir = self.out_dir.clone();
        raw.tag = Some(self.tag.clone());
        toml::to_string(&raw).expect("resolved config serializes")
    }
}

pub fn load_config(path: &Path, overrides: &Overrides) -> CliResult<ResolvedConfig> {
    let content = fsio::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config: {e:#}")))?;
    let raw: ExperimentConfig = toml::from_str(&content)
        .map_err(|e| CliError::config(format!("cannot parse {}: {e}", path.display())))?;
    resolve(raw, overrides)
}

pub fn resolve(mut raw: ExperimentConfig, overrides: &Overrides) -> CliResult<ResolvedConfig> {
    if let Some(mode) = &overrides.mode {
        raw.mode = mode.clone();
    }
    if let Some(strategy) = &overrides.strategy {
        raw.strategy = strategy.clone();
    }
    if let Some(classes) = overrides.classes {
        raw.classes = classes;
    }
    if let Some(k) = overrides.k {
        raw.k = k;
    }
    if let Some(epochs) = overrides.epochs {
        raw.epochs_per_phase = epochs;
    }
    if let Some(seed) = overrides.seed {
        raw.seed = Some(seed);
        raw.seeds = None;
    }
    if let Some(list) = &overrides.seeds {
        let parsed: Result<Vec<u64>, _> = list.split(',').map(|s| s.trim().parse()).collect();
        raw.seeds = Some(parsed.map_err(|_| {
            CliError::config(format!("--seeds must be a comma-separated list of integers, got {list:?}"))
        })?);
    }
    if let Some(out) = &overrides.out {
        raw.out_dir = out.clone();
    }

    let strategy: Strategy = raw
        .strategy
        .parse()
        .map_err(|e| CliError::config(format!("{e}")))?;
    let mode: Mode = raw.mode.parse().map_err(|e| CliError::config(format!("{e}")))?;

    if !(2..=5).contains(&raw.classes) {
        return Err(CliError::config(format!(
            "classes must be 2..=5, got {}",
            raw.classes
        )));
    }
    if raw.k == 0 {
        return Err(CliError::config("k must be at least 1"));
    }
    if raw.epochs_per_phase == 0 {
        return Err(CliError::config("epochs_per_phase must be at least 1"));
    }
    if raw.batch_size == 0 {
        return Err(CliError::config("batch_size must be at least 1"));
    }
    if !(raw.learning_rate.is_finite() && raw.learning_rate > 0.0) {
        return Err(CliError::config(format!(
            "learning_rate must be positive and finite, got {}",
            raw.learning_rate
        )));
    }
    if let DataSource::Synthetic {
        n_train,
        n_dev,
        n_test,
        noise,
        min_len,
        max_len,
        ..
    } = &raw.data
    {
        if *n_train == 0 || *n_dev == 0 || *n_test == 0 {
            return Err(CliError::config("synthetic split sizes must be positive"));
        }
        if !(0.0..=1.0).contains(noise) {
            return Err(CliError::config(format!("noise must lie in [0, 1], got {noise}")));
        }
        if *min_len == 0 || min_len > max_len {
            return Err(CliError::config(format!(
                "synthetic length range must satisfy 1 <= min <= max, got {min_len}..={max_len}"
            )));
        }
    }

    // architecture sanity, independent of the eventual vocabulary
    let probe = ModelConfig {
        vocab_size: 3,
        embed_dim: raw.model.embed_dim,
        num_layers: raw.model.num_layers,
        num_heads: raw.model.num_heads,
        ffn_dim: raw.model.ffn_dim,
        max_len: raw.model.max_len,
        num_classes: raw.classes as usize,
        seed: 0,
    };
    probe
        .validate()
        .map_err(|e| CliError::config(format!("{e}")))?;

    let seeds = match (&raw.seeds, raw.seed) {
        (Some(list), _) if !list.is_empty() => list.clone(),
        (Some(_), _) => return Err(CliError::config("seeds list must not be empty")),
        (None, Some(base)) => (base..base + 5).collect(),
        (None, None) => (42..47).collect(),
    };

    let tag = raw.tag.clone().unwrap_or_else(|| {
        format!("{}-{}-c{}", mode.name(), strategy.name(), raw.classes)
    });
    let settings = TrainSettings {
        epochs_per_phase: raw.epochs_per_phase,
        batch_size: raw.batch_size,
        adam: AdamHyper {
            learning_rate: raw.learning_rate,
            ..AdamHyper::default()
        },
    };

    Ok(ResolvedConfig {
        classes: raw.classes,
        strategy,
        mode,
        k: raw.k,
        min_freq: raw.min_freq,
        seeds,
        out_dir: raw.out_dir.clone(),
        tag,
        settings,
        raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_toml() -> &'static str {
        r#"
classes = 5
strategy = "length"
mode = "baby_steps"

[data.synthetic]
n_train = 50
n_dev = 10
n_test = 10
noise = 0.3
min_len = 2
max_len = 6
seed = 7
"#
    }

    #[test]
    fn defaults_and_seed_expansion() {
        let raw: ExperimentConfig = toml::from_str(minimal_toml()).unwrap();
        let resolved = resolve(raw, &Overrides::default()).unwrap();
        assert_eq!(resolved.k, 5);
        assert_eq!(resolved.settings.epochs_per_phase, 2);
        assert_eq!(resolved.settings.batch_size, 8);
        assert_eq!(resolved.seeds, vec![42, 43, 44, 45, 46]);
        assert_eq!(resolved.mode, Mode::BabySteps);
    }

    #[test]
    fn overrides_win_over_file_values() {
        let raw: ExperimentConfig = toml::from_str(minimal_toml()).unwrap();
        let overrides = Overrides {
            mode: Some("one_pass".into()),
            classes: Some(3),
            seed: Some(7),
            seeds: Some("1, 2,3".into()),
            epochs: Some(4),
            ..Default::default()
        };
        let resolved = resolve(raw, &overrides).unwrap();
        assert_eq!(resolved.mode, Mode::OnePass);
        assert_eq!(resolved.classes, 3);
        assert_eq!(resolved.seeds, vec![1, 2, 3]);
        assert_eq!(resolved.settings.epochs_per_phase, 4);
    }

    #[test]
    fn base_seed_expands_to_five_runs() {
        let raw: ExperimentConfig = toml::from_str(minimal_toml()).unwrap();
        let overrides = Overrides {
            seed: Some(100),
            ..Default::default()
        };
        let resolved = resolve(raw, &overrides).unwrap();
        assert_eq!(resolved.seeds, vec![100, 101, 102, 103, 104]);
    }

    #[test]
    fn invalid_enumerations_are_config_errors() {
        let raw: ExperimentConfig = toml::from_str(minimal_toml()).unwrap();
        let overrides = Overrides {
            mode: Some("sideways".into()),
            ..Default::default()
        };
        assert!(matches!(
            resolve(raw, &overrides),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn bad_architecture_is_caught_early() {
        let mut raw: ExperimentConfig = toml::from_str(minimal_toml()).unwrap();
        raw.model.embed_dim = 33;
        assert!(matches!(
            resolve(raw, &Overrides::default()),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn resolved_round_trips_through_toml() {
        let raw: ExperimentConfig = toml::from_str(minimal_toml()).unwrap();
        let resolved = resolve(raw, &Overrides::default()).unwrap();
        let text = resolved.to_toml();
        let again: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(again.seeds, Some(vec![42, 43, 44, 45, 46]));
        assert_eq!(again.mode, "baby_steps");
    }
}
