use alloc::vec::Vec;

use super::error::CurriculumError;
use super::plan::partition_phases;
use super::runner::{run_curriculum, Mode, PhaseResult, RunSeeds, TrainSettings};
use super::score::{score_auxiliary, score_sentence_length, Strategy};
use crate::data::LabeledDataset;
use crate::math;
use crate::model::ModelConfig;
use crate::seed::derive_seed;

/// One experiment: strategy, mode, phase count and training knobs. The
/// model config's own `seed` field is ignored; each run derives all of
/// its streams from its run seed.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub strategy: Strategy,
    pub mode: Mode,
    pub k: usize,
    pub model: ModelConfig,
    pub settings: TrainSettings,
}

/// All phases of one seeded run, plus the plan it trained under.
pub struct SeedRun {
    pub seed: u64,
    pub plan: super::plan::CurriculumPlan,
    pub phases: Vec<PhaseResult>,
}

/// Mean and population standard deviation of test accuracy, per phase
/// and for the final phase.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicateOutcome {
    pub per_phase_mean: Vec<f64>,
    pub per_phase_std: Vec<f64>,
    pub final_mean: f64,
    pub final_std: f64,
}

/// Runs the complete pipeline (scoring, partitioning, curriculum) for a
/// single seed. The auxiliary scorer re-trains per seed; same
/// hyperparameters as a no-curriculum run (`E·k` epochs).
pub fn run_single_seed(
    spec: &ExperimentSpec,
    train: &LabeledDataset,
    dev: &LabeledDataset,
    test: &LabeledDataset,
    seed: u64,
) -> Result<SeedRun, CurriculumError> {
    let scores = match spec.strategy {
        Strategy::SentenceLength => score_sentence_length(train)?,
        Strategy::Auxiliary => score_auxiliary(
            train,
            &spec.model,
            spec.settings.batch_size,
            spec.settings.epochs_per_phase * spec.k,
            spec.settings.adam,
            derive_seed(seed, super::STREAM_AUX),
        )?,
    };
    let plan = partition_phases(&scores, spec.k, spec.strategy)?;
    let seeds = RunSeeds {
        init: seed,
        shuffle: derive_seed(seed, super::STREAM_SHUFFLE),
    };
    let phases = run_curriculum(
        &plan,
        spec.mode,
        train,
        dev,
        test,
        &spec.model,
        &spec.settings,
        &seeds,
    )?;
    Ok(SeedRun { seed, plan, phases })
}

/// Runs the experiment once per seed and aggregates test accuracy.
pub fn run_replicated(
    spec: &ExperimentSpec,
    train: &LabeledDataset,
    dev: &LabeledDataset,
    test: &LabeledDataset,
    seeds: &[u64],
) -> Result<(Vec<SeedRun>, ReplicateOutcome), CurriculumError> {
    if seeds.is_empty() {
        return Err(CurriculumError::NoSeeds);
    }
    let runs = seeds
        .iter()
        .map(|&s| run_single_seed(spec, train, dev, test, s))
        .collect::<Result<Vec<_>, _>>()?;
    let outcome = aggregate_runs(&runs)?;
    Ok((runs, outcome))
}

/// Mean ± population stddev of per-phase and final-phase test accuracy
/// over runs. All runs must have the same phase count.
pub fn aggregate_runs(runs: &[SeedRun]) -> Result<ReplicateOutcome, CurriculumError> {
    if runs.is_empty() {
        return Err(CurriculumError::NoSeeds);
    }
    let phases = runs[0].phases.len();
    if let Some(bad) = runs.iter().find(|r| r.phases.len() != phases) {
        return Err(CurriculumError::PlanMismatch {
            reason: alloc::format!(
                "run with seed {} has {} phases, expected {phases}",
                bad.seed,
                bad.phases.len()
            ),
        });
    }
    let mut per_phase_mean = Vec::with_capacity(phases);
    let mut per_phase_std = Vec::with_capacity(phases);
    for p in 0..phases {
        let values: Vec<f64> = runs.iter().map(|r| r.phases[p].test_accuracy).collect();
        let (mean, std) = mean_std(&values);
        per_phase_mean.push(mean);
        per_phase_std.push(std);
    }
    let finals: Vec<f64> = runs
        .iter()
        .map(|r| r.phases.last().expect("phases non-empty").test_accuracy)
        .collect();
    let (final_mean, final_std) = mean_std(&finals);
    Ok(ReplicateOutcome {
        per_phase_mean,
        per_phase_std,
        final_mean,
        final_std,
    })
}

/// Mean and population standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mut mean = 0.0;
    for &v in values {
        mean += v;
    }
    mean /= n;
    let mut var = 0.0;
    for &v in values {
        var += (v - mean) * (v - mean);
    }
    (mean, math::sqrt(var / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synth_dataset, Split, SynthSpec, Vocab};

    #[test]
    fn mean_and_std_basics() {
        let (mean, std) = mean_std(&[0.5, 0.7]);
        assert!((mean - 0.6).abs() < 1e-15);
        assert!((std - 0.1).abs() < 1e-12);
        let (_, zero) = mean_std(&[0.4; 5]);
        assert_eq!(zero, 0.0);
    }

    #[test]
    fn identical_seeds_have_zero_stddev_and_match_recomputation() {
        let spec_data = |n, seed| SynthSpec {
            n,
            num_classes: 2,
            noise: 0.2,
            min_len: 2,
            max_len: 5,
            seed,
        };
        let raw_train = synth_dataset(&spec_data(20, 1), Split::Train).unwrap();
        let raw_dev = synth_dataset(&spec_data(8, 2), Split::Dev).unwrap();
        let raw_test = synth_dataset(&spec_data(8, 3), Split::Test).unwrap();
        let vocab = Vocab::build(&raw_train, 1);
        let train = raw_train.tokenized(&vocab, 8);
        let dev = raw_dev.tokenized(&vocab, 8);
        let test = raw_test.tokenized(&vocab, 8);

        let spec = ExperimentSpec {
            strategy: Strategy::SentenceLength,
            mode: Mode::OnePass,
            k: 2,
            model: ModelConfig {
                vocab_size: vocab.size(),
                embed_dim: 8,
                num_layers: 1,
                num_heads: 2,
                ffn_dim: 8,
                max_len: 8,
                num_classes: 2,
                seed: 0,
            },
            settings: TrainSettings {
                epochs_per_phase: 1,
                batch_size: 4,
                adam: Default::default(),
            },
        };
        let (runs, outcome) = run_replicated(&spec, &train, &dev, &test, &[7, 7, 7]).unwrap();
        assert_eq!(outcome.final_std, 0.0);
        assert!(outcome.per_phase_std.iter().all(|&s| s == 0.0));

        // recomputing the aggregate from the persisted per-run metrics
        // gives the same numbers
        let manual: Vec<f64> = runs
            .iter()
            .map(|r| r.phases.last().unwrap().test_accuracy)
            .collect();
        let (mean, std) = mean_std(&manual);
        assert_eq!(mean, outcome.final_mean);
        assert_eq!(std, outcome.final_std);
    }

    #[test]
    fn empty_seed_list_is_rejected() {
        assert!(matches!(aggregate_runs(&[]), Err(CurriculumError::NoSeeds)));
    }
}
