use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::error::CurriculumError;
use super::plan::CurriculumPlan;
use crate::data::LabeledDataset;
use crate::model::{evaluate, init_model, train_epochs, ModelConfig, ModelParams};
use crate::numerics::{AdamHyper, OptimizerState};
use crate::seed::derive_seed;

/// The pacing regime under which phases are trained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Phase `i` trains on the cumulative union `D_1 ∪ … ∪ D_i`,
    /// continuing weights.
    BabySteps,
    /// Phase `i` trains on `D_i` only, continuing weights.
    OnePass,
    /// Phase `i` re-initializes weights from the seed, then trains on
    /// `D_i` only. A diagnostic, not a curriculum.
    Individual,
    /// A single phase over the full train set for `E·k` epochs.
    NoCurriculum,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::BabySteps => "baby_steps",
            Mode::OnePass => "one_pass",
            Mode::Individual => "individual",
            Mode::NoCurriculum => "none",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CurriculumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baby_steps" => Ok(Mode::BabySteps),
            "one_pass" => Ok(Mode::OnePass),
            "individual" => Ok(Mode::Individual),
            "none" => Ok(Mode::NoCurriculum),
            other => Err(CurriculumError::UnknownMode(String::from(other))),
        }
    }
}

/// Training-loop knobs shared by every mode and the auxiliary scorer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainSettings {
    pub epochs_per_phase: usize,
    pub batch_size: usize,
    pub adam: AdamHyper,
}

impl Default for TrainSettings {
    fn default() -> Self {
        Self {
            epochs_per_phase: 2,
            batch_size: 8,
            adam: AdamHyper::default(),
        }
    }
}

/// Seeds of one run: `init` drives weight initialization, `shuffle` is
/// the base of the per-phase shuffle streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunSeeds {
    pub init: u64,
    pub shuffle: u64,
}

/// Everything recorded at the end of one training phase.
#[derive(Clone, Debug)]
pub struct PhaseResult {
    /// 1-based phase index.
    pub phase: usize,
    /// Parameter snapshot taken after this phase's training.
    pub params: ModelParams,
    /// Number of distinct samples this phase trained on.
    pub train_seen: usize,
    pub dev_accuracy: f64,
    pub test_accuracy: f64,
    /// Per-sample test correctness, in test-set order.
    pub test_correct: Vec<bool>,
    /// Exact multiset of sample ids consumed, in consumption order.
    pub consumed: Vec<u32>,
}

fn index_by_id(train: &LabeledDataset) -> BTreeMap<u32, usize> {
    train
        .samples
        .iter()
        .enumerate()
        .map(|(pos, s)| (s.id, pos))
        .collect()
}

fn subset(
    train: &LabeledDataset,
    ids: &[u32],
    by_id: &BTreeMap<u32, usize>,
) -> Result<LabeledDataset, CurriculumError> {
    let samples = ids
        .iter()
        .map(|id| {
            by_id
                .get(id)
                .map(|&pos| train.samples[pos].clone())
                .ok_or_else(|| CurriculumError::PlanMismatch {
                    reason: format!("sample id {id} is not in the train set"),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LabeledDataset {
        samples,
        num_classes: train.num_classes,
        split: train.split,
    })
}

fn check_plan(plan: &CurriculumPlan, train: &LabeledDataset) -> Result<(), CurriculumError> {
    let mut seen = alloc::collections::BTreeSet::new();
    for bucket in &plan.buckets {
        for &id in bucket {
            if !seen.insert(id) {
                return Err(CurriculumError::PlanMismatch {
                    reason: format!("sample id {id} appears in two buckets"),
                });
            }
        }
    }
    let train_ids: alloc::collections::BTreeSet<u32> = train.samples.iter().map(|s| s.id).collect();
    if seen != train_ids {
        return Err(CurriculumError::PlanMismatch {
            reason: format!(
                "plan covers {} ids, train set has {}",
                seen.len(),
                train_ids.len()
            ),
        });
    }
    Ok(())
}

/// Runs one curriculum under `mode`, evaluating on test and dev and
/// snapshotting parameters after every phase.
///
/// Weight initialization comes from `seeds.init`; phase `i` shuffles with
/// the stream `derive_seed(seeds.shuffle, i)`, so a phase's sample order
/// never depends on other phases' bucket contents.
#[allow(clippy::too_many_arguments)]
pub fn run_curriculum(
    plan: &CurriculumPlan,
    mode: Mode,
    train: &LabeledDataset,
    dev: &LabeledDataset,
    test: &LabeledDataset,
    config: &ModelConfig,
    settings: &TrainSettings,
    seeds: &RunSeeds,
) -> Result<Vec<PhaseResult>, CurriculumError> {
    check_plan(plan, train)?;
    let by_id = index_by_id(train);
    let mut init_config = config.clone();
    init_config.seed = seeds.init;

    let phase_shuffle = |phase: usize| derive_seed(seeds.shuffle, phase as u64);
    let epochs = settings.epochs_per_phase;

    let mut results = Vec::new();
    match mode {
        Mode::NoCurriculum => {
            // one phase over the whole set, same sample order as the
            // cumulative union so k=1 coincides with Baby Steps
            let ids = plan.cumulative_ids(plan.k);
            let data = subset(train, &ids, &by_id)?;
            let params = init_model(&init_config)?;
            let mut opt = OptimizerState::new(settings.adam, params.tensors());
            let outcome = train_epochs(
                params,
                &data,
                epochs * plan.k,
                &mut opt,
                settings.batch_size,
                phase_shuffle(1),
            )?;
            results.push(finish_phase(1, outcome.params, data.len(), outcome.consumed, dev, test)?);
        }
        Mode::BabySteps | Mode::OnePass => {
            let mut params = init_model(&init_config)?;
            let mut opt = OptimizerState::new(settings.adam, params.tensors());
            for phase in 1..=plan.k {
                let ids = match mode {
                    Mode::BabySteps => plan.cumulative_ids(phase),
                    _ => plan.buckets[phase - 1].clone(),
                };
                let data = subset(train, &ids, &by_id)?;
                let outcome = train_epochs(
                    params,
                    &data,
                    epochs,
                    &mut opt,
                    settings.batch_size,
                    phase_shuffle(phase),
                )?;
                params = outcome.params;
                results.push(finish_phase(
                    phase,
                    params.clone(),
                    data.len(),
                    outcome.consumed,
                    dev,
                    test,
                )?);
            }
        }
        Mode::Individual => {
            for phase in 1..=plan.k {
                let ids = plan.buckets[phase - 1].clone();
                let data = subset(train, &ids, &by_id)?;
                let params = init_model(&init_config)?;
                let mut opt = OptimizerState::new(settings.adam, params.tensors());
                let outcome = train_epochs(
                    params,
                    &data,
                    epochs,
                    &mut opt,
                    settings.batch_size,
                    phase_shuffle(phase),
                )?;
                results.push(finish_phase(
                    phase,
                    outcome.params,
                    data.len(),
                    outcome.consumed,
                    dev,
                    test,
                )?);
            }
        }
    }
    Ok(results)
}

fn finish_phase(
    phase: usize,
    params: ModelParams,
    train_seen: usize,
    consumed: Vec<u32>,
    dev: &LabeledDataset,
    test: &LabeledDataset,
) -> Result<PhaseResult, CurriculumError> {
    let dev_eval = evaluate(&params, dev)?;
    let test_eval = evaluate(&params, test)?;
    Ok(PhaseResult {
        phase,
        params,
        train_seen,
        dev_accuracy: dev_eval.accuracy,
        test_accuracy: test_eval.accuracy,
        test_correct: test_eval.correct,
        consumed,
    })
}
