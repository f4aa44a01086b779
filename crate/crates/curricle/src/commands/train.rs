use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use chrono::Utc;
use curricle_core::curriculum::{aggregate_runs, run_single_seed, ExperimentSpec, SeedRun};
use curricle_core::model::encode_snapshot;

use crate::config::{load_config, Overrides, ResolvedConfig};
use crate::error::{CliError, CliResult};
use crate::fsio;
use crate::rundir::{
    correctness_csv, create_run_dir, metrics_csv, FileEntry, MetricRow, RunManifest, RunPaths,
    SeedTiming, Timings,
};

/// Runs the configured experiment once per seed and persists a
/// reproducible run directory. Prints the run directory path on the
/// first stdout line.
pub fn run(config_path: &Path, overrides: &Overrides) -> CliResult<()> {
    let cfg = load_config(config_path, overrides)?;
    // fail before any compute if the output location is unusable
    let paths = create_run_dir(&cfg.out_dir, &cfg.tag)?;
    let outcome = execute(&cfg, &paths).map_err(CliError::Runtime)?;

    println!("{}", paths.root.display());
    println!(
        "mode={} strategy={} classes={} k={} seeds={:?}",
        cfg.mode, cfg.strategy, cfg.classes, cfg.k, cfg.seeds
    );
    println!(
        "final test accuracy: mean {:.4} +/- {:.4} over {} seeds",
        outcome.final_mean,
        outcome.final_std,
        cfg.seeds.len()
    );
    Ok(())
}

struct TrainOutput {
    final_mean: f64,
    final_std: f64,
}

fn execute(cfg: &ResolvedConfig, paths: &RunPaths) -> Result<TrainOutput> {
    let started = Instant::now();
    let data = super::load_datasets(cfg)?;

    fsio::write_string(&paths.config(), &cfg.to_toml())?;
    fsio::write_string(&paths.vocab(), &data.vocab.to_tsv())?;

    let spec = ExperimentSpec {
        strategy: cfg.strategy,
        mode: cfg.mode,
        k: cfg.k,
        model: cfg.model_config(data.vocab.size(), 0),
        settings: cfg.settings,
    };

    // seeds are independent workers; results are persisted in seed order
    let outcomes: Vec<(SeedRun, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .seeds
            .iter()
            .map(|&seed| {
                let spec = &spec;
                let data = &data;
                scope.spawn(move || {
                    let t0 = Instant::now();
                    let run = run_single_seed(spec, &data.train, &data.dev, &data.test, seed)
                        .map_err(|e| anyhow::anyhow!("seed {seed}: {e}"))?;
                    Ok::<(SeedRun, f64), anyhow::Error>((run, t0.elapsed().as_secs_f64()))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("seed worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let (runs, timings): (Vec<SeedRun>, Vec<f64>) = outcomes.into_iter().unzip();

    let mut metric_rows = Vec::new();
    let mut files: Vec<(std::path::PathBuf, Vec<u8>)> = Vec::new();
    let test_ids = data.test.ids();

    for seed_run in &runs {
        let seed = seed_run.seed;
        let per_phase: Vec<Vec<bool>> = seed_run
            .phases
            .iter()
            .map(|p| p.test_correct.clone())
            .collect();
        files.push((
            paths.correctness(seed),
            correctness_csv(&test_ids, &per_phase).into_bytes(),
        ));
        files.push((
            paths.plan(seed),
            curricle_core::curriculum::plan_csv(&seed_run.plan).into_bytes(),
        ));
        for phase in &seed_run.phases {
            files.push((paths.snapshot(seed, phase.phase), encode_snapshot(&phase.params)));
            metric_rows.push(MetricRow {
                seed,
                mode: cfg.mode.name().to_string(),
                phase: phase.phase,
                train_seen: phase.train_seen,
                dev_acc: phase.dev_accuracy,
                test_acc: phase.test_accuracy,
            });
        }
    }

    for (path, bytes) in &files {
        fsio::write_bytes(path, bytes)?;
    }
    fsio::write_string(&paths.metrics(), &metrics_csv(&metric_rows))?;

    // inventory with digests, manifest written last by the coordinator
    let mut inventory = vec![paths.config(), paths.vocab(), paths.metrics()];
    inventory.extend(files.iter().map(|(p, _)| p.clone()));
    let file_entries = inventory
        .iter()
        .map(|path| {
            Ok(FileEntry {
                path: paths.relative(path),
                sha256: fsio::sha256_hex(path)?,
                bytes: std::fs::metadata(path)
                    .with_context(|| format!("stat {}", path.display()))?
                    .len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let aggregate = aggregate_runs(&runs).map_err(|e| anyhow::anyhow!("{e}"))?;

    let manifest = RunManifest {
        created_utc: Utc::now().to_rfc3339(),
        config: {
            let mut raw = cfg.raw.clone();
            raw.seed = None;
            raw.seeds = Some(cfg.seeds.clone());
            raw.mode = cfg.mode.name().to_string();
            raw.strategy = cfg.strategy.name().to_string();
            raw.tag = Some(cfg.tag.clone());
            raw
        },
        metrics: metric_rows,
        files: file_entries,
        timings: Timings {
            total_secs: started.elapsed().as_secs_f64(),
            per_seed: runs
                .iter()
                .zip(timings.iter())
                .map(|(r, &secs)| SeedTiming { seed: r.seed, secs })
                .collect(),
        },
    };
    manifest.save(paths)?;

    Ok(TrainOutput {
        final_mean: aggregate.final_mean,
        final_std: aggregate.final_std,
    })
}
