use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::anyhow;

use crate::error::{CliError, CliResult};
use crate::fsio;
use crate::rundir::{MetricRow, RunManifest, RunPaths};

/// Regenerates the comparison tables from run manifests alone: a
/// mode-comparison table (rows per classes/strategy, columns per pacing
/// regime) and a curriculum-effect table (with = baby_steps, without =
/// none, plus the difference). Refuses runs whose artifact digests no
/// longer match.
pub fn run(run_dirs: &[PathBuf], out: Option<PathBuf>) -> CliResult<()> {
    if run_dirs.is_empty() {
        return Err(CliError::config("at least one run directory is required"));
    }
    let missing: Vec<String> = run_dirs
        .iter()
        .filter(|d| !d.is_dir())
        .map(|d| d.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::Runtime(anyhow!(
            "missing run directories: {}",
            missing.join(", ")
        )));
    }

    let mut rows = Vec::new();
    for dir in run_dirs {
        let paths = RunPaths::new(dir);
        let manifest = RunManifest::load(&paths)?;
        let bad = manifest.verify_digests(&paths)?;
        if !bad.is_empty() {
            return Err(CliError::Runtime(anyhow!(
                "artifact integrity check failed in {}: {}",
                dir.display(),
                bad.join(", ")
            )));
        }
        rows.push(Summary::from_manifest(&manifest));
    }

    let report = build_report(&rows);
    print!("{}", report.text);
    let out = out.unwrap_or_else(|| PathBuf::from("."));
    let text_path = out.join("report.txt");
    let csv_path = out.join("report.csv");
    fsio::write_string(&text_path, &report.text)?;
    fsio::write_string(&csv_path, &report.csv)?;
    eprintln!("wrote {} and {}", text_path.display(), csv_path.display());
    Ok(())
}

/// One run directory reduced to its aggregate.
pub struct Summary {
    pub classes: u32,
    pub strategy: String,
    pub mode: String,
    /// Mean final-phase test accuracy over seeds.
    pub mean_final: f64,
    pub std_final: f64,
    pub seeds: usize,
}

impl Summary {
    pub fn from_manifest(manifest: &RunManifest) -> Summary {
        let finals = final_phase_accuracies(&manifest.metrics);
        let n = finals.len() as f64;
        let mean = finals.iter().sum::<f64>() / n;
        let var = finals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Summary {
            classes: manifest.config.classes,
            strategy: manifest.config.strategy.clone(),
            mode: manifest.config.mode.clone(),
            mean_final: mean,
            std_final: var.sqrt(),
            seeds: finals.len(),
        }
    }
}

/// Final-phase test accuracy of every seed in the metric rows.
pub fn final_phase_accuracies(metrics: &[MetricRow]) -> Vec<f64> {
    let mut best: BTreeMap<u64, (usize, f64)> = BTreeMap::new();
    for row in metrics {
        let entry = best.entry(row.seed).or_insert((row.phase, row.test_acc));
        if row.phase >= entry.0 {
            *entry = (row.phase, row.test_acc);
        }
    }
    best.values().map(|&(_, acc)| acc).collect()
}

pub struct Report {
    pub text: String,
    pub csv: String,
}

const MODE_COLUMNS: [&str; 4] = ["baby_steps", "one_pass", "individual", "none"];

/// Assembles both tables. Runs with the same (classes, strategy, mode)
/// are averaged together weighted by seed count; `none` runs apply to
/// every strategy row of their class count.
pub fn build_report(summaries: &[Summary]) -> Report {
    // cell means keyed by (classes, strategy, mode); none keyed per class
    let mut cells: BTreeMap<(u32, String, String), (f64, f64)> = BTreeMap::new();
    let mut none_by_class: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
    for s in summaries {
        if s.mode == "none" {
            merge(none_by_class.entry(s.classes).or_insert((0.0, 0.0)), s);
        } else {
            merge(
                cells
                    .entry((s.classes, s.strategy.clone(), s.mode.clone()))
                    .or_insert((0.0, 0.0)),
                s,
            );
        }
    }
    let mean_of = |acc: &(f64, f64)| acc.0 / acc.1;

    // row keys: (classes, strategy) from curriculum runs, plus classes
    // that only have a no-curriculum run
    let mut row_keys: Vec<(u32, String)> = cells.keys().map(|(c, s, _)| (*c, s.clone())).collect();
    for &classes in none_by_class.keys() {
        if !row_keys.iter().any(|(c, _)| *c == classes) {
            row_keys.push((classes, "-".to_string()));
        }
    }
    row_keys.sort();
    row_keys.dedup();

    let mut text = String::new();
    let _ = writeln!(text, "mode comparison (mean final test accuracy over seeds)");
    let _ = writeln!(
        text,
        "{:<8} {:<10} {:>11} {:>9} {:>11} {:>7}",
        "classes", "strategy", "baby_steps", "one_pass", "individual", "none"
    );
    for (classes, strategy) in &row_keys {
        let cell = |mode: &str| -> Option<f64> {
            if mode == "none" {
                none_by_class.get(classes).map(mean_of)
            } else {
                cells
                    .get(&(*classes, strategy.clone(), mode.to_string()))
                    .map(mean_of)
            }
        };
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            text,
            "{:<8} {:<10} {:>11} {:>9} {:>11} {:>7}",
            classes,
            strategy,
            fmt(cell("baby_steps")),
            fmt(cell("one_pass")),
            fmt(cell("individual")),
            fmt(cell("none")),
        );
    }
    let _ = writeln!(text);
    let _ = writeln!(
        text,
        "curriculum effect by class count (with = baby_steps, without = none)"
    );
    let _ = writeln!(
        text,
        "{:<8} {:<10} {:>9} {:>9} {:>11}",
        "classes", "strategy", "with", "without", "difference"
    );
    let mut csv = String::from("classes,strategy,baby_steps,one_pass,individual,none,difference\n");
    for (classes, strategy) in &row_keys {
        let with = cells
            .get(&(*classes, strategy.clone(), "baby_steps".to_string()))
            .map(mean_of);
        let without = none_by_class.get(classes).map(mean_of);
        let difference = match (with, without) {
            (Some(w), Some(wo)) => Some(w - wo),
            _ => None,
        };
        if let Some(diff) = difference {
            let _ = writeln!(
                text,
                "{:<8} {:<10} {:>9.4} {:>9.4} {:>+11.4}",
                classes,
                strategy,
                with.unwrap(),
                without.unwrap(),
                diff
            );
        }

        let cell_csv = |mode: &str| -> String {
            let v = if mode == "none" {
                none_by_class.get(classes).map(mean_of)
            } else {
                cells
                    .get(&(*classes, strategy.clone(), mode.to_string()))
                    .map(mean_of)
            };
            v.map(|x| format!("{x}")).unwrap_or_default()
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            classes,
            strategy,
            cell_csv(MODE_COLUMNS[0]),
            cell_csv(MODE_COLUMNS[1]),
            cell_csv(MODE_COLUMNS[2]),
            cell_csv(MODE_COLUMNS[3]),
            difference.map(|d| format!("{d}")).unwrap_or_default(),
        );
    }

    Report { text, csv }
}

fn merge(acc: &mut (f64, f64), s: &Summary) {
    acc.0 += s.mean_final * s.seeds as f64;
    acc.1 += s.seeds as f64;
}

/// Convenience for tests and callers that only need the aggregate text.
pub fn report_for_dirs(run_dirs: &[&Path]) -> CliResult<Report> {
    let mut rows = Vec::new();
    for dir in run_dirs {
        let paths = RunPaths::new(*dir);
        let manifest = RunManifest::load(&paths)?;
        rows.push(Summary::from_manifest(&manifest));
    }
    Ok(build_report(&rows))
}
