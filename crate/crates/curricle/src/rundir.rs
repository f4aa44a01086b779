use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chrono::Utc;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::fsio;

/// Paths inside one run directory:
/// `<root>/seed-<s>/phase-<i>/snapshot`, per-seed `correctness.csv`,
/// plus `metrics.csv`, `vocab.tsv`, `config.toml`, and `manifest.json`
/// at the top.
#[derive(Clone, Debug)]
pub struct RunPaths {
    pub root: PathBuf,
}

impl RunPaths {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn seed_dir(&self, seed: u64) -> PathBuf {
        self.root.join(format!("seed-{seed}"))
    }

    pub fn phase_dir(&self, seed: u64, phase: usize) -> PathBuf {
        self.seed_dir(seed).join(format!("phase-{phase}"))
    }

    pub fn snapshot(&self, seed: u64, phase: usize) -> PathBuf {
        self.phase_dir(seed, phase).join("snapshot")
    }

    pub fn correctness(&self, seed: u64) -> PathBuf {
        self.seed_dir(seed).join("correctness.csv")
    }

    pub fn plan(&self, seed: u64) -> PathBuf {
        self.seed_dir(seed).join("plan.csv")
    }

    pub fn analysis_dir(&self, seed: u64) -> PathBuf {
        self.seed_dir(seed).join("analysis")
    }

    pub fn metrics(&self) -> PathBuf {
        self.root.join("metrics.csv")
    }

    pub fn vocab(&self) -> PathBuf {
        self.root.join("vocab.tsv")
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.toml")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    pub fn relative(&self, path: &Path) -> String {
        path.strip_prefix(&self.root)
            .unwrap_or(path)
            .to_string_lossy()
            .into_owned()
    }
}

/// Creates `<parent>/<UTC timestamp>-<tag>`, suffixing a counter when a
/// same-second directory already exists.
pub fn create_run_dir(parent: &Path, tag: &str) -> Result<RunPaths> {
    std::fs::create_dir_all(parent)
        .with_context(|| format!("creating output directory {}", parent.display()))?;
    let stamp = Utc::now().format("%Y%m%dT%H%M%SZ");
    let base = format!("{stamp}-{tag}");
    for attempt in 0..1000u32 {
        let name = if attempt == 0 {
            base.clone()
        } else {
            format!("{base}-{attempt}")
        };
        let candidate = parent.join(&name);
        match std::fs::create_dir(&candidate) {
            Ok(()) => return Ok(RunPaths::new(candidate)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => {
                return Err(e).with_context(|| format!("creating run dir {}", candidate.display()))
            }
        }
    }
    bail!("could not find a free run directory name under {}", parent.display());
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MetricRow {
    pub seed: u64,
    pub mode: String,
    pub phase: usize,
    pub train_seen: usize,
    pub dev_acc: f64,
    pub test_acc: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedTiming {
    pub seed: u64,
    pub secs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Timings {
    pub total_secs: f64,
    pub per_seed: Vec<SeedTiming>,
}

/// Everything needed to audit and re-aggregate a run without recompute.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub created_utc: String,
    pub config: ExperimentConfig,
    pub metrics: Vec<MetricRow>,
    pub files: Vec<FileEntry>,
    pub timings: Timings,
}

impl RunManifest {
    pub fn save(&self, paths: &RunPaths) -> Result<()> {
        let json = serde_json::to_string_pretty(self).context("serializing manifest")?;
        fsio::write_string(&paths.manifest(), &json)
    }

    pub fn load(paths: &RunPaths) -> Result<RunManifest> {
        let content = fsio::read_to_string(&paths.manifest())?;
        serde_json::from_str(&content)
            .with_context(|| format!("parsing {}", paths.manifest().display()))
    }

    /// Recomputes every inventoried digest; returns the mismatched or
    /// missing paths.
    pub fn verify_digests(&self, paths: &RunPaths) -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for entry in &self.files {
            let path = paths.root.join(&entry.path);
            if !path.exists() {
                bad.push(format!("{} (missing)", entry.path));
                continue;
            }
            let digest = fsio::sha256_hex(&path)?;
            if digest != entry.sha256 {
                bad.push(format!("{} (digest mismatch)", entry.path));
            }
        }
        Ok(bad)
    }
}

/// The `metrics.csv` contents: header plus one row per (seed, phase),
/// seeds in config order, phases ascending. Accuracies use shortest
/// round-trip formatting, so identical runs produce identical bytes.
pub fn metrics_csv(rows: &[MetricRow]) -> String {
    let mut out = String::from("seed,mode,phase,train_seen,dev_acc,test_acc\n");
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.seed, row.mode, row.phase, row.train_seen, row.dev_acc, row.test_acc
        )
        .expect("writing to string");
    }
    out
}

/// Parses `metrics.csv` back into rows.
pub fn parse_metrics_csv(content: &str) -> Result<Vec<MetricRow>> {
    let mut rows = Vec::new();
    let mut lines = content.lines();
    let header = lines.next().context("metrics.csv is empty")?;
    if header != "seed,mode,phase,train_seen,dev_acc,test_acc" {
        bail!("unexpected metrics.csv header: {header:?}");
    }
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            bail!("metrics.csv line {}: expected 6 fields", idx + 2);
        }
        rows.push(MetricRow {
            seed: fields[0].parse().context("seed")?,
            mode: fields[1].to_string(),
            phase: fields[2].parse().context("phase")?,
            train_seen: fields[3].parse().context("train_seen")?,
            dev_acc: fields[4].parse().context("dev_acc")?,
            test_acc: fields[5].parse().context("test_acc")?,
        });
    }
    Ok(rows)
}

/// Per-seed correctness table: `sample_id,phase_1..phase_k`, rows in
/// test-set order.
pub fn correctness_csv(test_ids: &[u32], per_phase: &[Vec<bool>]) -> String {
    let mut out = String::from("sample_id");
    for phase in 1..=per_phase.len() {
        let _ = write!(out, ",phase_{phase}");
    }
    out.push('\n');
    for (row, &id) in test_ids.iter().enumerate() {
        let _ = write!(out, "{id}");
        for column in per_phase {
            out.push_str(if column[row] { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

/// Parses a correctness table back into `(test_ids, per-phase columns)`.
pub fn parse_correctness_csv(content: &str) -> Result<(Vec<u32>, Vec<Vec<bool>>)> {
    let mut lines = content.lines();
    let header = lines.next().context("correctness.csv is empty")?;
    let k = header.split(',').count().saturating_sub(1);
    if k == 0 {
        bail!("correctness.csv header has no phase columns: {header:?}");
    }
    let mut ids = Vec::new();
    let mut columns: Vec<Vec<bool>> = vec![Vec::new(); k];
    for (idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != k + 1 {
            bail!("correctness.csv line {}: expected {} fields", idx + 2, k + 1);
        }
        ids.push(fields[0].parse().context("sample_id")?);
        for (c, &bit) in fields[1..].iter().enumerate() {
            columns[c].push(match bit {
                "1" => true,
                "0" => false,
                other => bail!("correctness.csv line {}: bad bit {other:?}", idx + 2),
            });
        }
    }
    Ok((ids, columns))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_round_trip() {
        let rows = vec![
            MetricRow {
                seed: 42,
                mode: "baby_steps".into(),
                phase: 1,
                train_seen: 200,
                dev_acc: 0.5,
                test_acc: 0.512,
            },
            MetricRow {
                seed: 42,
                mode: "baby_steps".into(),
                phase: 2,
                train_seen: 400,
                dev_acc: 0.55,
                test_acc: 0.6,
            },
        ];
        let csv = metrics_csv(&rows);
        assert_eq!(parse_metrics_csv(&csv).unwrap(), rows);
    }

    #[test]
    fn correctness_round_trip() {
        let ids = vec![3, 1, 9];
        let columns = vec![vec![true, false, true], vec![false, false, true]];
        let csv = correctness_csv(&ids, &columns);
        let (ids2, columns2) = parse_correctness_csv(&csv).unwrap();
        assert_eq!(ids, ids2);
        assert_eq!(columns, columns2);
    }

    #[test]
    fn run_dir_names_do_not_collide() {
        let tmp = tempfile::tempdir().unwrap();
        let a = create_run_dir(tmp.path(), "t").unwrap();
        let b = create_run_dir(tmp.path(), "t").unwrap();
        assert_ne!(a.root, b.root);
        assert!(a.root.exists() && b.root.exists());
    }
}
