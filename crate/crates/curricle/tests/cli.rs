//! End-to-end CLI behaviour: exit codes, error wording, artifact
//! cross-checks, and reproducibility of persisted outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use curricle::rundir::{parse_correctness_csv, parse_metrics_csv, RunPaths};
use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_curricle")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn curricle")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "curricle {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn synth_config(out_dir: &Path) -> String {
    format!(
        r#"classes = 4
strategy = "length"
mode = "baby_steps"
k = 3
epochs_per_phase = 1
batch_size = 4
out_dir = "{}"

[model]
embed_dim = 16
num_layers = 1
num_heads = 2
ffn_dim = 24
max_len = 9

[data.synthetic]
n_train = 120
n_dev = 30
n_test = 40
noise = 0.25
min_len = 2
max_len = 6
seed = 11
"#,
        out_dir.display()
    )
}

fn train_once(config: &Path, extra: &[&str]) -> PathBuf {
    let mut args = vec!["train", "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    let stdout = stdout_ok(&args);
    PathBuf::from(stdout.lines().next().unwrap())
}

#[test]
fn invalid_configs_exit_2_before_any_compute() {
    let tmp = TempDir::new().unwrap();
    // nonexistent config file
    let out = run(&["train", "--config", "/nonexistent/exp.toml"]);
    assert_eq!(out.status.code(), Some(2));

    // bad enumeration
    let cfg = write_config(tmp.path(), "exp.toml", &synth_config(tmp.path()));
    let out = run(&["train", "--config", cfg.to_str().unwrap(), "--mode", "diagonal"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diagonal"));

    // architecture violation (embed_dim not divisible by heads)
    let body = synth_config(tmp.path()).replace("embed_dim = 16", "embed_dim = 17");
    let cfg = write_config(tmp.path(), "bad.toml", &body);
    let out = run(&["train", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // unknown CLI flags are usage errors too
    let out = run(&["train", "--config", cfg.to_str().unwrap(), "--bogus"]);
    assert_eq!(out.status.code(), Some(2));

    // nothing was created
    assert!(std::fs::read_dir(tmp.path())
        .unwrap()
        .all(|e| !e.unwrap().file_type().unwrap().is_dir()));
}

#[test]
fn metrics_are_byte_identical_across_reruns() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "exp.toml", &synth_config(&tmp.path().join("runs")));
    let first = train_once(&cfg, &["--seeds", "3,4"]);
    let second = train_once(&cfg, &["--seeds", "3,4"]);
    assert_ne!(first, second, "distinct run directories");
    let bytes_a = std::fs::read(first.join("metrics.csv")).unwrap();
    let bytes_b = std::fs::read(second.join("metrics.csv")).unwrap();
    assert_eq!(bytes_a, bytes_b);
    // snapshots too: the whole run is a pure function of the config
    let snap_a = std::fs::read(RunPaths::new(&first).snapshot(3, 1)).unwrap();
    let snap_b = std::fs::read(RunPaths::new(&second).snapshot(3, 1)).unwrap();
    assert_eq!(snap_a, snap_b);
}

#[test]
fn analyze_cross_checks_and_snapshot_errors() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "exp.toml", &synth_config(&tmp.path().join("runs")));
    let run_dir = train_once(&cfg, &["--seeds", "5"]);
    let paths = RunPaths::new(&run_dir);

    stdout_ok(&["analyze", run_dir.to_str().unwrap()]);

    // forgetting CSV column means equal the metrics.csv accuracies
    let forgetting =
        std::fs::read_to_string(paths.analysis_dir(5).join("forgetting.csv")).unwrap();
    let rows: Vec<Vec<&str>> = forgetting.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let metrics = parse_metrics_csv(&std::fs::read_to_string(paths.metrics()).unwrap()).unwrap();
    for phase in 1..=3usize {
        let col_mean = rows
            .iter()
            .map(|r| r[1 + phase].parse::<f64>().unwrap())
            .sum::<f64>()
            / rows.len() as f64;
        let metric = metrics
            .iter()
            .find(|m| m.seed == 5 && m.phase == phase)
            .unwrap()
            .test_acc;
        assert!(
            (col_mean - metric).abs() < 1e-12,
            "phase {phase}: {col_mean} vs {metric}"
        );
    }

    // the graymap has one row per test sample and one column per phase
    let pgm = std::fs::read(paths.analysis_dir(5).join("forgetting.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n3 40\n255\n"));

    // correctness and forgetting agree on the number of misses
    let (ids, columns) =
        parse_correctness_csv(&std::fs::read_to_string(paths.correctness(5)).unwrap()).unwrap();
    assert_eq!(ids.len(), 40);
    assert_eq!(columns.len(), 3);

    // removing a snapshot produces an actionable error naming the phase
    std::fs::remove_file(paths.snapshot(5, 2)).unwrap();
    let sentences = tmp.path().join("sentences.txt");
    std::fs::write(&sentences, "a plain movie\n").unwrap();
    let out = run(&[
        "analyze",
        run_dir.to_str().unwrap(),
        "--sentences",
        sentences.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("phase 2"), "{stderr}");
}

#[test]
fn analyze_rejects_movement_on_single_phase_runs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "exp.toml", &synth_config(&tmp.path().join("runs")));
    let run_dir = train_once(&cfg, &["--seeds", "5", "--mode", "none"]);
    let sentences = tmp.path().join("sentences.txt");
    std::fs::write(&sentences, "a plain movie\n").unwrap();
    let out = run(&[
        "analyze",
        run_dir.to_str().unwrap(),
        "--sentences",
        sentences.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 2 phases"));
}

#[test]
fn report_refuses_digest_mismatches_and_lists_missing_dirs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "exp.toml", &synth_config(&tmp.path().join("runs")));
    let run_dir = train_once(&cfg, &["--seeds", "9"]);

    // missing directories are listed by name
    let ghost = tmp.path().join("no-such-run");
    let out = run(&[
        "report",
        run_dir.to_str().unwrap(),
        ghost.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-run"));

    // tampering with an inventoried artifact is refused
    let metrics_path = run_dir.join("metrics.csv");
    let mut content = std::fs::read_to_string(&metrics_path).unwrap();
    content.push_str("junk\n");
    std::fs::write(&metrics_path, content).unwrap();
    let out = run(&["report", run_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("metrics.csv"), "{stderr}");
    assert!(stderr.contains("integrity"), "{stderr}");
}

#[test]
fn score_writes_ranked_csv_and_dumps_50_50() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "exp.toml", &synth_config(&tmp.path().join("runs")));
    let scores_path = tmp.path().join("scores.csv");
    let stdout = stdout_ok(&[
        "score",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        scores_path.to_str().unwrap(),
        "--dump",
    ]);

    let content = std::fs::read_to_string(&scores_path).unwrap();
    let mut lines = content.lines();
    assert_eq!(lines.next().unwrap(), "sample_id,score,rank");
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    assert_eq!(rows.len(), 120);
    // ranks ascend with scores
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[2], (i + 1).to_string());
    }
    let scores: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(scores.windows(2).all(|w| w[0] <= w[1]));

    // the dump holds exactly 50 + 50 sentences for n >= 100
    let easiest: Vec<&str> = stdout
        .lines()
        .skip_while(|l| !l.starts_with("== easiest"))
        .skip(1)
        .take_while(|l| !l.starts_with("== hardest"))
        .collect();
    let hardest: Vec<&str> = stdout
        .lines()
        .skip_while(|l| !l.starts_with("== hardest"))
        .skip(1)
        .take_while(|l| !l.is_empty())
        .collect();
    assert_eq!(easiest.len(), 50, "{stdout}");
    assert_eq!(hardest.len(), 50);
}

#[test]
fn auxiliary_scores_stay_in_bounds() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "exp.toml", &synth_config(&tmp.path().join("runs")));
    let scores_path = tmp.path().join("aux-scores.csv");
    stdout_ok(&[
        "score",
        "--config",
        cfg.to_str().unwrap(),
        "--strategy",
        "auxiliary",
        "--out",
        scores_path.to_str().unwrap(),
    ]);
    let content = std::fs::read_to_string(&scores_path).unwrap();
    for line in content.lines().skip(1) {
        let score: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=2.0).contains(&score), "score {score} out of [0,2]");
    }
}

#[test]
fn prepare_rejects_bad_targets_and_reports_histograms() {
    let tmp = TempDir::new().unwrap();
    let tsv = tmp.path().join("five.tsv");
    std::fs::write(&tsv, "0\ta\n1\tb\n2\tc\n3\td\n4\te\n").unwrap();
    let out_dir = tmp.path().join("prep");

    let stdout = stdout_ok(&[
        "prepare",
        "--train",
        tsv.to_str().unwrap(),
        "--dev",
        tsv.to_str().unwrap(),
        "--test",
        tsv.to_str().unwrap(),
        "--classes",
        "2,3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(stdout.contains("sst2 train: 4 samples"), "{stdout}");
    assert!(stdout.contains("[2, 1, 2]"), "sst3 histogram: {stdout}");
    assert!(out_dir.join("sst2.dev.tsv").exists());
    assert!(out_dir.join("sst3.test.tsv").exists());

    let out = run(&[
        "prepare",
        "--train",
        tsv.to_str().unwrap(),
        "--dev",
        tsv.to_str().unwrap(),
        "--test",
        tsv.to_str().unwrap(),
        "--classes",
        "7",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn score_is_train_split_only() {
    // deleting dev/test files must not change scores
    let tmp = TempDir::new().unwrap();
    let train = tmp.path().join("t.tsv");
    let dev = tmp.path().join("d.tsv");
    let test = tmp.path().join("te.tsv");
    std::fs::write(&train, "0\tdull dull film\n1\tfine fine film\n2\tokay okay\n3\tgood good\n").unwrap();
    std::fs::write(&dev, "0\tdull\n").unwrap();
    std::fs::write(&test, "1\tfine\n").unwrap();
    let body = format!(
        r#"classes = 4
strategy = "length"
mode = "baby_steps"
k = 2
epochs_per_phase = 1
out_dir = "{}"

[model]
embed_dim = 8
num_layers = 1
num_heads = 2
ffn_dim = 8
max_len = 8

[data.files]
train = "{}"
dev = "{}"
test = "{}"
"#,
        tmp.path().display(),
        train.display(),
        dev.display(),
        test.display()
    );
    let cfg = write_config(tmp.path(), "exp.toml", &body);
    let out_a = tmp.path().join("a.csv");
    stdout_ok(&["score", "--config", cfg.to_str().unwrap(), "--out", out_a.to_str().unwrap()]);
    std::fs::remove_file(&dev).unwrap();
    std::fs::remove_file(&test).unwrap();
    let out_b = tmp.path().join("b.csv");
    stdout_ok(&["score", "--config", cfg.to_str().unwrap(), "--out", out_b.to_str().unwrap()]);
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );
}
