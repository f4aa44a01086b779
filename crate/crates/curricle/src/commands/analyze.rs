use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use curricle_core::analysis::{
    averaged_movement, forgetting_csv, forgetting_matrix_from_bits, matrix_csv,
    movement_all_heads, render_binary, render_diverging,
};
use curricle_core::data::{tokenize, Vocab};
use curricle_core::model::{decode_snapshot_expecting, ModelConfig, ModelParams};

use crate::config::{resolve, Overrides};
use crate::error::{CliError, CliResult};
use crate::fsio;
use crate::rundir::{parse_correctness_csv, RunManifest, RunPaths};

/// Produces the analysis artifacts of a finished run: per seed the
/// forgetting matrix (`analysis/forgetting.pgm` + `.csv`), and per
/// listed sentence the averaged movement heatmaps
/// (`movement_avg_i{2..k}.ppm` + `.csv`) computed from the per-phase
/// snapshots.
pub fn run(run_dir: &Path, sentences_file: Option<&Path>) -> CliResult<()> {
    if !run_dir.is_dir() {
        return Err(CliError::Runtime(anyhow!(
            "run directory {} does not exist",
            run_dir.display()
        )));
    }
    let paths = RunPaths::new(run_dir);
    let manifest = RunManifest::load(&paths)?;
    let cfg = resolve(manifest.config.clone(), &Overrides::default())?;

    let sentences: Vec<String> = match sentences_file {
        Some(path) => fsio::read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(String::from)
            .collect(),
        None => Vec::new(),
    };

    let vocab = Vocab::from_tsv(&fsio::read_to_string(&paths.vocab())?)
        .map_err(|e| CliError::Runtime(anyhow!("{e}")))?;

    for &seed in &cfg.seeds {
        analyze_seed(&paths, &cfg.model_config(vocab.size(), seed), seed, &vocab, &sentences)
            .map_err(CliError::Runtime)?;
    }
    println!(
        "analyzed {} seeds, {} sentences under {}",
        cfg.seeds.len(),
        sentences.len(),
        run_dir.display()
    );
    Ok(())
}

fn analyze_seed(
    paths: &RunPaths,
    model_config: &ModelConfig,
    seed: u64,
    vocab: &Vocab,
    sentences: &[String],
) -> Result<()> {
    let analysis_dir = paths.analysis_dir(seed);

    // forgetting matrix from the persisted correctness table
    let correctness = fsio::read_to_string(&paths.correctness(seed))?;
    let (test_ids, columns) = parse_correctness_csv(&correctness)?;
    let column_refs: Vec<&[bool]> = columns.iter().map(|c| c.as_slice()).collect();
    let matrix =
        forgetting_matrix_from_bits(&column_refs, &test_ids).map_err(|e| anyhow!("{e}"))?;
    let image = render_binary(&matrix.cells).map_err(|e| anyhow!("{e}"))?;
    fsio::write_bytes(&analysis_dir.join("forgetting.pgm"), &image.encode())?;
    fsio::write_string(&analysis_dir.join("forgetting.csv"), &forgetting_csv(&matrix))?;

    if sentences.is_empty() {
        return Ok(());
    }

    let k = columns.len();
    if k < 2 {
        bail!("movement analysis needs at least 2 phases, run has {k}");
    }
    let snapshots: Vec<ModelParams> = (1..=k)
        .map(|phase| load_snapshot(paths, model_config, seed, phase))
        .collect::<Result<Vec<_>>>()?;

    for (idx, sentence) in sentences.iter().enumerate() {
        let (token_ids, mask) = tokenize(sentence, vocab, model_config.max_len);
        let sentence_dir = analysis_dir.join(format!("sentence-{}", idx + 1));
        for i in 2..=k {
            let per_head =
                movement_all_heads(&snapshots[i - 2], &snapshots[i - 1], &token_ids, &mask)
                    .map_err(|e| anyhow!("sentence {}: {e}", idx + 1))?;
            let averaged = averaged_movement(&per_head).map_err(|e| anyhow!("{e}"))?;
            let heatmap = render_diverging(&averaged).map_err(|e| anyhow!("{e}"))?;
            fsio::write_bytes(
                &sentence_dir.join(format!("movement_avg_i{i}.ppm")),
                &heatmap.encode(),
            )?;
            fsio::write_string(
                &sentence_dir.join(format!("movement_avg_i{i}.csv")),
                &matrix_csv(&averaged).map_err(|e| anyhow!("{e}"))?,
            )?;
        }
    }
    Ok(())
}

fn load_snapshot(
    paths: &RunPaths,
    model_config: &ModelConfig,
    seed: u64,
    phase: usize,
) -> Result<ModelParams> {
    let path = paths.snapshot(seed, phase);
    if !path.exists() {
        bail!(
            "snapshot for phase {phase} of seed {seed} not found at {}",
            path.display()
        );
    }
    let bytes = fsio::read_bytes(&path)?;
    decode_snapshot_expecting(&bytes, model_config)
        .with_context(|| format!("decoding snapshot for phase {phase} of seed {seed}"))
}
