use std::path::{Path, PathBuf};

use anyhow::Context;
use curricle_core::data::{collapse_labels, dataset_to_tsv, parse_tsv, LabeledDataset, Split};

use crate::error::{CliError, CliResult};
use crate::fsio;

/// Collapses 5-class TSVs into the requested SST-x variants, writing
/// `sst<t>.<split>.tsv` triples and printing per-class histograms.
/// Output is a pure function of the input files, so reruns are
/// byte-identical.
pub fn run(
    train: &Path,
    dev: &Path,
    test: &Path,
    targets: &[u32],
    out: &Path,
) -> CliResult<()> {
    if targets.is_empty() {
        return Err(CliError::config("at least one target class count is required"));
    }
    for &t in targets {
        if !(2..=5).contains(&t) {
            return Err(CliError::config(format!("targets must be 2..=5, got {t}")));
        }
    }

    let load = |path: &Path, split: Split| -> Result<LabeledDataset, CliError> {
        let content = fsio::read_to_string(path)?;
        parse_tsv(&content, split, 5)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(CliError::Runtime)
    };
    let splits = [
        (load(train, Split::Train)?, Split::Train),
        (load(dev, Split::Dev)?, Split::Dev),
        (load(test, Split::Test)?, Split::Test),
    ];

    for &target in targets {
        for (dataset, split) in &splits {
            let collapsed = collapse_labels(dataset, target)
                .map_err(|e| CliError::Runtime(anyhow::anyhow!("{e}")))?;
            let path = out_path(out, target, *split);
            fsio::write_string(&path, &dataset_to_tsv(&collapsed))?;
            let hist = collapsed.class_histogram();
            println!(
                "sst{target} {}: {} samples, per-class {:?} -> {}",
                split.name(),
                collapsed.len(),
                hist,
                path.display()
            );
        }
    }
    Ok(())
}

pub fn out_path(out: &Path, target: u32, split: Split) -> PathBuf {
    out.join(format!("sst{target}.{}.tsv", split.name()))
}
