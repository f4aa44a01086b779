use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::error::DataError;
use super::types::{LabeledDataset, Sample, Split};
use crate::math;

// One signal lexicon per class (sentiment-flavoured, but the classes are
// interchangeable) plus shared neutral filler. Lexicons are disjoint so a
// sample's signal-token counts are unambiguous.
const CLASS_LEXICONS: [&[&str]; 5] = [
    &["dreadful", "abysmal", "unwatchable", "atrocious"],
    &["boring", "weak", "flawed", "tedious"],
    &["plain", "ordinary", "moderate", "unremarkable"],
    &["pleasant", "solid", "engaging", "likable"],
    &["superb", "magnificent", "dazzling", "sublime"],
];

const FILLER: &[&str] = &[
    "the", "a", "an", "movie", "film", "plot", "it", "was", "of", "and", "with", "about", "scene",
    "story", "in", "this",
];

/// Signal lexicon of one class.
pub fn synth_class_lexicon(class: u32) -> &'static [&'static str] {
    CLASS_LEXICONS[class as usize]
}

/// Neutral filler lexicon shared by all classes.
pub fn synth_filler() -> &'static [&'static str] {
    FILLER
}

/// Generator parameters for a synthetic corpus.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthSpec {
    pub n: usize,
    pub num_classes: u32,
    /// Fraction of samples whose planted signal-token majority
    /// contradicts the label; these are the hard samples.
    pub noise: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

/// Builds a deterministic synthetic corpus: each sentence is neutral
/// filler plus planted signal tokens. Clean samples plant only tokens of
/// their own class; noisy samples plant only tokens of one other class,
/// so their signal majority always contradicts the label and carries no
/// side channel back to it.
pub fn synth_dataset(spec: &SynthSpec, split: Split) -> Result<LabeledDataset, DataError> {
    validate(spec)?;
    let c = spec.num_classes;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // exact noisy count, assigned to a seeded random subset
    let noisy_count = (math::round(spec.noise * spec.n as f64) as usize).min(spec.n);
    let mut order: Vec<usize> = (0..spec.n).collect();
    order.shuffle(&mut rng);
    let mut noisy = alloc::vec![false; spec.n];
    for &idx in order.iter().take(noisy_count) {
        noisy[idx] = true;
    }

    let mut samples = Vec::with_capacity(spec.n);
    for (i, &contradicted) in noisy.iter().enumerate() {
        let label = rng.random_range(0..c);
        let len = rng.random_range(spec.min_len..=spec.max_len);
        let mut words: Vec<&'static str> = Vec::with_capacity(len);

        let source = if contradicted {
            (label + 1 + rng.random_range(0..c - 1)) % c
        } else {
            label
        };
        let lexicon = CLASS_LEXICONS[source as usize];
        let plant = if len >= 2 { 2 } else { 1 };
        for _ in 0..plant {
            words.push(lexicon[rng.random_range(0..lexicon.len())]);
        }

        while words.len() < len {
            words.push(FILLER[rng.random_range(0..FILLER.len())]);
        }
        words.shuffle(&mut rng);

        let text = words.join(" ");
        samples.push(Sample {
            id: i as u32,
            text,
            token_ids: Vec::new(),
            mask: Vec::new(),
            label,
        });
    }

    Ok(LabeledDataset {
        samples,
        num_classes: c,
        split,
    })
}

fn validate(spec: &SynthSpec) -> Result<(), DataError> {
    let fail = |reason: String| Err(DataError::BadSynthSpec { reason });
    if spec.n == 0 {
        return fail("n must be positive".to_string());
    }
    if !(2..=5).contains(&spec.num_classes) {
        return fail(format!("num_classes must be 2..=5, got {}", spec.num_classes));
    }
    if !(0.0..=1.0).contains(&spec.noise) {
        return fail(format!("noise must lie in [0, 1], got {}", spec.noise));
    }
    if spec.min_len == 0 || spec.min_len > spec.max_len {
        return fail(format!(
            "length range must satisfy 1 <= min <= max, got {}..={}",
            spec.min_len, spec.max_len
        ));
    }
    Ok(())
}
