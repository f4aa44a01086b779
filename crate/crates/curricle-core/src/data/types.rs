use alloc::string::String;
use alloc::vec::Vec;

use super::vocab::{tokenize, Vocab};

/// Which split a dataset came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }
}

/// One labeled sentence.
///
/// `id` is the stable index from source-file order and survives label
/// collapsing, so analyses can refer to samples across dataset variants.
/// `token_ids`/`mask` are empty until the dataset is tokenized; once
/// filled, `token_ids[0]` is CLS and both vectors have equal length.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub id: u32,
    pub text: String,
    pub token_ids: Vec<u32>,
    pub mask: Vec<bool>,
    pub label: u32,
}

/// An ordered, immutable collection of samples with a fixed class count.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    pub samples: Vec<Sample>,
    pub num_classes: u32,
    pub split: Split,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.samples.iter().map(|s| s.id).collect()
    }

    /// Returns a copy with every sample tokenized against `vocab`,
    /// CLS-prefixed and truncated to `max_len`.
    pub fn tokenized(&self, vocab: &Vocab, max_len: usize) -> LabeledDataset {
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let (token_ids, mask) = tokenize(&s.text, vocab, max_len);
                Sample {
                    id: s.id,
                    text: s.text.clone(),
                    token_ids,
                    mask,
                    label: s.label,
                }
            })
            .collect();
        LabeledDataset {
            samples,
            num_classes: self.num_classes,
            split: self.split,
        }
    }

    /// Per-class sample counts, indexed by label.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut hist = alloc::vec![0usize; self.num_classes as usize];
        for s in &self.samples {
            hist[s.label as usize] += 1;
        }
        hist
    }
}
