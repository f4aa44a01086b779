//! Dataset ingestion and preparation: TSV parsing, vocabulary and
//! tokenization, meta-dataset generation by label collapsing, and a
//! synthetic desk-scale corpus generator.

mod collapse;
mod error;
mod synth;
mod tsv;
mod types;
mod vocab;

pub use collapse::{collapse_labels, CollapseSpec};
pub use error::DataError;
pub use synth::{synth_dataset, synth_class_lexicon, synth_filler, SynthSpec};
pub use tsv::{dataset_to_tsv, parse_tsv};
pub use types::{LabeledDataset, Sample, Split};
pub use vocab::{pad_to, split_tokens, tokenize, Vocab, CLS_ID, PAD_ID, UNK_ID};
