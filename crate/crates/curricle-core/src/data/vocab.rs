use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::error::DataError;
use super::types::LabeledDataset;

/// Reserved id of the classification token prepended to every sequence.
pub const CLS_ID: u32 = 0;
/// Reserved id of the padding token.
pub const PAD_ID: u32 = 1;
/// Reserved id for out-of-vocabulary tokens.
pub const UNK_ID: u32 = 2;

const RESERVED: [(&str, u32); 3] = [("<cls>", CLS_ID), ("<pad>", PAD_ID), ("<unk>", UNK_ID)];

/// Token → id map with dense ids. Ids 0..=2 are reserved for CLS, PAD
/// and UNK and are never reassigned; real tokens start at 3 and are
/// assigned in lexicographic order, which makes vocabularies a pure
/// function of the training text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocab {
    ids: BTreeMap<String, u32>,
}

impl Vocab {
    /// Builds the vocabulary from the training split only. Tokens seen
    /// fewer than `min_freq` times map to UNK.
    pub fn build(train: &LabeledDataset, min_freq: usize) -> Vocab {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for sample in &train.samples {
            for token in split_tokens(&sample.text) {
                *counts.entry(token).or_insert(0) += 1;
            }
        }
        let mut ids = BTreeMap::new();
        let mut next = RESERVED.len() as u32;
        for (token, count) in counts {
            if count >= min_freq {
                ids.insert(token, next);
                next += 1;
            }
        }
        Vocab { ids }
    }

    /// Id for a (already normalized) token; UNK when absent.
    pub fn id_of(&self, token: &str) -> u32 {
        self.ids.get(token).copied().unwrap_or(UNK_ID)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    /// Total id space, reserved ids included.
    pub fn size(&self) -> usize {
        RESERVED.len() + self.ids.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, u32)> {
        self.ids.iter().map(|(t, &i)| (t.as_str(), i))
    }

    /// `token<TAB>id` lines in id order, reserved rows first.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (name, id) in RESERVED {
            out.push_str(name);
            out.push('\t');
            out.push_str(&id.to_string());
            out.push('\n');
        }
        for (token, id) in self.ids.iter() {
            out.push_str(token);
            out.push('\t');
            out.push_str(&id.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(content: &str) -> Result<Vocab, DataError> {
        let mut ids = BTreeMap::new();
        let mut expected = 0u32;
        for (lineno, line) in content.lines().enumerate() {
            let (token, id_str) = line.split_once('\t').ok_or_else(|| DataError::BadVocab {
                reason: format!("line {}: missing tab", lineno + 1),
            })?;
            let id: u32 = id_str.parse().map_err(|_| DataError::BadVocab {
                reason: format!("line {}: bad id {id_str:?}", lineno + 1),
            })?;
            if id != expected {
                return Err(DataError::BadVocab {
                    reason: format!("line {}: ids must be dense, expected {expected}", lineno + 1),
                });
            }
            if expected < RESERVED.len() as u32 {
                let (name, _) = RESERVED[expected as usize];
                if token != name {
                    return Err(DataError::BadVocab {
                        reason: format!("line {}: expected reserved token {name}", lineno + 1),
                    });
                }
            } else {
                ids.insert(token.to_string(), id);
            }
            expected += 1;
        }
        if expected < RESERVED.len() as u32 {
            return Err(DataError::BadVocab {
                reason: "missing reserved token rows".to_string(),
            });
        }
        Ok(Vocab { ids })
    }
}

/// Lowercases and splits on whitespace and punctuation boundaries: a
/// token is a maximal alphanumeric run or a single other non-space
/// character.
pub fn split_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for low in ch.to_lowercase() {
                current.push(low);
            }
        } else {
            if !current.is_empty() {
                tokens.push(core::mem::take(&mut current));
            }
            if !ch.is_whitespace() {
                let mut single = String::new();
                for low in ch.to_lowercase() {
                    single.push(low);
                }
                tokens.push(single);
            }
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// CLS-prefixed token ids truncated to `max_len`, with an all-true mask
/// of the same length. Padding is a separate, explicit step.
pub fn tokenize(text: &str, vocab: &Vocab, max_len: usize) -> (Vec<u32>, Vec<bool>) {
    let mut ids = Vec::new();
    ids.push(CLS_ID);
    for token in split_tokens(text) {
        if ids.len() == max_len {
            break;
        }
        ids.push(vocab.id_of(&token));
    }
    ids.truncate(max_len);
    let mask = alloc::vec![true; ids.len()];
    (ids, mask)
}

/// Extends a tokenized sequence with PAD ids (mask false) up to `len`.
pub fn pad_to(token_ids: &mut Vec<u32>, mask: &mut Vec<bool>, len: usize) {
    while token_ids.len() < len {
        token_ids.push(PAD_ID);
        mask.push(false);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::types::{Sample, Split};
    use alloc::vec;

    fn dataset(texts: &[&str]) -> LabeledDataset {
        LabeledDataset {
            samples: texts
                .iter()
                .enumerate()
                .map(|(i, t)| Sample {
                    id: i as u32,
                    text: t.to_string(),
                    token_ids: vec![],
                    mask: vec![],
                    label: 0,
                })
                .collect(),
            num_classes: 5,
            split: Split::Train,
        }
    }

    #[test]
    fn min_freq_filters_rare_tokens() {
        let train = dataset(&["a a b"]);
        let vocab = Vocab::build(&train, 2);
        assert!(vocab.contains("a"));
        assert!(!vocab.contains("b"));
        assert_eq!(vocab.id_of("b"), UNK_ID);
    }

    #[test]
    fn lowercasing_unifies_case() {
        let train = dataset(&["Fine fine"]);
        let vocab = Vocab::build(&train, 2);
        assert!(vocab.contains("fine"));
        let (with_upper, _) = tokenize("Fine", &vocab, 8);
        let (with_lower, _) = tokenize("fine", &vocab, 8);
        assert_eq!(with_upper, with_lower);
    }

    #[test]
    fn unseen_token_maps_to_unk() {
        let train = dataset(&["the movie the movie"]);
        let vocab = Vocab::build(&train, 2);
        let (ids, _) = tokenize("spectacular", &vocab, 8);
        assert_eq!(ids, vec![CLS_ID, UNK_ID]);
    }

    #[test]
    fn empty_string_is_cls_only() {
        let vocab = Vocab::build(&dataset(&["x"]), 1);
        let (ids, mask) = tokenize("", &vocab, 16);
        assert_eq!(ids, vec![CLS_ID]);
        assert_eq!(mask, vec![true]);
    }

    #[test]
    fn truncation_caps_length() {
        let words = vec!["w"; 100].join(" ");
        let train = dataset(&[words.as_str()]);
        let vocab = Vocab::build(&train, 1);
        let (ids, mask) = tokenize(&words, &vocab, 64);
        assert_eq!(ids.len(), 64);
        assert_eq!(mask.len(), 64);
        assert_eq!(ids[0], CLS_ID);
    }

    #[test]
    fn known_tokens_round_trip_without_unk() {
        let train = dataset(&["a good movie . a good movie ."]);
        let vocab = Vocab::build(&train, 2);
        let (ids, _) = tokenize("a good movie .", &vocab, 32);
        assert!(ids.iter().skip(1).all(|&i| i != UNK_ID));
    }

    #[test]
    fn punctuation_splits_into_single_tokens() {
        assert_eq!(
            split_tokens("don't stop-me."),
            vec!["don", "'", "t", "stop", "-", "me", "."]
        );
    }

    #[test]
    fn vocab_tsv_round_trip() {
        let train = dataset(&["good good bad bad ugly"]);
        let vocab = Vocab::build(&train, 2);
        let restored = Vocab::from_tsv(&vocab.to_tsv()).unwrap();
        assert_eq!(vocab, restored);
        assert!(Vocab::from_tsv("garbage").is_err());
    }

    #[test]
    fn pad_extends_with_pad_ids() {
        let vocab = Vocab::build(&dataset(&["x x"]), 1);
        let (mut ids, mut mask) = tokenize("x", &vocab, 8);
        pad_to(&mut ids, &mut mask, 4);
        assert_eq!(ids.len(), 4);
        assert_eq!(&ids[2..], &[PAD_ID, PAD_ID]);
        assert_eq!(&mask[2..], &[false, false]);
    }
}
