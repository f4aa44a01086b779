use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::error::DataError;
use super::types::{LabeledDataset, Sample, Split};

/// Parses `label<TAB>sentence` lines into a dataset. Samples keep file
/// order and receive ids `0..n-1`. Labels must be below `num_classes`.
pub fn parse_tsv(content: &str, split: Split, num_classes: u32) -> Result<LabeledDataset, DataError> {
    let mut samples = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let lineno = idx + 1;
        let (label_str, text) = line.split_once('\t').ok_or_else(|| DataError::Parse {
            line: lineno,
            reason: "expected label<TAB>sentence".to_string(),
        })?;
        let label: u32 = label_str.parse().map_err(|_| DataError::Parse {
            line: lineno,
            reason: format!("label {label_str:?} is not an integer"),
        })?;
        if label >= num_classes {
            return Err(DataError::Parse {
                line: lineno,
                reason: format!("label {label} out of range for {num_classes} classes"),
            });
        }
        samples.push(Sample {
            id: samples.len() as u32,
            text: text.to_string(),
            token_ids: Vec::new(),
            mask: Vec::new(),
            label,
        });
    }
    if samples.is_empty() {
        return Err(DataError::Empty);
    }
    Ok(LabeledDataset {
        samples,
        num_classes,
        split,
    })
}

/// Serializes a dataset back to `label<TAB>sentence` lines in order.
pub fn dataset_to_tsv(data: &LabeledDataset) -> String {
    let mut out = String::new();
    for s in &data.samples {
        out.push_str(&s.label.to_string());
        out.push('\t');
        out.push_str(&s.text);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_file_order_and_assigns_dense_ids() {
        let data = parse_tsv("3\tfine film\n0\tawful\n2\tfair enough\n", Split::Train, 5).unwrap();
        assert_eq!(data.len(), 3);
        assert_eq!(data.samples[0].id, 0);
        assert_eq!(data.samples[2].id, 2);
        assert_eq!(data.samples[1].label, 0);
        assert_eq!(data.samples[2].text, "fair enough");
    }

    #[test]
    fn label_out_of_range_is_a_parse_error_with_line() {
        let err = parse_tsv("1\tok\n7\tfoo\n", Split::Train, 5).unwrap_err();
        match err {
            DataError::Parse { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("out of range"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_tab_and_bad_label_are_parse_errors() {
        assert!(matches!(
            parse_tsv("no tab here\n", Split::Dev, 5),
            Err(DataError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_tsv("x\tfoo\n", Split::Dev, 5),
            Err(DataError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert_eq!(parse_tsv("", Split::Test, 5).unwrap_err(), DataError::Empty);
    }

    #[test]
    fn round_trips_bytes() {
        let text = "4\tgreat stuff\n1\tnot my thing\n";
        let data = parse_tsv(text, Split::Train, 5).unwrap();
        assert_eq!(dataset_to_tsv(&data), text);
    }
}
