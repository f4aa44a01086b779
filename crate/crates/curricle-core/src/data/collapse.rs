use alloc::vec::Vec;

use super::error::DataError;
use super::types::LabeledDataset;

/// Label map from the five fine-grained sentiment labels
/// (0 = very negative … 4 = very positive) onto a coarser class set.
/// `None` drops the sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CollapseSpec {
    target: u32,
    map: [Option<u32>; 5],
}

impl CollapseSpec {
    /// The fixed collapsing tables:
    /// 2 classes: drop neutral, club the polar pairs;
    /// 3 classes: keep neutral, club the polar pairs;
    /// 4 classes: drop neutral, keep the four polar labels;
    /// 5 classes: identity.
    pub fn for_target(target: u32) -> Result<Self, DataError> {
        let map = match target {
            2 => [Some(0), Some(0), None, Some(1), Some(1)],
            3 => [Some(0), Some(0), Some(1), Some(2), Some(2)],
            4 => [Some(0), Some(1), None, Some(2), Some(3)],
            5 => [Some(0), Some(1), Some(2), Some(3), Some(4)],
            got => return Err(DataError::BadCollapseTarget { got }),
        };
        Ok(Self { target, map })
    }

    pub fn target(&self) -> u32 {
        self.target
    }

    pub fn apply(&self, label: u32) -> Option<u32> {
        self.map.get(label as usize).copied().flatten()
    }

    /// Labels that the map drops entirely.
    pub fn dropped(&self) -> Vec<u32> {
        (0..5u32).filter(|&l| self.map[l as usize].is_none()).collect()
    }
}

/// Produces the `target`-class variant of a 5-class dataset, preserving
/// sample ids and order; samples with dropped labels disappear.
pub fn collapse_labels(data: &LabeledDataset, target: u32) -> Result<LabeledDataset, DataError> {
    if data.num_classes != 5 {
        return Err(DataError::NotFiveClass {
            got: data.num_classes,
        });
    }
    let spec = CollapseSpec::for_target(target)?;
    let samples = data
        .samples
        .iter()
        .filter_map(|s| {
            spec.apply(s.label).map(|label| {
                let mut out = s.clone();
                out.label = label;
                out
            })
        })
        .collect();
    Ok(LabeledDataset {
        samples,
        num_classes: target,
        split: data.split,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::tsv::parse_tsv;
    use crate::data::types::Split;
    use alloc::vec;
    use alloc::vec::Vec;

    fn one_of_each() -> LabeledDataset {
        parse_tsv("0\ta\n1\tb\n2\tc\n3\td\n4\te\n", Split::Train, 5).unwrap()
    }

    #[test]
    fn three_class_map_table() {
        let collapsed = collapse_labels(&one_of_each(), 3).unwrap();
        let labels: Vec<u32> = collapsed.samples.iter().map(|s| s.label).collect();
        assert_eq!(labels, vec![0, 0, 1, 2, 2]);
        assert_eq!(collapsed.ids(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn two_class_drops_neutral_and_clubs_pairs() {
        let collapsed = collapse_labels(&one_of_each(), 2).unwrap();
        let labels: Vec<u32> = collapsed.samples.iter().map(|s| s.label).collect();
        assert_eq!(labels, vec![0, 0, 1, 1]);
        // sample ids come from the source, so id 2 is simply absent
        assert_eq!(collapsed.ids(), vec![0, 1, 3, 4]);
    }

    #[test]
    fn four_class_histogram_has_no_gaps() {
        let collapsed = collapse_labels(&one_of_each(), 4).unwrap();
        let hist = collapsed.class_histogram();
        assert_eq!(hist, vec![1, 1, 1, 1]);
    }

    #[test]
    fn identity_collapse_is_identity() {
        let data = one_of_each();
        let collapsed = collapse_labels(&data, 5).unwrap();
        assert_eq!(collapsed, data);
    }

    #[test]
    fn drop_arithmetic_is_exact() {
        let data = parse_tsv("2\tn1\n2\tn2\n0\tvn\n4\tvp\n2\tn3\n", Split::Train, 5).unwrap();
        let neutral = data.samples.iter().filter(|s| s.label == 2).count();
        let collapsed = collapse_labels(&data, 2).unwrap();
        assert_eq!(collapsed.len(), data.len() - neutral);
    }

    #[test]
    fn rejects_non_five_class_input_and_bad_target() {
        let two = parse_tsv("0\ta\n1\tb\n", Split::Train, 2).unwrap();
        assert_eq!(
            collapse_labels(&two, 2).unwrap_err(),
            DataError::NotFiveClass { got: 2 }
        );
        assert_eq!(
            CollapseSpec::for_target(6).unwrap_err(),
            DataError::BadCollapseTarget { got: 6 }
        );
    }
}
