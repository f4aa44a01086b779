use alloc::vec::Vec;

use super::error::CurriculumError;
use super::score::{DifficultyScore, Strategy};

/// The phase buckets of one curriculum: pairwise disjoint, jointly
/// covering the train set, sizes within one of each other, and every
/// score in bucket `i` at most every score in bucket `i+1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurriculumPlan {
    pub strategy: Strategy,
    pub k: usize,
    /// Sample ids per phase, each bucket ordered easiest-first.
    pub buckets: Vec<Vec<u32>>,
}

impl CurriculumPlan {
    /// Ids of phases `1..=phase`, concatenated in bucket order.
    pub fn cumulative_ids(&self, phase: usize) -> Vec<u32> {
        self.buckets[..phase].iter().flatten().copied().collect()
    }

    pub fn total_samples(&self) -> usize {
        self.buckets.iter().map(Vec::len).sum()
    }
}

/// CSV of a plan: `sample_id,phase` rows, phases in order, each bucket
/// easiest-first.
pub fn plan_csv(plan: &CurriculumPlan) -> alloc::string::String {
    let mut out = alloc::string::String::from("sample_id,phase\n");
    for (bucket_idx, bucket) in plan.buckets.iter().enumerate() {
        for &id in bucket {
            out.push_str(&alloc::format!("{},{}\n", id, bucket_idx + 1));
        }
    }
    out
}

/// Stable-sorts scores ascending (ties by ascending sample id) and cuts
/// the order into `k` contiguous buckets; the first `n mod k` buckets
/// take the extra element.
pub fn partition_phases(
    scores: &[DifficultyScore],
    k: usize,
    strategy: Strategy,
) -> Result<CurriculumPlan, CurriculumError> {
    let n = scores.len();
    if k == 0 || k > n {
        return Err(CurriculumError::BadPhaseCount { k, n });
    }
    let mut order: Vec<&DifficultyScore> = scores.iter().collect();
    order.sort_by(|a, b| {
        a.score
            .total_cmp(&b.score)
            .then_with(|| a.sample_id.cmp(&b.sample_id))
    });

    let base = n / k;
    let extra = n % k;
    let mut buckets = Vec::with_capacity(k);
    let mut cursor = 0usize;
    for bucket_idx in 0..k {
        let size = base + usize::from(bucket_idx < extra);
        let ids = order[cursor..cursor + size]
            .iter()
            .map(|s| s.sample_id)
            .collect();
        buckets.push(ids);
        cursor += size;
    }
    Ok(CurriculumPlan { strategy, k, buckets })
}
