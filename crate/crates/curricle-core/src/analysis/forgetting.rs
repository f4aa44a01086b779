use alloc::format;
use alloc::vec::Vec;

use super::error::AnalysisError;
use crate::curriculum::PhaseResult;

/// Per-sample, per-phase test correctness, rows sorted by ascending
/// miscount (number of phases the sample was missed in), ties by
/// ascending sample id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForgettingMatrix {
    /// Phase count (matrix width).
    pub k: usize,
    /// Test sample ids in row order.
    pub row_ids: Vec<u32>,
    /// Miscount per row, aligned with `row_ids`.
    pub miscounts: Vec<usize>,
    /// `cells[row][phase-1]` is true iff the sample was classified
    /// correctly after that phase.
    pub cells: Vec<Vec<bool>>,
}

impl ForgettingMatrix {
    pub fn rows(&self) -> usize {
        self.row_ids.len()
    }

    /// Mean of column `phase` (1-based); equals that phase's accuracy.
    pub fn column_mean(&self, phase: usize) -> f64 {
        let hits = self.cells.iter().filter(|row| row[phase - 1]).count();
        hits as f64 / self.rows() as f64
    }
}

/// Assembles the forgetting matrix from the per-phase correctness
/// vectors. All phases must have evaluated the same test set.
pub fn forgetting_matrix(
    phases: &[PhaseResult],
    test_ids: &[u32],
) -> Result<ForgettingMatrix, AnalysisError> {
    let columns: Vec<&[bool]> = phases.iter().map(|p| p.test_correct.as_slice()).collect();
    forgetting_matrix_from_bits(&columns, test_ids)
}

/// Same assembly from raw per-phase correctness columns (for rebuilding
/// the matrix from persisted run artifacts).
pub fn forgetting_matrix_from_bits(
    per_phase: &[&[bool]],
    test_ids: &[u32],
) -> Result<ForgettingMatrix, AnalysisError> {
    if per_phase.is_empty() {
        return Err(AnalysisError::NoPhases);
    }
    let n = test_ids.len();
    for (idx, column) in per_phase.iter().enumerate() {
        if column.len() != n {
            return Err(AnalysisError::InconsistentResults {
                reason: format!(
                    "phase {} recorded {} correctness bits for {} test samples",
                    idx + 1,
                    column.len(),
                    n
                ),
            });
        }
    }
    let k = per_phase.len();
    let mut rows: Vec<(usize, u32, Vec<bool>)> = (0..n)
        .map(|i| {
            let bits: Vec<bool> = per_phase.iter().map(|column| column[i]).collect();
            let miscount = bits.iter().filter(|&&b| !b).count();
            (miscount, test_ids[i], bits)
        })
        .collect();
    rows.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut row_ids = Vec::with_capacity(n);
    let mut miscounts = Vec::with_capacity(n);
    let mut cells = Vec::with_capacity(n);
    for (miscount, id, bits) in rows {
        row_ids.push(id);
        miscounts.push(miscount);
        cells.push(bits);
    }
    Ok(ForgettingMatrix {
        k,
        row_ids,
        miscounts,
        cells,
    })
}

/// Number of forgetting events per phase transition `i ∈ {2..k}`: rows
/// that were correct after phase `i−1` and wrong after phase `i`.
pub fn count_forgetting_events(matrix: &ForgettingMatrix) -> Vec<usize> {
    (2..=matrix.k)
        .map(|i| {
            matrix
                .cells
                .iter()
                .filter(|row| row[i - 2] && !row[i - 1])
                .count()
        })
        .collect()
}
