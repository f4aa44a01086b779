use alloc::format;
use alloc::string::String;

use super::error::AnalysisError;
use super::forgetting::ForgettingMatrix;
use crate::numerics::Tensor;

/// CSV of a forgetting matrix: header
/// `sample_id,miscount,phase_1,..,phase_k`, rows in matrix order, bits as
/// 0/1.
pub fn forgetting_csv(matrix: &ForgettingMatrix) -> String {
    let mut out = String::from("sample_id,miscount");
    for phase in 1..=matrix.k {
        out.push_str(&format!(",phase_{phase}"));
    }
    out.push('\n');
    for row in 0..matrix.rows() {
        out.push_str(&format!("{},{}", matrix.row_ids[row], matrix.miscounts[row]));
        for &bit in &matrix.cells[row] {
            out.push_str(if bit { ",1" } else { ",0" });
        }
        out.push('\n');
    }
    out
}

/// CSV of a 2-d matrix, one line per row, shortest-round-trip floats.
pub fn matrix_csv(matrix: &Tensor) -> Result<String, AnalysisError> {
    let (rows, cols) = matrix.dims2().ok_or(AnalysisError::NotAMatrix)?;
    let mut out = String::new();
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&format!("{}", matrix.at2(r, c)));
        }
        out.push('\n');
    }
    Ok(out)
}
