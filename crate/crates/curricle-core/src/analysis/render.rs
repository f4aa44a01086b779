use alloc::vec::Vec;

use super::error::AnalysisError;
use crate::math;
use crate::numerics::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderMode {
    /// One gray byte per cell (portable graymap, P5).
    BinaryGray,
    /// Blue-white-red diverging RGB (portable pixmap, P6).
    Diverging,
}

/// A rendered heatmap; dimensions always match the source matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeatmapImage {
    pub width: usize,
    pub height: usize,
    pub mode: RenderMode,
    /// Row-major pixels: 1 byte per cell for gray, 3 for RGB.
    pub pixels: Vec<u8>,
}

impl HeatmapImage {
    /// Binary PNM encoding: `P5`/`P6` header then the raw pixel bytes.
    pub fn encode(&self) -> Vec<u8> {
        let magic = match self.mode {
            RenderMode::BinaryGray => "P5",
            RenderMode::Diverging => "P6",
        };
        let mut out = Vec::with_capacity(self.pixels.len() + 32);
        let header = alloc::format!("{magic}\n{} {}\n255\n", self.width, self.height);
        out.extend_from_slice(header.as_bytes());
        out.extend_from_slice(&self.pixels);
        out
    }
}

/// Renders a signed matrix with the diverging convention: positive
/// values shade toward blue (attention added), negative toward red
/// (attention diminished), zero is white. Values are normalized by the
/// maximum absolute entry, so the image is invariant under multiplying
/// the matrix by any positive scalar; an all-zero matrix is all white.
///
/// For `t = v / max_abs`: `t ≥ 0` maps to `(⌊255(1−t)⌉, ⌊255(1−t)⌉, 255)`
/// and `t < 0` to `(255, ⌊255(1+t)⌉, ⌊255(1+t)⌉)`, rounding half away
/// from zero.
pub fn render_diverging(matrix: &Tensor) -> Result<HeatmapImage, AnalysisError> {
    let (height, width) = matrix.dims2().ok_or(AnalysisError::NotAMatrix)?;
    let max_abs = matrix.max_abs();
    let mut pixels = Vec::with_capacity(3 * width * height);
    for &v in matrix.data() {
        if max_abs == 0.0 {
            pixels.extend_from_slice(&[255, 255, 255]);
            continue;
        }
        let t = v / max_abs;
        if t >= 0.0 {
            let fade = math::round(255.0 * (1.0 - t)) as u8;
            pixels.extend_from_slice(&[fade, fade, 255]);
        } else {
            let fade = math::round(255.0 * (1.0 + t)) as u8;
            pixels.extend_from_slice(&[255, fade, fade]);
        }
    }
    Ok(HeatmapImage {
        width,
        height,
        mode: RenderMode::Diverging,
        pixels,
    })
}

/// Renders a 0/1 matrix as a graymap: false is black (0), true is white
/// (255). Image height equals the row count, width the column count.
pub fn render_binary(rows: &[Vec<bool>]) -> Result<HeatmapImage, AnalysisError> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(AnalysisError::NotAMatrix);
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(AnalysisError::RaggedRows);
    }
    let mut pixels = Vec::with_capacity(rows.len() * width);
    for row in rows {
        for &bit in row {
            pixels.push(if bit { 255 } else { 0 });
        }
    }
    Ok(HeatmapImage {
        width,
        height: rows.len(),
        mode: RenderMode::BinaryGray,
        pixels,
    })
}
