//! Orthonormal 2D Haar transform and frequency-band fusion of two
//! difference maps.
//!
//! The transform is separable: a multi-level 1D Haar pass over every row,
//! then over every column. At full depth this equals the explicit matrix
//! sandwich H X H^T with the orthonormal Haar matrix. The per-pair kernel
//! is (a+b)/sqrt(2), (a-b)/sqrt(2), so energy is preserved and the inverse
//! is exact.

use std::path::Path;

use crate::diffmap::{DiffKind, DifferenceMap};
use crate::error::{Error, Result};
use crate::raster::{crop, pad_to_pow2, GrayRaster};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Square grid of wavelet coefficients with its decomposition depth.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletPyramid {
    side: usize,
    levels: usize,
    coeffs: Vec<f64>,
}

impl WaveletPyramid {
    pub fn new(side: usize, levels: usize, coeffs: Vec<f64>) -> Result<Self> {
        if !side.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(side));
        }
        let max = side.trailing_zeros() as usize;
        if levels == 0 || levels > max {
            return Err(Error::TooManyLevels {
                requested: levels,
                max,
                side,
            });
        }
        if coeffs.len() != side * side {
            return Err(Error::ShapeMismatch(format!(
                "{} coefficients for side {}",
                coeffs.len(),
                side
            )));
        }
        Ok(Self {
            side,
            levels,
            coeffs,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Side of the approximation block (rows/cols below it are coarse).
    pub fn approx_side(&self) -> usize {
        self.side >> self.levels
    }
}

/// Fraction of the coefficient-index range counted as low frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSplit {
    boundary: f64,
}

impl BandSplit {
    pub fn new(boundary: f64) -> Result<Self> {
        if !(boundary > 0.0 && boundary < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "band-split boundary {boundary} outside (0,1)"
            )));
        }
        Ok(Self { boundary })
    }

    pub fn boundary(&self) -> f64 {
        self.boundary
    }
}

impl Default for BandSplit {
    /// Half/half split: coarse block from one source, the rest from the other.
    fn default() -> Self {
        Self { boundary: 0.5 }
    }
}

/// Multi-level forward Haar pass in place. Each level halves the
/// approximation prefix, leaving detail coefficients behind it.
pub fn haar_forward_1d(v: &mut [f64], levels: usize) -> Result<()> {
    if !v.len().is_power_of_two() {
        return Err(Error::NonPowerOfTwoLength(v.len()));
    }
    let max = v.len().trailing_zeros() as usize;
    if levels > max {
        return Err(Error::TooManyLevels {
            requested: levels,
            max,
            side: v.len(),
        });
    }
    let mut scratch = vec![0.0; v.len()];
    let mut len = v.len();
    for _ in 0..levels {
        let half = len / 2;
        for i in 0..half {
            let a = v[2 * i];
            let b = v[2 * i + 1];
            scratch[i] = (a + b) / SQRT2;
            scratch[half + i] = (a - b) / SQRT2;
        }
        v[..len].copy_from_slice(&scratch[..len]);
        len = half;
    }
    Ok(())
}

/// Exact inverse of [`haar_forward_1d`] at the same depth.
pub fn haar_inverse_1d(v: &mut [f64], levels: usize) -> Result<()> {
    if !v.len().is_power_of_two() {
        return Err(Error::NonPowerOfTwoLength(v.len()));
    }
    let max = v.len().trailing_zeros() as usize;
    if levels > max {
        return Err(Error::TooManyLevels {
            requested: levels,
            max,
            side: v.len(),
        });
    }
    let mut scratch = vec![0.0; v.len()];
    for level in (0..levels).rev() {
        let len = v.len() >> level;
        let half = len / 2;
        for i in 0..half {
            let s = v[i];
            let d = v[half + i];
            scratch[2 * i] = (s + d) / SQRT2;
            scratch[2 * i + 1] = (s - d) / SQRT2;
        }
        v[..len].copy_from_slice(&scratch[..len]);
    }
    Ok(())
}

fn check_square_pow2(x: &GrayRaster) -> Result<usize> {
    if x.width() != x.height() {
        return Err(Error::NotSquare(x.width(), x.height()));
    }
    let side = x.width();
    if !side.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(side));
    }
    Ok(side)
}

/// Forward 2D transform: rows then columns (the order does not affect the
/// result). The coarse image lands in the upper-left approximation block.
pub fn dwt2(x: &GrayRaster, levels: usize) -> Result<WaveletPyramid> {
    let side = check_square_pow2(x)?;
    let max = side.trailing_zeros() as usize;
    if levels == 0 || levels > max {
        return Err(Error::TooManyLevels {
            requested: levels,
            max,
            side,
        });
    }
    let mut coeffs = x.values().to_vec();
    transform_grid(&mut coeffs, side, levels, haar_forward_1d)?;
    WaveletPyramid::new(side, levels, coeffs)
}

/// Inverse 2D transform. The output grid may stray outside [0,1] for
/// fused pyramids; clamping happens downstream.
pub fn idwt2(p: &WaveletPyramid) -> Vec<f64> {
    let mut grid = p.coeffs.clone();
    transform_grid(&mut grid, p.side, p.levels, haar_inverse_1d)
        .expect("pyramid invariants guarantee a legal transform");
    grid
}

fn transform_grid(
    grid: &mut [f64],
    side: usize,
    levels: usize,
    pass: fn(&mut [f64], usize) -> Result<()>,
) -> Result<()> {
    for row in grid.chunks_exact_mut(side) {
        pass(row, levels)?;
    }
    let mut col = vec![0.0; side];
    for x in 0..side {
        for y in 0..side {
            col[y] = grid[y * side + x];
        }
        pass(&mut col, levels)?;
        for y in 0..side {
            grid[y * side + x] = col[y];
        }
    }
    Ok(())
}

/// Band fusion: the low-frequency corner comes from `p_minus`, everything
/// else from `p_ratio`. Pure selection; no coefficient is averaged.
pub fn fuse_pyramids(
    p_minus: &WaveletPyramid,
    p_ratio: &WaveletPyramid,
    split: BandSplit,
) -> Result<WaveletPyramid> {
    if p_minus.side != p_ratio.side || p_minus.levels != p_ratio.levels {
        return Err(Error::ShapeMismatch(format!(
            "side {}/{} levels {}/{}",
            p_minus.side, p_ratio.side, p_minus.levels, p_ratio.levels
        )));
    }
    let side = p_minus.side;
    let cut = split.boundary * side as f64;
    let coeffs = (0..side * side)
        .map(|i| {
            let (r, c) = (i / side, i % side);
            if (r as f64) < cut && (c as f64) < cut {
                p_minus.coeffs[i]
            } else {
                p_ratio.coeffs[i]
            }
        })
        .collect();
    WaveletPyramid::new(side, p_minus.levels, coeffs)
}

/// Full fusion pipeline: pad, transform both maps, band-fuse, invert,
/// crop, clamp, then min-max rescale to [0,1] to recover the contrast the
/// band selection removes. A constant map rescales to all zeros.
pub fn dwt_fuse_maps(
    d_minus: &DifferenceMap,
    d_ratio: &DifferenceMap,
    levels: usize,
    split: BandSplit,
) -> Result<DifferenceMap> {
    if !d_minus.raster.same_dimensions(&d_ratio.raster) {
        return Err(Error::DimensionMismatch(
            d_minus.raster.width(),
            d_minus.raster.height(),
            d_ratio.raster.width(),
            d_ratio.raster.height(),
        ));
    }
    let (pm, record) = pad_to_pow2(&d_minus.raster);
    let (pr, _) = pad_to_pow2(&d_ratio.raster);
    let fused = fuse_pyramids(&dwt2(&pm, levels)?, &dwt2(&pr, levels)?, split)?;
    let grid = idwt2(&fused);
    let clamped: Vec<f64> = grid.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let square = GrayRaster::new(fused.side, fused.side, clamped)?;
    let cropped = crop(&square, &record)?;
    let rescaled = min_max_rescale(cropped.values());
    Ok(DifferenceMap {
        raster: GrayRaster::new(cropped.width(), cropped.height(), rescaled)?,
        kind: DiffKind::DwtFused,
    })
}

fn min_max_rescale(values: &[f64]) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max > min {
        values.iter().map(|v| (v - min) / (max - min)).collect()
    } else {
        vec![0.0; values.len()]
    }
}

/// Debug dump: coefficients affinely mapped onto [0,1] and written as a
/// PGM. Lossy by construction, never read back into the pipeline.
pub fn dump_pyramid_pgm(p: &WaveletPyramid, path: &Path) -> Result<()> {
    let mapped = min_max_rescale(&p.coeffs);
    let raster = GrayRaster::new(p.side, p.side, mapped)?;
    crate::io::save_raster(&raster, path, crate::io::ImageFormat::Pgm)
}
