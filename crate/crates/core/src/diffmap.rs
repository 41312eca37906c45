//! Minus map, ratio map, and weighted-average fusion of a co-registered pair.
//!
//! All maps share one orientation convention: higher value means more
//! likely changed.

use crate::error::{Error, Result};
use crate::raster::GrayRaster;

/// Default guard against division blow-up on black pixels: one 8-bit step.
pub const DEFAULT_RATIO_EPS: f64 = 1.0 / 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffKind {
    Minus,
    Ratio,
    Weighted,
    DwtFused,
}

/// A per-pixel difference image with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceMap {
    pub raster: GrayRaster,
    pub kind: DiffKind,
}

fn check_dims(a: &GrayRaster, b: &GrayRaster) -> Result<()> {
    if !a.same_dimensions(b) {
        return Err(Error::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ));
    }
    Ok(())
}

/// Absolute per-pixel difference |a - b|.
pub fn minus_map(a: &GrayRaster, b: &GrayRaster) -> Result<DifferenceMap> {
    check_dims(a, b)?;
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| (x - y).abs())
        .collect();
    Ok(DifferenceMap {
        raster: GrayRaster::new(a.width(), a.height(), values)?,
        kind: DiffKind::Minus,
    })
}

/// Per-pixel ratio difference 1 - (min+eps)/(max+eps).
///
/// Raw division leaves unchanged pixels near 1; the flip keeps the
/// bright-means-changed convention shared with the minus map.
pub fn ratio_map(a: &GrayRaster, b: &GrayRaster, eps: f64) -> Result<DifferenceMap> {
    check_dims(a, b)?;
    if eps <= 0.0 {
        return Err(Error::InvalidParameter("ratio eps must be positive".into()));
    }
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| {
            let lo = x.min(y);
            let hi = x.max(y);
            1.0 - (lo + eps) / (hi + eps)
        })
        .collect();
    Ok(DifferenceMap {
        raster: GrayRaster::new(a.width(), a.height(), values)?,
        kind: DiffKind::Ratio,
    })
}

/// Convex blend w*d1 + (1-w)*d2.
pub fn weighted_average_fuse(
    d1: &DifferenceMap,
    d2: &DifferenceMap,
    w: f64,
) -> Result<DifferenceMap> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::WeightOutOfRange(w));
    }
    check_dims(&d1.raster, &d2.raster)?;
    let values = d1
        .raster
        .values()
        .iter()
        .zip(d2.raster.values())
        .map(|(&x, &y)| w * x + (1.0 - w) * y)
        .collect();
    Ok(DifferenceMap {
        raster: GrayRaster::new(d1.raster.width(), d1.raster.height(), values)?,
        kind: DiffKind::Weighted,
    })
}
