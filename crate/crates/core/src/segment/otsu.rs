//! Otsu thresholding baseline over a 256-bin histogram.

use crate::error::Result;
use crate::segment::ChangeMap;

const BINS: usize = 256;

fn bin_of(v: f64) -> usize {
    ((v * BINS as f64) as usize).min(BINS - 1)
}

/// Threshold maximizing between-class variance over 256 bins.
/// Ties break toward the lowest threshold. Pixels at or above the
/// returned value count as changed.
pub fn otsu_threshold(x: &[f64]) -> f64 {
    let mut hist = [0u64; BINS];
    for &v in x {
        hist[bin_of(v)] += 1;
    }
    let total = x.len() as f64;
    let mut weighted_total = 0.0;
    for (b, &h) in hist.iter().enumerate() {
        weighted_total += b as f64 * h as f64;
    }

    let mut best_t = 1;
    let mut best_var = f64::NEG_INFINITY;
    let mut w0 = 0.0;
    let mut sum0 = 0.0;
    for t in 1..BINS {
        w0 += hist[t - 1] as f64;
        sum0 += (t - 1) as f64 * hist[t - 1] as f64;
        let w1 = total - w0;
        let var = if w0 == 0.0 || w1 == 0.0 {
            0.0
        } else {
            let mu0 = sum0 / w0;
            let mu1 = (weighted_total - sum0) / w1;
            w0 * w1 * (mu0 - mu1) * (mu0 - mu1)
        };
        if var > best_var {
            best_var = var;
            best_t = t;
        }
    }
    best_t as f64 / BINS as f64
}

/// Binarize a flattened map at a threshold (>= is changed).
pub fn threshold_change_map(
    x: &[f64],
    threshold: f64,
    width: usize,
    height: usize,
) -> Result<ChangeMap> {
    let flags = x.iter().map(|&v| v >= threshold).collect();
    ChangeMap::new(width, height, flags)
}
