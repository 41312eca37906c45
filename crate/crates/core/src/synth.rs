//! Deterministic generator of co-registered pairs with known ground
//! truth, standing in for unavailable satellite test imagery.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::raster::GrayRaster;
use crate::segment::ChangeMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SceneSpec {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    pub n_shapes: usize,
    pub noise_sigma: f64,
    pub contrast_delta: f64,
}

impl SceneSpec {
    fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidParameter("scene must be at least 1x1".into()));
        }
        if self.noise_sigma < 0.0 {
            return Err(Error::InvalidParameter("noise sigma must be >= 0".into()));
        }
        if !(self.contrast_delta > 0.0 && self.contrast_delta <= 1.0) {
            return Err(Error::InvalidParameter(
                "contrast delta must be in (0,1]".into(),
            ));
        }
        Ok(())
    }
}

/// Generate (before, after, truth). The before image is a smooth seeded
/// background; the after image shifts rectangles and discs up by the
/// contrast delta; independent Gaussian noise lands on both afterwards,
/// so truth marks exactly the noiseless changes.
pub fn generate_pair(spec: &SceneSpec) -> Result<(GrayRaster, GrayRaster, ChangeMap)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (w, h) = (spec.width, spec.height);

    // low-frequency texture: coarse random grid, bilinearly upsampled,
    // kept in [0.1, 0.5] so adding the delta cannot saturate before noise
    let background = smooth_background(&mut rng, w, h);

    let mut mask = vec![false; w * h];
    for _ in 0..spec.n_shapes {
        stamp_shape(&mut rng, &mut mask, w, h);
    }

    let before_clean = background;
    let after_clean: Vec<f64> = before_clean
        .iter()
        .zip(&mask)
        .map(|(&v, &m)| {
            if m {
                (v + spec.contrast_delta).min(1.0)
            } else {
                v
            }
        })
        .collect();

    let truth = ChangeMap::new(w, h, mask)?;

    let (a, b) = if spec.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma)
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let noisy = |clean: &[f64], rng: &mut ChaCha8Rng| -> Vec<f64> {
            clean
                .iter()
                .map(|&v| (v + normal.sample(rng)).clamp(0.0, 1.0))
                .collect()
        };
        (noisy(&before_clean, &mut rng), noisy(&after_clean, &mut rng))
    } else {
        (before_clean, after_clean)
    };

    Ok((
        GrayRaster::new(w, h, a)?,
        GrayRaster::new(w, h, b)?,
        truth,
    ))
}

fn smooth_background(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Vec<f64> {
    let cell = 32usize;
    let gw = w.div_ceil(cell) + 1;
    let gh = h.div_ceil(cell) + 1;
    let grid: Vec<f64> = (0..gw * gh).map(|_| rng.gen_range(0.1..0.5)).collect();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let gy = y / cell;
        let fy = (y % cell) as f64 / cell as f64;
        for x in 0..w {
            let gx = x / cell;
            let fx = (x % cell) as f64 / cell as f64;
            let v00 = grid[gy * gw + gx];
            let v10 = grid[gy * gw + gx + 1];
            let v01 = grid[(gy + 1) * gw + gx];
            let v11 = grid[(gy + 1) * gw + gx + 1];
            let top = v00 * (1.0 - fx) + v10 * fx;
            let bot = v01 * (1.0 - fx) + v11 * fx;
            out[y * w + x] = top * (1.0 - fy) + bot * fy;
        }
    }
    out
}

fn stamp_shape(rng: &mut ChaCha8Rng, mask: &mut [bool], w: usize, h: usize) {
    let min_dim = w.min(h);
    let size = rng.gen_range((min_dim / 16).max(1)..=(min_dim / 6).max(1));
    let cx = rng.gen_range(0..w);
    let cy = rng.gen_range(0..h);
    if rng.gen_bool(0.5) {
        // axis-aligned rectangle
        let x0 = cx.saturating_sub(size / 2);
        let y0 = cy.saturating_sub(size / 2);
        let x1 = (x0 + size).min(w);
        let y1 = (y0 + size).min(h);
        for y in y0..y1 {
            for x in x0..x1 {
                mask[y * w + x] = true;
            }
        }
    } else {
        // disc
        let r = (size / 2).max(1) as isize;
        let (cx, cy) = (cx as isize, cy as isize);
        for y in (cy - r).max(0)..(cy + r + 1).min(h as isize) {
            for x in (cx - r).max(0)..(cx + r + 1).min(w as isize) {
                let dx = x - cx;
                let dy = y - cy;
                if dx * dx + dy * dy <= r * r {
                    mask[y as usize * w + x as usize] = true;
                }
            }
        }
    }
}
