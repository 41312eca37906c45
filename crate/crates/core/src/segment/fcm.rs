//! Fuzzy C-Means on a flattened difference map.
//!
//! Alternates the center update v_j = sum(u^m x) / sum(u^m) with the
//! membership update u_ij = 1 / sum_k (|x_i-v_j| / |x_i-v_k|)^(2/(m-1))
//! until the Frobenius norm of the membership change drops below eps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::segment::{ClusterCenters, MembershipMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FcmConfig {
    pub c: usize,
    pub m: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self {
            c: 6,
            m: 2.0,
            eps: 1e-5,
            max_iter: 300,
            seed: 0,
        }
    }
}

impl FcmConfig {
    fn validate(&self) -> Result<()> {
        if self.c < 2 {
            return Err(Error::InvalidParameter("cluster count must be >= 2".into()));
        }
        if self.m <= 1.0 {
            return Err(Error::InvalidParameter("fuzziness must be > 1".into()));
        }
        if self.eps <= 0.0 {
            return Err(Error::InvalidParameter("eps must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1".into()));
        }
        Ok(())
    }
}

/// Run FCM to convergence. Deterministic for a fixed seed.
pub fn fcm(x: &[f64], cfg: &FcmConfig) -> Result<(MembershipMatrix, ClusterCenters)> {
    fcm_observed(x, cfg, |_, _| {})
}

/// [`fcm`] with a per-iteration observer over (memberships, centers),
/// called after each update pair. Lets invariant suites watch row sums
/// and the objective along the trajectory.
pub fn fcm_observed(
    x: &[f64],
    cfg: &FcmConfig,
    mut on_iter: impl FnMut(&[f64], &[f64]),
) -> Result<(MembershipMatrix, ClusterCenters)> {
    cfg.validate()?;
    let n = x.len();
    let c = cfg.c;
    if n < c {
        return Err(Error::TooFewPoints { n, clusters: c });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    // random memberships, rows normalized so the row-stochastic
    // invariant holds from iteration 0
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut u = vec![0.0; n * c];
    for row in u.chunks_exact_mut(c) {
        let mut sum = 0.0;
        for slot in row.iter_mut() {
            // avoid an all-zero row
            *slot = rng.gen_range(f64::MIN_POSITIVE..1.0);
            sum += *slot;
        }
        for slot in row.iter_mut() {
            *slot /= sum;
        }
    }

    let mut centers = vec![0.0; c];
    let exponent = 2.0 / (cfg.m - 1.0);
    let mut new_u = vec![0.0; n * c];

    for _ in 0..cfg.max_iter {
        update_centers(x, &u, cfg.m, &mut centers);
        update_memberships(x, &centers, exponent, &mut new_u);

        let mut diff_sq = 0.0;
        for (a, b) in u.iter().zip(&new_u) {
            let d = a - b;
            diff_sq += d * d;
        }
        std::mem::swap(&mut u, &mut new_u);
        on_iter(&u, &centers);
        if diff_sq.sqrt() <= cfg.eps {
            break;
        }
    }

    Ok((
        MembershipMatrix::new(n, c, u)?,
        ClusterCenters(centers),
    ))
}

fn update_centers(x: &[f64], u: &[f64], m: f64, centers: &mut [f64]) {
    let c = centers.len();
    let mut num = vec![0.0; c];
    let mut den = vec![0.0; c];
    for (i, &xi) in x.iter().enumerate() {
        let row = &u[i * c..(i + 1) * c];
        for (j, &uij) in row.iter().enumerate() {
            let w = uij.powf(m);
            num[j] += w * xi;
            den[j] += w;
        }
    }
    for j in 0..c {
        // a cluster nobody belongs to keeps its previous center
        if den[j] > 0.0 {
            centers[j] = num[j] / den[j];
        }
    }
}

fn update_memberships(x: &[f64], centers: &[f64], exponent: f64, u: &mut [f64]) {
    let c = centers.len();
    let mut inv = vec![0.0; c];
    for (i, &xi) in x.iter().enumerate() {
        let row = &mut u[i * c..(i + 1) * c];
        // a point sitting exactly on a center takes membership 1 there,
        // lowest coincident index first
        if let Some(hit) = centers.iter().position(|&v| xi == v) {
            row.fill(0.0);
            row[hit] = 1.0;
            continue;
        }
        // expressed through ratios to the nearest center so no term
        // overflows: (d_min/d_j)^p is always in (0,1]
        let d_min = centers
            .iter()
            .map(|&vj| (xi - vj).abs())
            .fold(f64::INFINITY, f64::min);
        let mut sum = 0.0;
        for (j, &vj) in centers.iter().enumerate() {
            let d = (xi - vj).abs();
            inv[j] = (d_min / d).powf(exponent);
            sum += inv[j];
        }
        for j in 0..c {
            row[j] = inv[j] / sum;
        }
    }
}

/// Standard FCM objective sum_i sum_j u_ij^m (x_i - v_j)^2.
/// Used as an oracle for the monotonicity property.
pub fn fcm_objective(
    x: &[f64],
    u: &MembershipMatrix,
    v: &ClusterCenters,
    m: f64,
) -> Result<f64> {
    if u.n() != x.len() || u.c() != v.len() {
        return Err(Error::ShapeMismatch(format!(
            "objective over {} points, {}x{} memberships, {} centers",
            x.len(),
            u.n(),
            u.c(),
            v.len()
        )));
    }
    let mut total = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        for (j, &vj) in v.0.iter().enumerate() {
            let d = xi - vj;
            total += u.row(i)[j].powf(m) * d * d;
        }
    }
    Ok(total)
}
