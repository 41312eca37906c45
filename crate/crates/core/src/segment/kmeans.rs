//! Lloyd's K-Means baseline on a flattened difference map.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::segment::ClusterCenters;

/// Seeded Lloyd iteration. Empty clusters are re-seeded to the point
/// farthest from its current center. Deterministic per seed.
pub fn kmeans(
    x: &[f64],
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<(Vec<usize>, ClusterCenters)> {
    let n = x.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if n < k {
        return Err(Error::TooFewPoints { n, clusters: k });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }

    // sample k distinct data points; prefer distinct values so duplicate
    // inputs do not start centers on top of each other
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unique: Vec<f64> = x.to_vec();
    unique.sort_by(f64::total_cmp);
    unique.dedup();
    let mut centers: Vec<f64> = if unique.len() >= k {
        unique.choose_multiple(&mut rng, k).cloned().collect()
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        idx[..k].iter().map(|&i| x[i]).collect()
    };

    let mut labels = vec![0usize; n];
    for _ in 0..max_iter.max(1) {
        // assignment, ties to the lower index
        let mut changed = false;
        for (i, &xi) in x.iter().enumerate() {
            let mut best = 0;
            let mut best_d = (xi - centers[0]).abs();
            for (j, &vj) in centers.iter().enumerate().skip(1) {
                let d = (xi - vj).abs();
                if d < best_d {
                    best = j;
                    best_d = d;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }

        // means, with empty-cluster re-seeding
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (i, &xi) in x.iter().enumerate() {
            sums[labels[i]] += xi;
            counts[labels[i]] += 1;
        }
        for j in 0..k {
            if counts[j] > 0 {
                centers[j] = sums[j] / counts[j] as f64;
            }
        }
        for j in 0..k {
            if counts[j] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        let da = (x[a] - centers[labels[a]]).abs();
                        let db = (x[b] - centers[labels[b]]).abs();
                        da.total_cmp(&db)
                    })
                    .expect("n >= k >= 1");
                centers[j] = x[far];
                changed = true;
            }
        }

        if !changed {
            break;
        }
    }

    Ok((labels, ClusterCenters(centers)))
}
