//! Segmentors turning a difference map into a binary change map.

mod fcm;
mod kmeans;
mod otsu;

pub use fcm::{fcm, fcm_objective, fcm_observed, FcmConfig};
pub use kmeans::kmeans;
pub use otsu::{otsu_threshold, threshold_change_map};

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::GrayRaster;

/// N x c fuzzy memberships, each row summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MembershipMatrix {
    n: usize,
    c: usize,
    u: Vec<f64>,
}

impl MembershipMatrix {
    pub fn new(n: usize, c: usize, u: Vec<f64>) -> Result<Self> {
        if u.len() != n * c {
            return Err(Error::ShapeMismatch(format!(
                "{} memberships for {}x{}",
                u.len(),
                n,
                c
            )));
        }
        Ok(Self { n, c, u })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn c(&self) -> usize {
        self.c
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.u[i * self.c..(i + 1) * self.c]
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }
}

/// Cluster centers in intensity units.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterCenters(pub Vec<f64>);

impl ClusterCenters {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the highest center; ties go to the lower index.
    pub fn highest(&self) -> usize {
        let mut best = 0;
        for (j, &v) in self.0.iter().enumerate() {
            if v > self.0[best] {
                best = j;
            }
        }
        best
    }
}

/// Binary changed/unchanged raster aligned with the input pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangeMap {
    width: usize,
    height: usize,
    flags: Vec<bool>,
}

impl ChangeMap {
    pub fn new(width: usize, height: usize, flags: Vec<bool>) -> Result<Self> {
        if flags.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "{} flags for {}x{}",
                flags.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            flags,
        })
    }

    /// Binarize a grayscale raster at 0.5; antialiased truth edges round.
    pub fn from_raster(raster: &GrayRaster) -> Self {
        Self {
            width: raster.width(),
            height: raster.height(),
            flags: raster.values().iter().map(|&v| v >= 0.5).collect(),
        }
    }

    /// Render changed pixels as white.
    pub fn to_raster(&self) -> GrayRaster {
        let values = self
            .flags
            .iter()
            .map(|&f| if f { 1.0 } else { 0.0 })
            .collect();
        GrayRaster::new(self.width, self.height, values).expect("flags are 0/1 valued")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn changed_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn change_fraction(&self) -> f64 {
        self.changed_count() as f64 / self.flags.len() as f64
    }
}

/// Fuzzy memberships to a binary map: a pixel is changed iff its argmax
/// cluster is the highest-center cluster. Membership ties break toward
/// the higher center, center ties toward the lower index.
pub fn to_change_map(
    u: &MembershipMatrix,
    v: &ClusterCenters,
    width: usize,
    height: usize,
) -> Result<ChangeMap> {
    if u.c() != v.len() || u.n() != width * height {
        return Err(Error::ShapeMismatch(format!(
            "membership {}x{} vs {} centers and {}x{} map",
            u.n(),
            u.c(),
            v.len(),
            width,
            height
        )));
    }
    let changed_cluster = v.highest();
    // a fully degenerate clustering (all centers identical, e.g. on a
    // constant zero map) has no changed class at all
    if v.0.iter().all(|&x| x == v.0[changed_cluster]) {
        return ChangeMap::new(width, height, vec![false; u.n()]);
    }
    let flags = (0..u.n())
        .map(|i| {
            let row = u.row(i);
            let mut best = 0;
            for j in 1..row.len() {
                let better = row[j] > row[best]
                    || (row[j] == row[best] && v.0[j] > v.0[best]);
                if better {
                    best = j;
                }
            }
            best == changed_cluster
        })
        .collect();
    ChangeMap::new(width, height, flags)
}

/// Hard-label analogue of [`to_change_map`].
pub fn labels_to_change_map(
    labels: &[usize],
    centers: &ClusterCenters,
    width: usize,
    height: usize,
) -> Result<ChangeMap> {
    if labels.len() != width * height {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {}x{}",
            labels.len(),
            width,
            height
        )));
    }
    let changed_cluster = centers.highest();
    let flags = labels.iter().map(|&l| l == changed_cluster).collect();
    ChangeMap::new(width, height, flags)
}

/// Debug dump of (U, v): space-separated, one membership row per line,
/// centers on a final line.
pub fn dump_membership(u: &MembershipMatrix, v: &ClusterCenters, path: &Path) -> Result<()> {
    let io_err = |e| Error::IoFailure {
        path: path.to_path_buf(),
        source: e,
    };
    let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    let mut run = || -> std::io::Result<()> {
        for i in 0..u.n() {
            let row: Vec<String> = u.row(i).iter().map(|x| format!("{x:.9}")).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        let centers: Vec<String> = v.0.iter().map(|x| format!("{x:.9}")).collect();
        writeln!(f, "{}", centers.join(" "))?;
        f.flush()
    };
    run().map_err(io_err)
}
