//! Change detection on co-registered grayscale image pairs.
//!
//! The pipeline computes minus and ratio difference maps, fuses them in
//! the 2D Haar wavelet domain, segments the fused map into a binary
//! change map (Fuzzy C-Means, plus K-Means and Otsu baselines), and
//! scores the result against ground truth with confusion rates and
//! Cohen's kappa.

pub mod diffmap;
pub mod error;
pub mod evaluate;
pub mod io;
pub mod raster;
pub mod segment;
pub mod synth;
pub mod wavelet;

pub use diffmap::{DiffKind, DifferenceMap};
pub use error::{Error, Result};
pub use evaluate::{ConfusionCounts, EvalReport, Rates};
pub use raster::{GrayRaster, PadRecord};
pub use segment::{ChangeMap, ClusterCenters, FcmConfig, MembershipMatrix};
pub use synth::SceneSpec;
pub use wavelet::{BandSplit, WaveletPyramid};
