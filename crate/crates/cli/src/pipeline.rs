//! Pipeline orchestration shared by the `run` and `compare` subcommands.

use std::path::Path;

use wavefuse_core::diffmap::{self, DifferenceMap};
use wavefuse_core::evaluate::{self, EvalReport};
use wavefuse_core::io;
use wavefuse_core::segment::{self, ChangeMap, FcmConfig};
use wavefuse_core::wavelet::{self, BandSplit};
use wavefuse_core::{Error, GrayRaster, Result};

use crate::config::{FusionMode, PipelineConfig, Segmentor};

pub struct LoadedPair {
    pub t1: GrayRaster,
    pub t2: GrayRaster,
    pub truth: Option<ChangeMap>,
}

pub fn load_inputs(cfg: &PipelineConfig) -> Result<LoadedPair> {
    let t1 = io::load_raster_auto(&cfg.t1)?;
    let t2 = io::load_raster_auto(&cfg.t2)?;
    if !t1.same_dimensions(&t2) {
        return Err(Error::DimensionMismatch(
            t1.width(),
            t1.height(),
            t2.width(),
            t2.height(),
        ));
    }
    let truth = match &cfg.truth {
        Some(path) => {
            let raster = io::load_raster_auto(path)?;
            if !raster.same_dimensions(&t1) {
                return Err(Error::DimensionMismatch(
                    t1.width(),
                    t1.height(),
                    raster.width(),
                    raster.height(),
                ));
            }
            Some(ChangeMap::from_raster(&raster))
        }
        None => None,
    };
    Ok(LoadedPair { t1, t2, truth })
}

pub fn fuse(cfg: &PipelineConfig, t1: &GrayRaster, t2: &GrayRaster) -> Result<DifferenceMap> {
    match cfg.fusion {
        FusionMode::Minus => diffmap::minus_map(t1, t2),
        FusionMode::Ratio => diffmap::ratio_map(t1, t2, cfg.ratio_eps),
        FusionMode::Weighted => {
            let minus = diffmap::minus_map(t1, t2)?;
            let ratio = diffmap::ratio_map(t1, t2, cfg.ratio_eps)?;
            diffmap::weighted_average_fuse(&minus, &ratio, cfg.weight)
        }
        FusionMode::Dwt => {
            let minus = diffmap::minus_map(t1, t2)?;
            let ratio = diffmap::ratio_map(t1, t2, cfg.ratio_eps)?;
            wavelet::dwt_fuse_maps(&minus, &ratio, cfg.levels, BandSplit::new(cfg.split)?)
        }
    }
}

pub fn segment_map(
    cfg: &PipelineConfig,
    segmentor: Segmentor,
    diff: &DifferenceMap,
) -> Result<ChangeMap> {
    let raster = &diff.raster;
    let x = raster.values();
    match segmentor {
        Segmentor::Otsu => {
            let threshold = segment::otsu_threshold(x);
            segment::threshold_change_map(x, threshold, raster.width(), raster.height())
        }
        Segmentor::Kmeans => {
            let (labels, centers) = segment::kmeans(x, cfg.clusters, cfg.seed, cfg.max_iter)?;
            segment::labels_to_change_map(&labels, &centers, raster.width(), raster.height())
        }
        Segmentor::Fcm => {
            let fcm_cfg = FcmConfig {
                c: cfg.clusters,
                m: cfg.fuzziness,
                eps: cfg.eps,
                max_iter: cfg.max_iter,
                seed: cfg.seed,
            };
            let (u, v) = segment::fcm(x, &fcm_cfg)?;
            segment::to_change_map(&u, &v, raster.width(), raster.height())
        }
    }
}

pub struct RunOutput {
    pub fused: DifferenceMap,
    pub change_map: ChangeMap,
    pub report: Option<EvalReport>,
}

/// Full pipeline: load, fuse, segment, optionally score.
pub fn run(cfg: &PipelineConfig) -> Result<RunOutput> {
    let inputs = load_inputs(cfg)?;
    let fused = fuse(cfg, &inputs.t1, &inputs.t2)?;
    let change_map = segment_map(cfg, cfg.segmentor, &fused)?;
    let report = inputs
        .truth
        .as_ref()
        .map(|truth| evaluate::report(&change_map, truth))
        .transpose()?;
    Ok(RunOutput {
        fused,
        change_map,
        report,
    })
}

/// Write the image artifacts for one run into the output directory.
pub fn write_artifacts(out_dir: &Path, fused: &DifferenceMap, map: &ChangeMap) -> Result<()> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::IoFailure {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    io::save_raster_auto(&fused.raster, &out_dir.join("fused_diff.png"))?;
    io::save_raster_auto(&map.to_raster(), &out_dir.join("change_map.png"))?;
    Ok(())
}

/// The comparison protocol: every segmentor over every test set, rows
/// ordered method-major like the published table.
pub fn compare(
    cfg: &PipelineConfig,
    sets: &[(String, LoadedPair)],
) -> Result<Vec<(String, String, EvalReport)>> {
    let mut rows = Vec::new();
    for segmentor in [Segmentor::Otsu, Segmentor::Kmeans, Segmentor::Fcm] {
        for (id, pair) in sets {
            let truth = pair
                .truth
                .as_ref()
                .expect("compare requires truth for every set");
            let fused = fuse(cfg, &pair.t1, &pair.t2)?;
            let map = segment_map(cfg, segmentor, &fused)?;
            let report = evaluate::report(&map, truth)?;
            rows.push((segmentor.name().to_string(), id.clone(), report));
        }
    }
    Ok(rows)
}
