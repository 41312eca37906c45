//! Pipeline settings with three-way precedence: CLI flag, then config
//! file, then default. The config file is line-oriented `key=value`;
//! `#` starts a comment.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use wavefuse_core::diffmap::DEFAULT_RATIO_EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FusionMode {
    Minus,
    Ratio,
    Weighted,
    Dwt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Segmentor {
    Otsu,
    Kmeans,
    Fcm,
}

impl FromStr for FusionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "minus" => Ok(Self::Minus),
            "ratio" => Ok(Self::Ratio),
            "weighted" => Ok(Self::Weighted),
            "dwt" => Ok(Self::Dwt),
            _ => Err(format!("unknown fusion mode '{s}'")),
        }
    }
}

impl FromStr for Segmentor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "otsu" => Ok(Self::Otsu),
            "kmeans" => Ok(Self::Kmeans),
            "fcm" => Ok(Self::Fcm),
            _ => Err(format!("unknown segmentor '{s}'")),
        }
    }
}

impl Segmentor {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Otsu => "otsu",
            Self::Kmeans => "kmeans",
            Self::Fcm => "fcm",
        }
    }
}

/// Fully resolved pipeline settings.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub t1: PathBuf,
    pub t2: PathBuf,
    pub truth: Option<PathBuf>,
    pub fusion: FusionMode,
    pub weight: f64,
    pub levels: usize,
    pub split: f64,
    pub ratio_eps: f64,
    pub segmentor: Segmentor,
    pub clusters: usize,
    pub fuzziness: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// Flag-shaped optional settings, as they arrive from the command line
/// or the config file.
#[derive(Debug, Clone, Default)]
pub struct PartialConfig {
    pub t1: Option<PathBuf>,
    pub t2: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub fusion: Option<FusionMode>,
    pub weight: Option<f64>,
    pub levels: Option<usize>,
    pub split: Option<f64>,
    pub segmentor: Option<Segmentor>,
    pub clusters: Option<usize>,
    pub fuzziness: Option<f64>,
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Which input paths a subcommand needs before the pipeline can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputPolicy {
    /// Paths come from elsewhere (e.g. `compare --set`).
    None,
    /// `--t1` and `--t2` are required, `--truth` optional.
    Pair,
    /// `--t1`, `--t2` and `--truth` are all required.
    PairWithTruth,
}

impl PartialConfig {
    /// Fill holes from a lower-precedence source.
    pub fn or(self, fallback: PartialConfig) -> PartialConfig {
        PartialConfig {
            t1: self.t1.or(fallback.t1),
            t2: self.t2.or(fallback.t2),
            truth: self.truth.or(fallback.truth),
            fusion: self.fusion.or(fallback.fusion),
            weight: self.weight.or(fallback.weight),
            levels: self.levels.or(fallback.levels),
            split: self.split.or(fallback.split),
            segmentor: self.segmentor.or(fallback.segmentor),
            clusters: self.clusters.or(fallback.clusters),
            fuzziness: self.fuzziness.or(fallback.fuzziness),
            eps: self.eps.or(fallback.eps),
            max_iter: self.max_iter.or(fallback.max_iter),
            seed: self.seed.or(fallback.seed),
            out_dir: self.out_dir.or(fallback.out_dir),
        }
    }

    /// Apply defaults and enforce the given input-path requirement.
    pub fn resolve(self, inputs: InputPolicy) -> Result<PipelineConfig, String> {
        let (t1, t2) = if inputs == InputPolicy::None {
            (
                self.t1.unwrap_or_default(),
                self.t2.unwrap_or_default(),
            )
        } else {
            (
                self.t1.ok_or("missing required input --t1")?,
                self.t2.ok_or("missing required input --t2")?,
            )
        };
        if inputs == InputPolicy::PairWithTruth && self.truth.is_none() {
            return Err("missing required input --truth".into());
        }
        let cfg = PipelineConfig {
            t1,
            t2,
            truth: self.truth,
            fusion: self.fusion.unwrap_or(FusionMode::Dwt),
            weight: self.weight.unwrap_or(0.5),
            levels: self.levels.unwrap_or(1),
            split: self.split.unwrap_or(0.5),
            ratio_eps: DEFAULT_RATIO_EPS,
            segmentor: self.segmentor.unwrap_or(Segmentor::Fcm),
            clusters: self.clusters.unwrap_or(6),
            fuzziness: self.fuzziness.unwrap_or(2.0),
            eps: self.eps.unwrap_or(1e-5),
            max_iter: self.max_iter.unwrap_or(300),
            seed: self.seed.unwrap_or(0),
            out_dir: self.out_dir.unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl PipelineConfig {
    fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.weight) {
            return Err(format!("--weight {} outside [0,1]", self.weight));
        }
        if !(self.split > 0.0 && self.split < 1.0) {
            return Err(format!("--split {} outside (0,1)", self.split));
        }
        if self.levels == 0 {
            return Err("--levels must be >= 1".into());
        }
        if self.clusters < 1 {
            return Err("--clusters must be >= 1".into());
        }
        if self.segmentor == Segmentor::Fcm && self.clusters < 2 {
            return Err("--clusters must be >= 2 for fcm".into());
        }
        if self.fuzziness <= 1.0 {
            return Err(format!("--fuzziness {} must be > 1", self.fuzziness));
        }
        if self.eps <= 0.0 {
            return Err("--eps must be positive".into());
        }
        if self.max_iter == 0 {
            return Err("--max-iter must be >= 1".into());
        }
        Ok(())
    }
}

/// Read a `key=value` config file into flag-shaped settings.
pub fn read_config_file(path: &Path) -> Result<PartialConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut map = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key=value", path.display(), lineno + 1))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    partial_from_map(map).map_err(|e| format!("{}: {e}", path.display()))
}

fn partial_from_map(mut map: HashMap<String, String>) -> Result<PartialConfig, String> {
    fn take<T: FromStr>(
        map: &mut HashMap<String, String>,
        key: &str,
    ) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        match map.remove(key) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| format!("bad value for '{key}': {e}")),
            None => Ok(None),
        }
    }

    let cfg = PartialConfig {
        t1: take::<PathBuf>(&mut map, "t1")?,
        t2: take::<PathBuf>(&mut map, "t2")?,
        truth: take::<PathBuf>(&mut map, "truth")?,
        fusion: take::<FusionMode>(&mut map, "fusion")?,
        weight: take::<f64>(&mut map, "weight")?,
        levels: take::<usize>(&mut map, "levels")?,
        split: take::<f64>(&mut map, "split")?,
        segmentor: take::<Segmentor>(&mut map, "segmentor")?,
        clusters: take::<usize>(&mut map, "clusters")?,
        fuzziness: take::<f64>(&mut map, "fuzziness")?,
        eps: take::<f64>(&mut map, "eps")?,
        max_iter: take::<usize>(&mut map, "max_iter")?,
        seed: take::<u64>(&mut map, "seed")?,
        out_dir: take::<PathBuf>(&mut map, "out_dir")?,
    };
    if let Some(key) = map.keys().next() {
        return Err(format!("unknown config key '{key}'"));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_overrides_file_overrides_default() {
        let file = PartialConfig {
            seed: Some(5),
            clusters: Some(4),
            t1: Some("a.png".into()),
            t2: Some("b.png".into()),
            ..Default::default()
        };
        let cli = PartialConfig {
            seed: Some(9),
            ..Default::default()
        };
        let cfg = cli.or(file).resolve(InputPolicy::Pair).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.clusters, 4);
        assert_eq!(cfg.max_iter, 300);
        assert_eq!(cfg.fuzziness, 2.0);
    }

    #[test]
    fn missing_inputs_are_reported_by_flag_name() {
        let err = PartialConfig::default().resolve(InputPolicy::Pair).unwrap_err();
        assert!(err.contains("--t1"));
        let err = PartialConfig {
            t1: Some("a.png".into()),
            ..Default::default()
        }
        .resolve(InputPolicy::Pair)
        .unwrap_err();
        assert!(err.contains("--t2"));
    }

    #[test]
    fn config_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(
            &path,
            "# pipeline\nt1 = a.png\nt2=b.png\nfusion=dwt\nsegmentor=fcm\nclusters=3\nseed=42\n",
        )
        .unwrap();
        let p = read_config_file(&path).unwrap();
        let cfg = p.resolve(InputPolicy::Pair).unwrap();
        assert_eq!(cfg.clusters, 3);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.fusion, FusionMode::Dwt);
    }

    #[test]
    fn unknown_key_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(&path, "bogus=1\n").unwrap();
        assert!(read_config_file(&path).unwrap_err().contains("bogus"));
    }

    #[test]
    fn bad_numeric_values_rejected() {
        let bad = PartialConfig {
            t1: Some("a".into()),
            t2: Some("b".into()),
            weight: Some(1.5),
            ..Default::default()
        };
        assert!(bad.resolve(InputPolicy::Pair).is_err());
    }
}
