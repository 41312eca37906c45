mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wavefuse_core::evaluate::CSV_HEADER;
use wavefuse_core::raster::{crop, pad_to_pow2};
use wavefuse_core::synth::{generate_pair, SceneSpec};
use wavefuse_core::wavelet::{dwt2, idwt2};
use wavefuse_core::{io, Error};

use config::{FusionMode, InputPolicy, PartialConfig, PipelineConfig, Segmentor};

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(
    name = "wavefuse",
    about = "Change detection: wavelet-domain difference-map fusion with FCM/K-Means/Otsu segmentation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on one image pair
    Run(RunArgs),
    /// Score every segmentor over one or more test sets
    Compare(CompareArgs),
    /// Generate a synthetic pair with ground truth
    Synth(SynthArgs),
    /// Diagnostics: forward+inverse transform an image and report the error
    DwtRoundtrip(RoundtripArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// First (earlier) input image
    #[arg(long)]
    t1: Option<PathBuf>,
    /// Second (later) input image
    #[arg(long)]
    t2: Option<PathBuf>,
    /// Ground-truth change map (binarized at 0.5 on load)
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Difference-map fusion mode
    #[arg(long, value_enum)]
    fusion: Option<FusionMode>,
    /// Segmentation method
    #[arg(long, value_enum)]
    segmentor: Option<Segmentor>,
    /// Cluster count for fcm and kmeans
    #[arg(long)]
    clusters: Option<usize>,
    /// FCM fuzziness exponent (> 1)
    #[arg(long)]
    fuzziness: Option<f64>,
    /// FCM convergence tolerance on the membership change
    #[arg(long)]
    eps: Option<f64>,
    /// Iteration cap for fcm and kmeans
    #[arg(long)]
    max_iter: Option<usize>,
    /// Wavelet decomposition depth (dwt fusion)
    #[arg(long)]
    levels: Option<usize>,
    /// Band-split boundary fraction in (0,1) (dwt fusion)
    #[arg(long)]
    split: Option<f64>,
    /// Blend weight in [0,1] (weighted fusion)
    #[arg(long)]
    weight: Option<f64>,
    /// RNG seed for reproducible segmentation
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// key=value config file; CLI flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Test set as id=t1,t2,truth; repeatable. Without it, --t1/--t2/--truth
    /// form a single set.
    #[arg(long = "set")]
    sets: Vec<String>,
}

#[derive(Args)]
struct SynthArgs {
    /// Scene identifier; files are <id>_t1.png, <id>_t2.png, <id>_truth.png
    #[arg(long, default_value = "scene")]
    id: String,
    #[arg(long, default_value_t = 256)]
    width: usize,
    #[arg(long, default_value_t = 256)]
    height: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of change regions
    #[arg(long, default_value_t = 2)]
    shapes: usize,
    /// Additive Gaussian noise sigma
    #[arg(long, default_value_t = 0.02)]
    noise_sigma: f64,
    /// Intensity offset inside change regions
    #[arg(long, default_value_t = 0.4)]
    contrast_delta: f64,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RoundtripArgs {
    /// Input image
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 1)]
    levels: usize,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::FileNotFound(_)
        | Error::UnsupportedFormat(_)
        | Error::CorruptImage { .. }
        | Error::IoFailure { .. } => EXIT_IO,
        Error::InvalidParameter(_) | Error::WeightOutOfRange(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

impl CommonArgs {
    fn to_partial(&self) -> PartialConfig {
        PartialConfig {
            t1: self.t1.clone(),
            t2: self.t2.clone(),
            truth: self.truth.clone(),
            fusion: self.fusion,
            weight: self.weight,
            levels: self.levels,
            split: self.split,
            segmentor: self.segmentor,
            clusters: self.clusters,
            fuzziness: self.fuzziness,
            eps: self.eps,
            max_iter: self.max_iter,
            seed: self.seed,
            out_dir: self.out_dir.clone(),
        }
    }

    fn resolve(&self, inputs: InputPolicy) -> Result<PipelineConfig, String> {
        let mut merged = self.to_partial();
        if let Some(path) = &self.config {
            merged = merged.or(config::read_config_file(path)?);
        }
        merged.resolve(inputs)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Synth(args) => cmd_synth(args),
        Command::DwtRoundtrip(args) => cmd_roundtrip(args),
    }
}

fn cmd_run(args: RunArgs) -> ExitCode {
    let cfg = match args.common.resolve(InputPolicy::Pair) {
        Ok(cfg) => cfg,
        Err(msg) => return fail(EXIT_CONFIG, msg),
    };
    let output = match pipeline::run(&cfg) {
        Ok(out) => out,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    if let Err(e) = pipeline::write_artifacts(&cfg.out_dir, &output.fused, &output.change_map) {
        return fail(exit_code_for(&e), e);
    }
    if let Some(report) = &output.report {
        let csv = format!(
            "{CSV_HEADER}\n{}\n",
            report.csv_row(cfg.segmentor.name(), "run")
        );
        if let Err(e) = std::fs::write(cfg.out_dir.join("report.csv"), csv) {
            return fail(EXIT_IO, e);
        }
        print!("{}", report.key_value());
    } else {
        println!(
            "change_fraction={:.4}",
            output.change_map.change_fraction()
        );
    }
    ExitCode::SUCCESS
}

fn parse_set(spec: &str) -> Result<(String, PathBuf, PathBuf, PathBuf), String> {
    let (id, rest) = spec
        .split_once('=')
        .ok_or_else(|| format!("--set '{spec}': expected id=t1,t2,truth"))?;
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("--set '{spec}': expected three comma-separated paths"));
    }
    Ok((
        id.to_string(),
        parts[0].into(),
        parts[1].into(),
        parts[2].into(),
    ))
}

fn cmd_compare(args: CompareArgs) -> ExitCode {
    let single_set = args.sets.is_empty();
    let policy = if single_set {
        InputPolicy::PairWithTruth
    } else {
        InputPolicy::None
    };
    let cfg = match args.common.resolve(policy) {
        Ok(cfg) => cfg,
        Err(msg) => return fail(EXIT_CONFIG, msg),
    };

    let mut sets = Vec::new();
    if single_set {
        match pipeline::load_inputs(&cfg) {
            Ok(pair) => sets.push(("set1".to_string(), pair)),
            Err(e) => return fail(exit_code_for(&e), e),
        }
    } else {
        for spec in &args.sets {
            let (id, t1, t2, truth) = match parse_set(spec) {
                Ok(parsed) => parsed,
                Err(msg) => return fail(EXIT_CONFIG, msg),
            };
            let set_cfg = PipelineConfig {
                t1,
                t2,
                truth: Some(truth),
                ..cfg.clone()
            };
            match pipeline::load_inputs(&set_cfg) {
                Ok(pair) => sets.push((id, pair)),
                Err(e) => return fail(exit_code_for(&e), e),
            }
        }
    }

    let rows = match pipeline::compare(&cfg, &sets) {
        Ok(rows) => rows,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for (method, id, report) in &rows {
        csv.push_str(&report.csv_row(method, id));
        csv.push('\n');
    }
    if let Err(e) = std::fs::create_dir_all(&cfg.out_dir) {
        return fail(EXIT_IO, e);
    }
    if let Err(e) = std::fs::write(cfg.out_dir.join("report.csv"), &csv) {
        return fail(EXIT_IO, e);
    }
    print!("{csv}");
    ExitCode::SUCCESS
}

fn cmd_synth(args: SynthArgs) -> ExitCode {
    let spec = SceneSpec {
        width: args.width,
        height: args.height,
        seed: args.seed,
        n_shapes: args.shapes,
        noise_sigma: args.noise_sigma,
        contrast_delta: args.contrast_delta,
    };
    let (a, b, truth) = match generate_pair(&spec) {
        Ok(triple) => triple,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    if let Err(e) = std::fs::create_dir_all(&args.out_dir) {
        return fail(EXIT_IO, e);
    }
    let write = |name: &str, raster| {
        io::save_raster_auto(raster, &args.out_dir.join(format!("{}_{name}.png", args.id)))
    };
    let truth_raster = truth.to_raster();
    let result = write("t1", &a)
        .and_then(|_| write("t2", &b))
        .and_then(|_| write("truth", &truth_raster));
    if let Err(e) = result {
        return fail(exit_code_for(&e), e);
    }
    println!(
        "id={} change_fraction={:.4}",
        args.id,
        truth.change_fraction()
    );
    ExitCode::SUCCESS
}

fn cmd_roundtrip(args: RoundtripArgs) -> ExitCode {
    let raster = match io::load_raster_auto(&args.input) {
        Ok(r) => r,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    let (padded, record) = pad_to_pow2(&raster);
    let pyramid = match dwt2(&padded, args.levels) {
        Ok(p) => p,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    let grid = idwt2(&pyramid);
    let max_err = padded
        .values()
        .iter()
        .zip(&grid)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let energy_in: f64 = padded.values().iter().map(|v| v * v).sum();
    let energy_out: f64 = pyramid.coeffs().iter().map(|v| v * v).sum();
    println!(
        "side={} levels={} max_reconstruction_error={max_err:.3e} energy_ratio={:.12}",
        pyramid.side(),
        pyramid.levels(),
        energy_out / energy_in.max(f64::MIN_POSITIVE)
    );
    // keep the record in play so cropping stays exercised end to end
    let clamped: Vec<f64> = grid.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    let square = match wavefuse_core::GrayRaster::new(pyramid.side(), pyramid.side(), clamped) {
        Ok(r) => r,
        Err(e) => return fail(exit_code_for(&e), e),
    };
    match crop(&square, &record) {
        Ok(back) => {
            let identical = back
                .values()
                .iter()
                .zip(raster.values())
                .all(|(a, b)| (a - b).abs() < 1e-9);
            println!("crop_round_trip_ok={identical}");
        }
        Err(e) => return fail(exit_code_for(&e), e),
    }
    if max_err < 1e-9 {
        ExitCode::SUCCESS
    } else {
        fail(EXIT_NUMERIC, format!("reconstruction error {max_err:.3e} exceeds 1e-9"))
    }
}
