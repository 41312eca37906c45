//! End-to-end tests of the `wavefuse` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wavefuse"))
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn synth_scene(dir: &Path, id: &str, seed: u64) -> (PathBuf, PathBuf, PathBuf) {
    run_ok(&[
        "synth",
        "--id",
        id,
        "--seed",
        &seed.to_string(),
        "--width",
        "96",
        "--height",
        "96",
        "--shapes",
        "2",
        "--noise-sigma",
        "0.02",
        "--contrast-delta",
        "0.5",
        "--out-dir",
        dir.to_str().unwrap(),
    ]);
    (
        dir.join(format!("{id}_t1.png")),
        dir.join(format!("{id}_t2.png")),
        dir.join(format!("{id}_truth.png")),
    )
}

#[test]
fn synth_writes_loadable_triple() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, t2, truth) = synth_scene(dir.path(), "a", 3);
    for p in [&t1, &t2, &truth] {
        let r = wavefuse_core::io::load_raster_auto(p).unwrap();
        assert_eq!((r.width(), r.height()), (96, 96));
    }
}

#[test]
fn run_produces_artifacts_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, t2, truth) = synth_scene(dir.path(), "a", 5);
    let out_dir = dir.path().join("out");
    let out = run_ok(&[
        "run",
        "--t1",
        t1.to_str().unwrap(),
        "--t2",
        t2.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--fusion",
        "dwt",
        "--segmentor",
        "fcm",
        "--seed",
        "1",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("kappa="));
    for name in ["fused_diff.png", "change_map.png", "report.csv"] {
        assert!(out_dir.join(name).exists(), "missing {name}");
    }
    // intermediate artifacts are re-loadable
    wavefuse_core::io::load_raster_auto(&out_dir.join("fused_diff.png")).unwrap();
    wavefuse_core::io::load_raster_auto(&out_dir.join("change_map.png")).unwrap();
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    assert!(csv.starts_with("method,test_id,tp,fp,tn,fn,"));
}

#[test]
fn run_without_truth_reports_change_fraction_only() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, t2, _) = synth_scene(dir.path(), "a", 7);
    let out_dir = dir.path().join("out");
    let out = run_ok(&[
        "run",
        "--t1",
        t1.to_str().unwrap(),
        "--t2",
        t2.to_str().unwrap(),
        "--segmentor",
        "otsu",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("change_fraction="));
    assert!(!out_dir.join("report.csv").exists());
}

#[test]
fn identical_inputs_fcm_stays_below_noise_floor() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, _, _) = synth_scene(dir.path(), "a", 11);
    let out_dir = dir.path().join("out");
    let out = run_ok(&[
        "run",
        "--t1",
        t1.to_str().unwrap(),
        "--t2",
        t1.to_str().unwrap(),
        "--segmentor",
        "fcm",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let fraction: f64 = stdout
        .trim()
        .strip_prefix("change_fraction=")
        .unwrap()
        .parse()
        .unwrap();
    assert!(fraction <= 0.01, "change fraction {fraction} above 1%");
}

#[test]
fn missing_t2_flag_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, _, _) = synth_scene(dir.path(), "a", 2);
    let out = bin()
        .args(["run", "--t1", t1.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("--t2"), "diagnostic must name the flag: {stderr}");
}

#[test]
fn nonexistent_input_exits_with_io_error() {
    let out = bin()
        .args(["run", "--t1", "/no/such/a.png", "--t2", "/no/such/b.png"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn mismatched_dimensions_exit_with_numeric_error() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, _, _) = synth_scene(dir.path(), "a", 2);
    let small = wavefuse_core::GrayRaster::constant(32, 32, 0.5).unwrap();
    let t2 = dir.path().join("small.png");
    wavefuse_core::io::save_raster_auto(&small, &t2).unwrap();
    let out = bin()
        .args([
            "run",
            "--t1",
            t1.to_str().unwrap(),
            "--t2",
            t2.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn config_file_supplies_settings_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, t2, truth) = synth_scene(dir.path(), "a", 9);
    let out_a = dir.path().join("out_a");
    let out_b = dir.path().join("out_b");
    let cfg = dir.path().join("pipeline.cfg");
    std::fs::write(
        &cfg,
        format!(
            "t1={}\nt2={}\ntruth={}\nsegmentor=kmeans\nseed=4\nout_dir={}\n",
            t1.display(),
            t2.display(),
            truth.display(),
            out_a.display()
        ),
    )
    .unwrap();
    run_ok(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(out_a.join("report.csv").exists());
    let row = std::fs::read_to_string(out_a.join("report.csv")).unwrap();
    assert!(row.lines().nth(1).unwrap().starts_with("kmeans,"));

    // the flag wins over the file
    run_ok(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--segmentor",
        "otsu",
        "--out-dir",
        out_b.to_str().unwrap(),
    ]);
    let row = std::fs::read_to_string(out_b.join("report.csv")).unwrap();
    assert!(row.lines().nth(1).unwrap().starts_with("otsu,"));
}

#[test]
fn compare_emits_method_major_table() {
    let dir = tempfile::tempdir().unwrap();
    let mut set_args = Vec::new();
    for (i, seed) in [21u64, 22, 23].iter().enumerate() {
        let id = format!("set{}", i + 1);
        let (t1, t2, truth) = synth_scene(dir.path(), &id, *seed);
        set_args.push(format!(
            "{id}={},{},{}",
            t1.display(),
            t2.display(),
            truth.display()
        ));
    }
    let out_dir = dir.path().join("out");
    let mut args = vec!["compare".to_string()];
    for s in &set_args {
        args.push("--set".into());
        args.push(s.clone());
    }
    args.extend([
        "--fusion".into(),
        "dwt".into(),
        "--seed".into(),
        "1".into(),
        "--out-dir".into(),
        out_dir.to_string_lossy().into_owned(),
    ]);
    let out = bin().args(&args).output().unwrap();
    assert!(out.status.success());
    let csv = std::fs::read_to_string(out_dir.join("report.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 10); // header + 3 methods x 3 sets
    let methods: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(
        methods,
        vec!["otsu", "otsu", "otsu", "kmeans", "kmeans", "kmeans", "fcm", "fcm", "fcm"]
    );
}

#[test]
fn dwt_roundtrip_diagnostic_passes_on_real_image() {
    let dir = tempfile::tempdir().unwrap();
    let (t1, _, _) = synth_scene(dir.path(), "a", 30);
    let out = run_ok(&["dwt-roundtrip", "--input", t1.to_str().unwrap(), "--levels", "3"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("max_reconstruction_error="));
    assert!(stdout.contains("crop_round_trip_ok=true"));
}
