//! CLI contract tests: output files, exit codes, config/flag precedence,
//! and the phantom -> segment -> eval round trip.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_lesionseg")
}

fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(exe()).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Build a small phantom in `dir` and return the image / truth paths.
fn make_small_phantom(dir: &Path) -> (PathBuf, PathBuf) {
    let spec = dir.join("spec.json");
    std::fs::write(
        &spec,
        r#"{
          "width": 64, "height": 64,
          "tissue_levels": [0.2, 0.55],
          "lesions": [{"cx": 40, "cy": 40, "a": 8, "b": 6, "angle": 0.4, "intensity": 0.85}],
          "bias_poly": [0, 1, 0.8, 0, 0, 0],
          "bias_amp": 0.05, "noise_sigma": 0.02, "seed": 9
        }"#,
    )
    .unwrap();
    let ph = dir.join("ph");
    let out = run([
        "phantom".as_ref(),
        "--spec".as_ref(),
        spec.as_os_str(),
        "--out-dir".as_ref(),
        ph.as_os_str(),
    ]);
    assert_eq!(code(&out), 0, "phantom failed: {}", String::from_utf8_lossy(&out.stderr));
    (ph.join("image.pgm"), ph.join("truth.pgm"))
}

#[test]
fn segment_writes_all_outputs_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let (image, truth) = make_small_phantom(dir.path());
    let seg = dir.path().join("seg");
    let out = run([
        "segment".as_ref(),
        "--input".as_ref(),
        image.as_os_str(),
        "--truth".as_ref(),
        truth.as_os_str(),
        "--brain-threshold".as_ref(),
        "0.01".as_ref(),
        "--out-dir".as_ref(),
        seg.as_os_str(),
    ]);
    assert_eq!(code(&out), 0, "segment failed: {}", String::from_utf8_lossy(&out.stderr));
    for f in ["lesion_mask.pgm", "edges.pgm", "labels.pgm", "bias.pgm", "overlay.pgm", "report.json"]
    {
        assert!(seg.join(f).exists(), "missing output {f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(seg.join("report.json")).unwrap()).unwrap();
    // defaults are materialized in the echoed config
    assert_eq!(report["config"]["fcm"]["c"], 3);
    assert_eq!(report["config"]["fcm"]["m"], 2.0);
    assert_eq!(report["config"]["brain"]["threshold"], 0.01);
    // --truth adds the overlap metrics
    let metrics = &report["metrics"];
    for key in ["dice", "jaccard", "sensitivity", "specificity"] {
        let v = metrics[key].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&v), "{key} = {v}");
    }
    assert!(metrics["dice"].as_f64().unwrap() > 0.5, "implausibly low dice on easy phantom");
    assert!(report["iterations"].as_u64().unwrap() >= 1);
    assert!(report["wall_ms"].is_number());
}

#[test]
fn round_trip_eval_reports_perfect_score_on_truth() {
    let dir = tempfile::tempdir().unwrap();
    let (_, truth) = make_small_phantom(dir.path());
    let out = run([
        "eval".as_ref(),
        "--pred".as_ref(),
        truth.as_os_str(),
        "--truth".as_ref(),
        truth.as_os_str(),
    ]);
    assert_eq!(code(&out), 0);
    let metrics: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["dice", "jaccard", "sensitivity", "specificity", "edge_f1"] {
        assert_eq!(metrics[key], 1.0, "{key} != 1 on identical masks");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let (image, _) = make_small_phantom(dir.path());
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
          "brain": {"threshold": 0.01},
          "fcm": {"alpha": 0.5, "max_iter": 30},
          "min_lesion_px": 7
        }"#,
    )
    .unwrap();
    let seg = dir.path().join("seg");
    let out = run([
        "segment".as_ref(),
        "--input".as_ref(),
        image.as_os_str(),
        "--config".as_ref(),
        config.as_os_str(),
        "--alpha".as_ref(),
        "2.0".as_ref(),
        "--out-dir".as_ref(),
        seg.as_os_str(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(seg.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["fcm"]["alpha"], 2.0, "flag must override config value");
    assert_eq!(report["config"]["fcm"]["max_iter"], 30, "config value must survive");
    assert_eq!(report["config"]["min_lesion_px"], 7);
    assert_eq!(report["config"]["brain"]["threshold"], 0.01);
}

#[test]
fn edges_all_methods_run() {
    let dir = tempfile::tempdir().unwrap();
    let (image, _) = make_small_phantom(dir.path());
    for method in ["canny", "sobel", "prewitt", "marr-hildreth"] {
        let out_path = dir.path().join(format!("{method}.pgm"));
        let out = run([
            "edges".as_ref(),
            "--input".as_ref(),
            image.as_os_str(),
            "--method".as_ref(),
            method.as_ref(),
            "--out".as_ref(),
            out_path.as_os_str(),
        ]);
        assert_eq!(code(&out), 0, "{method}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out_path.exists());
    }
}

#[test]
fn fcm_writes_memberships_and_centroids() {
    let dir = tempfile::tempdir().unwrap();
    let (image, _) = make_small_phantom(dir.path());
    let out_dir = dir.path().join("fcm");
    let out = run([
        "fcm".as_ref(),
        "--input".as_ref(),
        image.as_os_str(),
        "--clusters".as_ref(),
        "3".as_ref(),
        "--out-dir".as_ref(),
        out_dir.as_os_str(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["membership_0.pgm", "membership_1.pgm", "membership_2.pgm", "bias.pgm", "centroids.json"]
    {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("centroids.json")).unwrap())
            .unwrap();
    let centroids: Vec<f64> =
        summary["centroids"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(centroids.len(), 3);
    assert!(centroids.windows(2).all(|w| w[0] <= w[1]), "centroids not ascending");
    assert_eq!(summary["params"]["c"], 3, "effective params echoed");
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let (image, _) = make_small_phantom(dir.path());
    // missing required --input
    let out = run(["segment", "--out-dir", "/tmp/x"]);
    assert_eq!(code(&out), 1);
    // unknown edge method
    let out = run([
        "edges".as_ref(),
        "--input".as_ref(),
        image.as_os_str(),
        "--method".as_ref(),
        "laplace".as_ref(),
        "--out".as_ref(),
        "/tmp/x.pgm".as_ref(),
    ]);
    assert_eq!(code(&out), 1);
    // parameter validation: m must be > 1
    let out = run([
        "fcm".as_ref(),
        "--input".as_ref(),
        image.as_os_str(),
        "--m".as_ref(),
        "1.0".as_ref(),
        "--out-dir".as_ref(),
        dir.path().join("x").as_os_str(),
    ]);
    assert_eq!(code(&out), 1);
    // --help is not an error
    let out = run(["--help"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // nonexistent file
    let out = run(["segment", "--input", "/nonexistent/img.pgm", "--out-dir", "/tmp/x"]);
    assert_eq!(code(&out), 2);
    // malformed PGM (truncated payload)
    let bad = dir.path().join("bad.pgm");
    std::fs::write(&bad, b"P5\n4 4\n255\nxy").unwrap();
    let out = run([
        "segment".as_ref(),
        "--input".as_ref(),
        bad.as_os_str(),
        "--out-dir".as_ref(),
        dir.path().join("o").as_os_str(),
    ]);
    assert_eq!(code(&out), 2);
    // unsupported format
    let odd = dir.path().join("odd.img");
    std::fs::write(&odd, b"GIF89a nonsense").unwrap();
    let out = run([
        "segment".as_ref(),
        "--input".as_ref(),
        odd.as_os_str(),
        "--out-dir".as_ref(),
        dir.path().join("o2").as_os_str(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn pipeline_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let (image, _) = make_small_phantom(dir.path());
    // all-zero external mask -> empty-mask pipeline failure
    let mut mask = Vec::from(&b"P5\n64 64\n255\n"[..]);
    mask.extend(std::iter::repeat_n(0u8, 64 * 64));
    let mask_path = dir.path().join("zeros.pgm");
    std::fs::write(&mask_path, mask).unwrap();
    let out = run([
        "segment".as_ref(),
        "--input".as_ref(),
        image.as_os_str(),
        "--mask".as_ref(),
        mask_path.as_os_str(),
        "--out-dir".as_ref(),
        dir.path().join("o").as_os_str(),
    ]);
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
