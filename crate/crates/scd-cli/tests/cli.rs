//! End-to-end tests of the `scd` binary: file round-trips, exit codes,
//! and output formats.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scd() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scd"))
}

fn run(args: &[&str]) -> Output {
    scd().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

const BCC_CONFIG: &str = r#"{
  "params": {"lambda": 0.5, "a_len": 1.0, "angle": {"rational_cos": {"p": 0, "q": 1}}, "c3": 0.5},
  "shifts": {"vectors": {"offsets": [[0.0, 0.0], [0.5, 0.5]]}}
}"#;

const BCC_PARAMS: &str =
    r#"{"lambda": 0.5, "a_len": 1.0, "angle": {"rational_cos": {"p": 0, "q": 1}}, "c3": 0.5}"#;

#[test]
fn tile_writes_obj_and_volume() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(dir.path(), "params.json", BCC_PARAMS);
    let out = dir.path().join("tile.obj");
    let output = run(&[
        "tile",
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--volume",
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(
        stdout.contains("volume = 5.0000000000000000e-1"),
        "{stdout}"
    );
    let obj = fs::read_to_string(&out).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 8);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 12);
}

#[test]
fn tile_rejects_bad_lambda_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let params = write(
        dir.path(),
        "bad.json",
        r#"{"lambda": 1.5, "a_len": 1.0, "angle": {"rational_cos": {"p": 0, "q": 1}}, "c3": 0.5}"#,
    );
    let out = dir.path().join("tile.obj");
    let output = run(&[
        "tile",
        "--params",
        params.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn malformed_config_names_field_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "bad.json",
        r#"{"params": {"lambda": 0.5, "a_len": 1.0, "angle": {"rational_cos": {"p": 0, "q": 1}}, "c3": 0.5}, "shiftz": {"zero": null}}"#,
    );
    let out = dir.path().join("cloud.xyz");
    let output = run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "-r",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(
        stderr.contains("shiftz"),
        "diagnostic names the field: {stderr}"
    );
}

#[test]
fn generate_density_echo_and_tiny_r_warning() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "bcc.json", BCC_CONFIG);
    let out = dir.path().join("cloud.xyz");
    let output = run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "-r",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("wrote 2000 points"), "{stdout}");

    let out2 = dir.path().join("empty.xyz");
    let output = run(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "-r",
        "0.1",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("warning"), "{stderr}");
}

#[test]
fn generate_diffract_roundtrip_matches_in_memory() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write(dir.path(), "bcc.json", BCC_CONFIG);
    let cloud_path = dir.path().join("cloud.xyz");
    assert!(run(&[
        "generate",
        "--config",
        config_path.to_str().unwrap(),
        "-r",
        "8",
        "--out",
        cloud_path.to_str().unwrap(),
    ])
    .status
    .success());
    let grid_path = write(
        dir.path(),
        "grid.json",
        r#"{"points": {"points": [[1.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.25, 0.5, 0.75]]}}"#,
    );
    let csv_path = dir.path().join("spec.csv");
    let output = run(&[
        "diffract",
        "--cloud",
        cloud_path.to_str().unwrap(),
        "--grid",
        grid_path.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    // in-memory reference
    let config: scd::tiling::TilingConfig = serde_json::from_str(BCC_CONFIG).unwrap();
    let cloud = scd::tiling::extract_points(&config, 8.0).unwrap();
    let ks = [
        scd::vec::Vec3::new(1.0, 1.0, 0.0),
        scd::vec::Vec3::new(1.0, 0.0, 0.0),
        scd::vec::Vec3::new(0.25, 0.5, 0.75),
    ];
    let csv = fs::read_to_string(&csv_path).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let mut intensities = Vec::new();
    for (row, k) in rows.iter().zip(ks.iter()) {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        let (re, im) = scd::diffraction::fourier_bohr(&cloud, *k).unwrap();
        // bit-identical round trip: the serialized cloud reproduces the
        // in-memory coefficients to the last digit
        assert_eq!(cols[3], re, "re at {k:?}");
        assert_eq!(cols[4], im, "im at {k:?}");
        assert_eq!(cols[5], re * re + im * im);
        intensities.push(cols[5]);
    }
    // bcc selection rule visible in the CSV: even-sum k bright, odd-sum dark
    assert!(
        intensities[0] > 3.5,
        "even-sum intensity {}",
        intensities[0]
    );
    assert!(
        intensities[1] < 1e-6,
        "odd-sum intensity {}",
        intensities[1]
    );
}

#[test]
fn diffract_profile_outputs_annuli() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write(dir.path(), "bcc.json", BCC_CONFIG);
    let cloud_path = dir.path().join("cloud.xyz");
    assert!(run(&[
        "generate",
        "--config",
        config_path.to_str().unwrap(),
        "-r",
        "8",
        "--out",
        cloud_path.to_str().unwrap(),
    ])
    .status
    .success());
    let grid_path = write(
        dir.path(),
        "slice.json",
        r#"{"slice": {"k3": 0.0, "extent": 1.5, "step": 0.125}}"#,
    );
    let out = dir.path().join("profile.csv");
    let output = run(&[
        "diffract",
        "--cloud",
        cloud_path.to_str().unwrap(),
        "--grid",
        grid_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--profile",
        "--annulus-width",
        "0.5",
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("r_bin_lo,r_bin_hi,mass\n"));
    assert_eq!(csv.lines().count(), 1 + 3);
}

#[test]
fn predict_bcc_reports_support_and_classification() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write(dir.path(), "bcc.json", BCC_CONFIG);
    let out = dir.path().join("pred.json");
    let output = run(&[
        "predict",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--cutoff",
        "2.1",
        "--periodic",
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let radii: Vec<f64> = doc["cylinder_radii"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(radii.len(), 4);
    assert!((radii[1] - 1.0).abs() < 1e-12);
    assert!((radii[2] - std::f64::consts::SQRT_2).abs() < 1e-12);
    assert_eq!(
        doc["classification"]["fully_periodic"],
        serde_json::json!(true)
    );
    assert!(doc["periodic_support"].as_array().unwrap().len() > 10);
    let peaks = doc["axis_peaks"].as_array().unwrap();
    assert_eq!(peaks[1]["layer_weight"], serde_json::json!(2.0));
    assert_eq!(peaks[1]["estimator_weight"], serde_json::json!(4.0));
}

#[test]
fn predict_periodic_flag_rejects_aperiodic_config() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write(
        dir.path(),
        "cfg.json",
        r#"{
  "params": {"lambda": 0.5, "a_len": 1.0, "angle": {"rational_cos": {"p": 3, "q": 5}}, "c3": 1.0},
  "shifts": {"zero": null}
}"#,
    );
    let out = dir.path().join("pred.json");
    let output = run(&[
        "predict",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--periodic",
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn verify_unknown_suite_lists_valid_names() {
    let output = run(&["verify", "nonsense"]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    for name in [
        "aperiodicity",
        "equivariance",
        "bcc",
        "axis",
        "support",
        "coincidence",
        "periodic",
    ] {
        assert!(stderr.contains(name), "{stderr}");
    }
}

#[test]
fn verify_coincidence_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let output = run(&["verify", "coincidence", "--out", out.to_str().unwrap()]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["pass"], serde_json::json!(true));
}

#[test]
fn csl_index_command() {
    let output = run(&["csl", "--p", "3", "--q", "5", "--m", "1"]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(doc["index"], serde_json::json!("5"));
}

#[test]
fn csl_chain_certificate() {
    let output = run(&[
        "csl", "--p", "1", "--q", "3", "--chain", "4", "--radius", "100",
    ]);
    assert!(output.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&String::from_utf8(output.stdout).unwrap()).unwrap();
    assert_eq!(doc["strictly_increasing"], serde_json::json!(true));
    assert!(doc["persistent_vector"].is_null());
    assert_eq!(doc["chain"].as_array().unwrap().len(), 5);
}

#[test]
fn seeded_generation_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write(
        dir.path(),
        "cfg.json",
        r#"{
  "params": {"lambda": 0.5, "a_len": 1.0, "angle": {"rational_cos": {"p": 3, "q": 5}}, "c3": 1.0},
  "shifts": {"random": {"seed": 1, "danzer": false}}
}"#,
    );
    let mut outputs = Vec::new();
    for name in ["a.xyz", "b.xyz"] {
        let out = dir.path().join(name);
        assert!(run(&[
            "generate",
            "--config",
            config_path.to_str().unwrap(),
            "-r",
            "6",
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "42",
        ])
        .status
        .success());
        outputs.push(fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "same seed, same bytes");
    // a different seed changes the cloud
    let out = dir.path().join("c.xyz");
    assert!(run(&[
        "generate",
        "--config",
        config_path.to_str().unwrap(),
        "-r",
        "6",
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "43",
    ])
    .status
    .success());
    assert_ne!(outputs[0], fs::read(&out).unwrap());
}

#[test]
fn json_cloud_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = write(dir.path(), "bcc.json", BCC_CONFIG);
    let cloud_path = dir.path().join("cloud.json");
    assert!(run(&[
        "generate",
        "--config",
        config_path.to_str().unwrap(),
        "-r",
        "4",
        "--out",
        cloud_path.to_str().unwrap(),
        "--format",
        "json",
    ])
    .status
    .success());
    let grid_path = write(
        dir.path(),
        "grid.json",
        r#"{"axis": {"max": 2.0, "step": 0.5}}"#,
    );
    let csv_path = dir.path().join("axis.csv");
    let output = run(&[
        "diffract",
        "--cloud",
        cloud_path.to_str().unwrap(),
        "--grid",
        grid_path.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(
        output.status.success(),
        "{}",
        String::from_utf8_lossy(&output.stderr)
    );
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5);
}
