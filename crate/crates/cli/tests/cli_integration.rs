//! End-to-end checks of the binary surface: exit codes, strict JSON parsing,
//! golden SVG bytes.

use std::fs;
use std::path::Path;
use std::process::Command;

use maxdist_core::energy::PointCloud;
use maxdist_core::geometry::Point;
use maxdist_core::minlab::fixtures::cycle_fixture;
use maxdist_core::minlab::trimmed_tree;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_maxdist"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().to_string()
}

#[test]
fn steiner_square_json_output() {
    let tmp = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "--out-dir",
            tmp.path().to_str().unwrap(),
            "steiner",
            "--points",
            "0,0 1,0 1,1 0,1",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("steiner.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let length = v["length"].as_f64().unwrap();
    assert!((length - (1.0 + 3.0f64.sqrt())).abs() <= 1e-9);
}

#[test]
fn validate_cycle_exits_2_with_r1_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let (m, g) = cycle_fixture(5.0, 1.0, 8192).unwrap();
    let cloud = write(tmp.path(), "cloud.json", &m.to_json());
    let sigma = write(tmp.path(), "sigma.json", &g.to_json());
    let output = bin()
        .args([
            "--out-dir",
            tmp.path().to_str().unwrap(),
            "validate",
            "--cloud",
            &cloud,
            "--sigma",
            &sigma,
            "--r",
            "1.0",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let report = fs::read_to_string(tmp.path().join("validation.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    let r1 = v["rules"]
        .as_array()
        .unwrap()
        .iter()
        .find(|rule| rule["name"] == "R1-acyclic")
        .unwrap();
    assert_eq!(r1["pass"], serde_json::Value::Bool(false));
}

#[test]
fn criterion_certifies_trimmed_candidate() {
    let tmp = tempfile::tempdir().unwrap();
    let m = PointCloud::finite(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
    let g = trimmed_tree(&m, 0.2).unwrap();
    let cloud = write(tmp.path(), "cloud.json", &m.to_json());
    let sigma = write(tmp.path(), "sigma.json", &g.to_json());
    let status = bin()
        .args([
            "--out-dir",
            tmp.path().to_str().unwrap(),
            "criterion",
            "--cloud",
            &cloud,
            "--sigma",
            &sigma,
            "--r",
            "0.2",
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn malformed_json_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cloud = write(tmp.path(), "cloud.json", "{not json");
    let sigma = write(tmp.path(), "sigma.json", "{}");
    let status = bin()
        .args([
            "--out-dir",
            tmp.path().to_str().unwrap(),
            "energy",
            "--cloud",
            &cloud,
            "--sigma",
            &sigma,
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn optimizer_config_rejects_unknown_fields() {
    let tmp = tempfile::tempdir().unwrap();
    let m = PointCloud::finite(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)]).unwrap();
    let cloud = write(tmp.path(), "cloud.json", &m.to_json());
    let config = write(
        tmp.path(),
        "config.json",
        r#"{"r":0.2,"init":{"type":"random_tree"},"seed":1,"bogus_field":3}"#,
    );
    let status = bin()
        .args([
            "--out-dir",
            tmp.path().to_str().unwrap(),
            "optimize",
            "--cloud",
            &cloud,
            "--config",
            &config,
        ])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn render_golden_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let m = PointCloud::finite(&[
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(0.5, 0.75),
    ])
    .unwrap();
    let g = trimmed_tree(&m, 0.1).unwrap();
    let cloud = write(tmp.path(), "cloud.json", &m.to_json());
    let sigma = write(tmp.path(), "sigma.json", &g.to_json());
    let run = |dir: &Path| {
        let status = bin()
            .args([
                "--out-dir",
                dir.to_str().unwrap(),
                "render",
                "--cloud",
                &cloud,
                "--sigma",
                &sigma,
                "--r",
                "0.1",
            ])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        fs::read(dir.join("render.svg")).unwrap()
    };
    let first = run(tmp.path());
    let tmp2 = tempfile::tempdir().unwrap();
    let second = run(tmp2.path());
    assert_eq!(first, second, "SVG output must be byte-identical");

    // Golden file pin.
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/trimmed_tripod.svg");
    let golden = fs::read(&golden_path).unwrap();
    assert_eq!(
        first, golden,
        "render.svg deviates from the committed golden file"
    );
}

#[test]
fn suite_subcommand_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["--out-dir", tmp.path().to_str().unwrap(), "suite"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(tmp.path().join("suite.json").exists());
}
