//! End-to-end checks of the binary: exit codes, manifest layout, config
//! merging and rerun determinism.

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tubewave"))
}

fn tmp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("tubewave-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn manifest(dir: &Path) -> serde_json::Value {
    let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = bin().args(["phaseplane", "--p", "4", "--c", "1", "--frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn phaseplane_manifest_carries_the_vertex() {
    let dir = tmp_dir("pp");
    let out = bin()
        .args(["phaseplane", "--p", "4", "--c", "1", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(&dir);
    let numbers = m["derived_numbers"].as_object().unwrap();
    let x_c = numbers["c0.x_c"].as_f64().unwrap();
    let z_c = numbers["c0.z_c"].as_f64().unwrap();
    assert!((x_c - 0.918559).abs() < 1e-6);
    assert!((z_c - 0.472470).abs() < 1e-6);
    assert!(numbers["c0.m_c"].as_f64().unwrap() >= x_c);
    // every emitted file is listed
    for entry in fs::read_dir(&dir).unwrap() {
        let name = entry.unwrap().file_name().into_string().unwrap();
        assert!(
            m["outputs"].as_array().unwrap().iter().any(|o| o == name.as_str()),
            "unlisted output {name}"
        );
    }
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reruns_are_bit_identical() {
    let d1 = tmp_dir("det1");
    let d2 = tmp_dir("det2");
    for d in [&d1, &d2] {
        let out = bin()
            .args(["phaseplane", "--p", "3", "--c", "2", "--out", d.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let n1 = manifest(&d1)["derived_numbers"].clone();
    let n2 = manifest(&d2)["derived_numbers"].clone();
    assert_eq!(n1, n2);
    fs::remove_dir_all(&d1).unwrap();
    fs::remove_dir_all(&d2).unwrap();
}

#[test]
fn config_file_supplies_flags_and_is_overridden() {
    let dir = tmp_dir("cfg");
    fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.conf");
    fs::write(&cfg, "p = 4\nc = 1\n# comment\n").unwrap();
    // config supplies both flags
    let out_dir = dir.join("a");
    let out = bin()
        .args([
            "phaseplane",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(manifest(&out_dir)["parameters"]["p"], "4");
    // explicit flag wins over the file
    let out_dir = dir.join("b");
    let out = bin()
        .args([
            "phaseplane",
            "--config",
            cfg.to_str().unwrap(),
            "--p",
            "3",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(manifest(&out_dir)["parameters"]["p"], "3");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn numerical_failure_exits_one() {
    let dir = tmp_dir("fail");
    // frontfit over an empty directory: numerical/usage failure path -> 1
    fs::create_dir_all(&dir).unwrap();
    let out = bin()
        .args(["frontfit", "--run-dir", dir.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn empty_sweep_writes_an_empty_index() {
    let dir = tmp_dir("sweep");
    fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("spec.txt");
    fs::write(&spec, "# nothing to do\n").unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args([
            "sweep",
            "--spec",
            spec.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let index = fs::read_to_string(out_dir.join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 1, "header only");
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn sweep_of_m_c_values_is_monotone() {
    let dir = tmp_dir("sweepmc");
    fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("spec.txt");
    fs::write(
        &spec,
        "phaseplane p=4 c=1\nphaseplane p=4 c=2\nphaseplane p=4 c=4\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let out = bin()
        .args([
            "sweep",
            "--spec",
            spec.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let index = fs::read_to_string(out_dir.join("index.csv")).unwrap();
    let mcs: Vec<f64> = index
        .lines()
        .filter(|l| l.contains(",c0.m_c,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(mcs.len(), 3);
    assert!(mcs.windows(2).all(|w| w[1] >= w[0]), "{mcs:?}");
    fs::remove_dir_all(&dir).unwrap();
}
