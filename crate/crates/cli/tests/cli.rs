use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bergman(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bergman"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn write_measure(dir: &Path, text: &str) -> String {
    let p = dir.join("measure.toml");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn identities_pass_and_are_reproducible() {
    let d = TempDir::new().unwrap();
    let ra = bergman(d.path(), &["verify-identities", "--seed", "7"]);
    assert_eq!(ra.status.code(), Some(0), "{}", String::from_utf8_lossy(&ra.stdout));
    let fa = std::fs::read(d.path().join("identities.json")).unwrap();
    let rb = bergman(d.path(), &["verify-identities", "--seed", "7"]);
    assert_eq!(rb.status.code(), Some(0));
    let fb = std::fs::read(d.path().join("identities.json")).unwrap();
    assert_eq!(fa, fb);
    assert_eq!(ra.stdout, rb.stdout);
    let v = json(&ra);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["identities"].as_array().unwrap().len(), 24);
}

#[test]
fn unresolved_truncation_exits_with_one() {
    let d = TempDir::new().unwrap();
    let r = bergman(d.path(), &["verify-identities", "--n-trunc", "16"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(json(&r)["precision_errors"].as_u64().unwrap() > 0);
}

#[test]
fn usage_and_input_errors_exit_with_two() {
    let d = TempDir::new().unwrap();
    assert_eq!(bergman(d.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(bergman(d.path(), &["assemble"]).status.code(), Some(2));
    assert_eq!(bergman(d.path(), &["verify-identities", "--n-trunc", "8"]).status.code(), Some(2));
    assert_eq!(bergman(d.path(), &["counterexample5", "--j-list", "64"]).status.code(), Some(2));
    let m = write_measure(d.path(), "variant = \"radial\"\nfamily = \"power\"\nbeta = -2.0\n");
    let r = bergman(d.path(), &["assemble", "--measure", &m]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("beta"));
}

#[test]
fn lebesgue_assembles_to_the_identity() {
    let d = TempDir::new().unwrap();
    let m = write_measure(d.path(), "variant = \"radial\"\nfamily = \"constant\"\nc = 1.0\n");
    let r = bergman(d.path(), &["assemble", "--measure", &m, "--n-trunc", "20", "--k", "3"]);
    assert_eq!(r.status.code(), Some(0));
    let csv = std::fs::read_to_string(d.path().join("toeplitz.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.is_empty()).collect();
    assert!(rows.len() >= 20);
    let env: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("toeplitz.json")).unwrap()).unwrap();
    assert_eq!(env["k"], 3);
    let norm = &json(&r)["norm"];
    assert!((norm["norm_n"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!((norm["norm_2n"].as_f64().unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn projection_field_matches_closed_form() {
    // B_0(E_0)(z) = (1-|z|²)²
    let d = TempDir::new().unwrap();
    let r = bergman(d.path(), &["berezin-field", "--projection", "0", "--n-berezin", "0", "--n-trunc", "16"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = std::fs::read_to_string(d.path().join("berezin_field.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let (x, y, re, im) = (col("re_z"), col("im_z"), col("re_val"), col("im_val"));
    let mut count = 0;
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let want = (1.0 - f[x] * f[x] - f[y] * f[y]).powi(2);
        assert!((f[re] - want).abs() < 1e-12 && f[im].abs() < 1e-12, "{line}");
        count += 1;
    }
    assert!(count > 100);
}

#[test]
fn carleson_report_for_an_atom() {
    let d = TempDir::new().unwrap();
    let m = write_measure(d.path(), "variant = \"atomic\"\natoms = [[0.5, 0.0, 1.0, 0.0]]\n");
    let r = bergman(d.path(), &["carleson-report", "--measure", &m, "--k", "1", "--n-trunc", "24"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let v = json(&r);
    let file: Value = serde_json::from_str(&std::fs::read_to_string(d.path().join("carleson_report.json")).unwrap()).unwrap();
    assert_eq!(v, file);
    // sup B_0(δ_a) = B_0(δ_a)(a) = 1 / (1-|a|²)², sampled on the grid
    let exact = 1.0 / 0.75f64.powi(2);
    let b0 = v["b0_sup"].as_f64().unwrap();
    assert!(b0 <= exact * (1.0 + 1e-12) && b0 >= exact * (1.0 - 1e-2), "{b0}");
    assert_eq!(v["bounds"].as_array().unwrap().len(), 2);
}

#[test]
fn counterexample_tables_are_written() {
    let d = TempDir::new().unwrap();
    let r = bergman(d.path(), &["counterexample5", "--k", "2", "--n-berezin", "quadratic", "--j-list", "8,40"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let symbols = std::fs::read_to_string(d.path().join("symbols.csv")).unwrap();
    assert_eq!(symbols.lines().count(), 3);
    let growth = std::fs::read_to_string(d.path().join("growth.csv")).unwrap();
    assert_eq!(growth.lines().count(), 3);
    let v = json(&r);
    let rows = v["symbols"].as_array().unwrap();
    assert!(rows[1]["ratio"].as_f64().unwrap() > rows[0]["ratio"].as_f64().unwrap());
}
