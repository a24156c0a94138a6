use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn geocount(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocount"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn spectrum_sorted_and_worker_independent() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(geocount(a.path(), &["spectrum", "--tmax", "8", "--workers", "1"]).status.success());
    assert!(geocount(b.path(), &["spectrum", "--tmax", "8", "--workers", "4"]).status.success());
    let x = fs::read(a.path().join("spectrum.csv")).unwrap();
    let y = fs::read(b.path().join("spectrum.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 416);
    let lengths: Vec<f64> = rows.iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(lengths.windows(2).all(|w| w[0] <= w[1] + 1e-9));
    assert!(text.lines().any(|l| l == "length,canonical_word,d,root_word,xi_minus_angle,xi_plus_angle"));
}

#[test]
fn spectrum_below_systole_is_header_only() {
    let d = tempfile::tempdir().unwrap();
    assert!(geocount(d.path(), &["spectrum", "--tmax", "1"]).status.success());
    let text = fs::read_to_string(d.path().join("spectrum.csv")).unwrap();
    assert!(data_rows(&text).is_empty());
}

#[test]
fn synthetic_margulis_ratio_is_one() {
    let d = tempfile::tempdir().unwrap();
    assert!(geocount(d.path(), &["margulis", "--synthetic", "--tmax", "12"]).status.success());
    let text = fs::read_to_string(d.path().join("margulis.csv")).unwrap();
    let rows = data_rows(&text);
    assert!(!rows.is_empty());
    for r in rows {
        let ratio: f64 = r.split(',').nth(3).unwrap().parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-12, "{r}");
    }
}

#[test]
fn margulis_on_the_spectrum() {
    let d = tempfile::tempdir().unwrap();
    let out = geocount(d.path(), &["margulis", "--tmax", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(d.path().join("margulis.csv")).unwrap();
    assert_eq!(data_rows(&text).len(), 11);
}

#[test]
fn selftest_passes_and_detects_corruption() {
    let d = tempfile::tempdir().unwrap();
    let ok = geocount(d.path(), &["selftest"]);
    assert!(ok.status.success());
    let text = String::from_utf8_lossy(&ok.stdout);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    let other_seed = geocount(d.path(), &["selftest", "--seed", "77"]);
    assert!(other_seed.status.success());
    let bad = geocount(d.path(), &["selftest", "--corrupt-generator"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL relation residual"));
}

#[test]
fn configuration_errors_exit_three() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(geocount(d.path(), &["spectrum", "--genus", "1"]).status.code(), Some(3));
    assert_eq!(geocount(d.path(), &["flowbox", "--theta", "2"]).status.code(), Some(3));
    assert_eq!(geocount(d.path(), &["spectrum", "--eps", "0.2", "--paper-regime"]).status.code(), Some(3));
    assert_eq!(geocount(d.path(), &["nonsense"]).status.code(), Some(3));
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "genus = 2\ncolour = blue\n").unwrap();
    assert_eq!(geocount(d.path(), &["spectrum", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    fs::write(&cfg, "# short run\ntmax = 5\n").unwrap();
    assert!(geocount(d.path(), &["spectrum", "--config", cfg.to_str().unwrap(), "--tmax", "4"]).status.success());
    let text = fs::read_to_string(d.path().join("spectrum.csv")).unwrap();
    assert!(text.lines().next().unwrap().contains("tmax=4"));
    assert_eq!(data_rows(&text).len(), 24);
}

#[test]
fn cap_exits_two_with_partial_file() {
    let d = tempfile::tempdir().unwrap();
    let out = geocount(d.path(), &["spectrum", "--tmax", "10", "--cap", "100"]);
    assert_eq!(out.status.code(), Some(2));
    let text = fs::read_to_string(d.path().join("spectrum.csv")).unwrap();
    assert!(text.contains("PARTIAL"));
}

#[test]
fn equidist_and_entropy_write_csv() {
    let d = tempfile::tempdir().unwrap();
    assert!(geocount(d.path(), &["equidist", "--tmax", "10"]).status.success());
    let text = fs::read_to_string(d.path().join("equidist.csv")).unwrap();
    assert!(text.contains("t,classes,tv_distance"));
    assert!(geocount(d.path(), &["entropy", "--tmax", "10"]).status.success());
    let text = fs::read_to_string(d.path().join("entropy.csv")).unwrap();
    assert_eq!(data_rows(&text).len(), 9);
}

#[test]
fn flowbox_sweep_passes_its_checks() {
    let d = tempfile::tempdir().unwrap();
    let out = geocount(d.path(), &["flowbox", "--tmax", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let sweep = fs::read_to_string(d.path().join("flowbox.csv")).unwrap();
    assert!(sweep.lines().any(|l| l == "box,t,alpha,gamma_word,length,in_Gamma,in_GammaStar,in_GammaPrime,window_ok,scaling_ratio"));
    assert!(!data_rows(&sweep).is_empty());
    let mixing = fs::read_to_string(d.path().join("mixing.csv")).unwrap();
    assert!(mixing.contains("boxes=390"));
    assert!(data_rows(&mixing).iter().all(|r| r.split(',').count() == 7));
}
