use std::fs;
use std::path::Path;
use std::process::Command;

use lame_mt::cli::{fmt_num, run};

fn go(dir: &Path, args: &[&str]) -> u8 {
    let mut v = vec!["lame-mt", "--out", dir.to_str().unwrap(), "--threads", "2"];
    v.extend_from_slice(args);
    run(v)
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn default_addition_run_passes_with_one_row_per_case() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["verify-addition"]), 0);
    let csv = read(d.path(), "verify-addition.csv");
    assert_eq!(csv.lines().count(), 21);
    assert!(csv.starts_with("case,x1,x2,y1,y2,n_max,tail_bound,rel_err"));
    let m: serde_json::Value = serde_json::from_str(&read(d.path(), "manifest.json")).unwrap();
    assert_eq!(m["params"]["n_cases"], "20");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["exit_code"], 0);
}

#[test]
fn unattainable_tolerance_fails_and_flags_rows() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["verify-addition", "tol=1e-30"]), 1);
    assert!(read(d.path(), "verify-addition.csv").lines().skip(1).all(|l| l.ends_with(",false")));
}

#[test]
fn configuration_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["verify-addition", "lam=-3", "mu=1"]), 2);
    assert_eq!(go(d.path(), &["solve", "forcing=bump:n=0,r0=1,w=5"]), 2);
    assert_eq!(go(d.path(), &["solve", "forcing=blob"]), 2);
    assert_eq!(go(d.path(), &["solve", "omega=0"]), 2);
    assert_eq!(go(d.path(), &["mt", "colour=red"]), 2);
    assert_eq!(go(d.path(), &["mt", "weight"]), 2);
    assert_eq!(go(d.path(), &["lemmas", "id=L9"]), 2);
    assert_eq!(go(d.path(), &["mt", "weight=gauss:sigma=1", "weight=gauss:sigma=2"]), 2);
    assert_eq!(go(d.path(), &["counterexample", "--tol", "1e-3"]), 2);
    assert_eq!(go(d.path(), &["no-such-command"]), 2);
}

#[test]
fn solve_reports_diagnostics() {
    let d = tempfile::tempdir().unwrap();
    let code = go(
        d.path(),
        &["solve", "forcing=bump:n=0,r0=1,w=0.25", "lam=1", "mu=1", "omega=1"],
    );
    assert_eq!(code, 0);
    assert!(read(d.path(), "solve.csv").starts_with("r,theta,u1_re,u1_im,u2_re,u2_im\n"));
}

#[test]
fn mt_of_unit_gaussian() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["mt", "weight=gauss:sigma=1"]), 0);
    let csv = read(d.path(), "mt.csv");
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    let v: f64 = row[1].parse().unwrap();
    assert!((v - 0.886_226_925_452_758).abs() < 1e-7);
}

#[test]
fn counterexample_ladder_has_increasing_ratio() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["counterexample", "eta=0.015625", "ladder=4"]), 0);
    let csv = read(d.path(), "counterexample.csv");
    let ratios: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn lemma_sweep_table_has_the_documented_columns() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["lemmas", "id=L4_5", "mu=20,40,80", "a=1.41421356"]), 0);
    let csv = read(d.path(), "lemmas.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "mu,a,region,value,mt_norm_sq,ratio,quad_err");
    assert_eq!(lines.count(), 3);
}

#[test]
fn output_is_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["estimates", "omega=0.5,2", "modes=0,1"];
    let mut one = vec!["lame-mt", "--out", a.path().to_str().unwrap(), "--threads", "1"];
    one.extend_from_slice(&args);
    let mut four = vec!["lame-mt", "--out", b.path().to_str().unwrap(), "--threads", "4"];
    four.extend_from_slice(&args);
    assert_eq!(run(one), 0);
    assert_eq!(run(four), 0);
    assert_eq!(read(a.path(), "estimates.csv"), read(b.path(), "estimates.csv"));
}

#[test]
fn seeded_configurations_repeat() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        assert_eq!(go(d.path(), &["--seed", "9", "verify-addition", "n_cases=5"]), 0);
    }
    assert_eq!(read(a.path(), "verify-addition.csv"), read(b.path(), "verify-addition.csv"));
}

#[test]
fn selftest_passes() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(go(d.path(), &["specfun-selftest"]), 0);
}

#[test]
fn numbers_use_seventeen_significant_digits() {
    assert_eq!(fmt_num(0.1), "1.0000000000000001e-1");
    assert_eq!(fmt_num(-2.5), "-2.5000000000000000e0");
    let back: f64 = fmt_num(std::f64::consts::PI).parse().unwrap();
    assert_eq!(back, std::f64::consts::PI);
}

#[test]
fn binary_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_lame-mt");
    let ok = Command::new(bin)
        .args(["--out", d.path().to_str().unwrap(), "mt", "weight=indicator:R=2"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("mt_norm = 2.0000000000000000e0"));
    let bad = Command::new(bin).args(["mt", "weight=gauss:sigma=-1"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
