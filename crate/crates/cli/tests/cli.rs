use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biharmonic")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn all_checks_pass(v: &Value) -> bool {
    v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == Value::Bool(true))
}

#[test]
fn spectrum_at_pc_is_degenerate() {
    let out = bin(&["spectrum", "--n", "13", "--p", "pc"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["degenerate"], Value::Bool(true));
    assert!(all_checks_pass(&v));
    assert!((v["p"].as_f64().unwrap() - 28.1724).abs() < 1e-3);
}

#[test]
fn spectrum_above_pc_is_not_degenerate() {
    let out = bin(&["spectrum", "--n", "15", "--p", "pc+1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["degenerate"], Value::Bool(false));
    let l: Vec<f64> = ["lambda1", "lambda2", "lambda3", "lambda4"].iter().map(|k| v[k].as_f64().unwrap()).collect();
    assert!(l[0] < l[1] && l[1] < l[2] && l[2] < 0.0 && 0.0 < l[3]);
}

#[test]
fn spectrum_below_twelve_explains_infinite_pc() {
    for p in ["3", "pc"] {
        let out = bin(&["spectrum", "--n", "12", "--p", p]);
        assert_eq!(code(&out), 2, "p = {p}");
        let err = stderr(&out);
        assert!(err.contains("n <= 12") || err.contains("n = 12"), "{err}");
        assert!(err.contains("∞") || err.contains("inf"), "{err}");
    }
}

#[test]
fn subcritical_and_sobolev_inputs_are_input_errors() {
    let out = bin(&["spectrum", "--n", "13", "--p", "pc-1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("p_c(13)"), "{}", stderr(&out));

    // Sobolev exponent for n = 13 is 17/9
    let out = bin(&["spectrum", "--n", "13", "--p", "1.5"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Sobolev"), "{}", stderr(&out));
}

#[test]
fn malformed_arguments_exit_with_input_status() {
    for args in [
        vec!["spectrum", "--n", "13", "--p", "abc"],
        vec!["spectrum", "--n", "13"],
        vec!["spectrum", "--n", "x", "--p", "30"],
        vec!["spectrum", "--n", "13", "--p", "30", "--tol-root", "-1"],
        vec!["solve", "--n", "13", "--p", "pc+0.5", "--r-max", "5"],
        vec!["expand", "--n", "13", "--p", "pc+0.5", "--window", "3,2"],
        vec!["sweep", "--n-min", "10", "--n-max", "20"],
        vec!["sweep", "--n-min", "13", "--n-max", "201"],
        vec!["bogus"],
    ] {
        let out = bin(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn critical_reports_ladder_lengths() {
    for (n, len) in [(13, 1), (19, 4), (20, 5), (21, 6)] {
        let out = bin(&["critical", "--n", &n.to_string()]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let v = json(&out);
        assert_eq!(v["N"], len, "n = {n}");
        assert_eq!(v["N_formula"], len, "n = {n}");
        assert_eq!(v["rungs"].as_array().unwrap().len(), len);
        assert!(all_checks_pass(&v));
    }
}

#[test]
fn critical_below_thirteen_is_graceful() {
    let out = bin(&["critical", "--n", "12"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["p_c"], "inf");
    assert_eq!(v["N"], 0);
}

#[test]
fn failed_check_exits_with_check_status() {
    // a rung coincidence tolerance far below what bisection can deliver
    let out = bin(&["critical", "--n", "30", "--tol-root", "1e-300"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let v = json(&out);
    assert!(!all_checks_pass(&v));
}

#[test]
fn csv_report_format() {
    let out = bin(&["spectrum", "--n", "13", "--p", "pc", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let rows: Vec<(String, String)> = rdr.deserialize().map(Result::unwrap).collect();
    let get = |k: &str| rows.iter().find(|r| r.0 == k).map(|r| r.1.clone()).unwrap();
    assert_eq!(get("degenerate"), "true");
    assert_eq!(get("n"), "13");
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 15\np = \"pc\"\nformat = \"csv\"\n").unwrap();
    let c = cfg.to_str().unwrap();

    let out = bin(&["spectrum", "--config", c]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("degenerate,true"));

    let out = bin(&["spectrum", "--config", c, "--p", "pc+2", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["degenerate"], Value::Bool(false));

    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(code(&bin(&["spectrum", "--config", c, "--n", "13", "--p", "30"])), 2);
}

fn read_sweep(path: &Path) -> Vec<csv::StringRecord> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    assert_eq!(
        rdr.headers().unwrap().iter().collect::<Vec<_>>(),
        ["n", "p_c", "N", "N_formula", "rungs", "parity_value", "parity_positive", "status"]
    );
    rdr.records().map(Result::unwrap).collect()
}

#[test]
fn sweep_table_properties_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = bin(&["sweep", "--n-min", "13", "--n-max", "40", "--jobs", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows = read_sweep(&path);
    assert_eq!(rows.len(), 28);

    let mut prev_len = 0;
    for (i, r) in rows.iter().enumerate() {
        let n: u32 = r[0].parse().unwrap();
        assert_eq!(n, 13 + i as u32, "rows in input order");
        assert_eq!(&r[7], "ok");
        let len: usize = r[2].parse().unwrap();
        assert_eq!(len, r[3].parse::<usize>().unwrap());
        assert!(len >= prev_len, "N nondecreasing at n = {n}");
        prev_len = len;
        assert_eq!(&r[6], if n >= 20 { "true" } else { "false" }, "parity flips at n = 20");
        let value: f64 = r[5].parse().unwrap();
        assert_eq!(value > 0.0, n >= 20);

        // bit-exact against the library
        let l = biharmonic_ladder(n);
        assert_eq!(r[1].parse::<f64>().unwrap().to_bits(), l[0].to_bits());
        let rungs: Vec<f64> = if r[4].is_empty() { vec![] } else { r[4].split(';').map(|x| x.parse().unwrap()).collect() };
        assert_eq!(rungs.len() + 1, len);
        for (a, b) in rungs.iter().zip(&l[1..]) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

fn biharmonic_ladder(n: u32) -> Vec<f64> {
    biharmonic::compute_ladder(n).unwrap().rungs
}

#[test]
fn sweep_output_does_not_depend_on_thread_count() {
    let one = bin(&["sweep", "--n-min", "13", "--n-max", "30", "--jobs", "1"]);
    let many = bin(&["sweep", "--n-min", "13", "--n-max", "30", "--jobs", "8"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);

    let lines = bin(&["sweep", "--n-min", "19", "--n-max", "21", "--format", "json"]);
    let rows: Vec<Value> = String::from_utf8(lines.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.iter().map(|r| r["N"].as_u64().unwrap()).collect::<Vec<_>>(), [4, 5, 6]);
}

#[test]
fn solve_dumps_and_summarises_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("sol.csv");
    let args = ["solve", "--n", "13", "--p", "pc+0.5", "--out", dump.to_str().unwrap()];
    let a = bin(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    let first_dump = std::fs::read(&dump).unwrap();
    let b = bin(&args);
    assert_eq!(a.stdout, b.stdout, "summary is byte-identical");
    assert_eq!(first_dump, std::fs::read(&dump).unwrap(), "dump is byte-identical");

    let v = json(&a);
    assert!(all_checks_pass(&v));
    assert!((v["limit_ratio"].as_f64().unwrap() - 1.0).abs() < 1e-2);
    assert!(v["r_max"].as_f64().unwrap() >= 1e4);

    let mut rdr = csv::Reader::from_path(&dump).unwrap();
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), ["s", "r", "phi", "W", "Y", "Z"]);
    let rows: Vec<Vec<f64>> =
        rdr.records().map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len() as u64, v["nodes"].as_u64().unwrap());
    assert!(rows.iter().all(|r| r[4] < 0.0));
    assert!(rows.windows(2).all(|w| w[1][4] >= w[0][4]));
}

#[test]
fn solve_without_out_streams_the_dump() {
    let out = bin(&["solve", "--n", "13", "--p", "pc+0.5", "--r-max", "100"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("s,r,phi,W,Y,Z\n"));
    assert!(stderr(&out).contains("\"v0\""));
}

#[test]
fn expand_reports_fit_and_invariants() {
    let out = bin(&["expand", "--n", "13", "--p", "pc+0.5"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["regime"], "a");
    assert_eq!(v["k"], 1);
    assert!(all_checks_pass(&v));
    let coeffs = v["coefficients"].as_array().unwrap();
    assert!(coeffs.iter().any(|c| c["name"] == "a1" && c["resolved"] == Value::Bool(true)));
    assert!(v["residual_slope"].as_f64().unwrap() <= v["theoretical_slope"].as_f64().unwrap() + v["slack"].as_f64().unwrap());

    let crit = json(&bin(&["expand", "--n", "13", "--p", "pc"]));
    assert_eq!(crit["regime"], "c");
}

#[test]
fn verify_algebraic_scope() {
    let out = bin(&["verify", "--scope", "algebraic", "--n-min", "13", "--n-max", "30"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert_eq!(v["suites"].as_array().unwrap().len(), 5);
    assert!(stderr(&out).contains("PASS"));

    let again = bin(&["verify", "--scope", "algebraic", "--n-min", "13", "--n-max", "30"]);
    assert_eq!(out.stdout, again.stdout, "timings stay out of the payload");
}
