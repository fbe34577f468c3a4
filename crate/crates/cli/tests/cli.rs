use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn fsbound(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_fsbound"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).unwrap_or_else(|e| panic!("{e}: {}\n{}", run.stdout, run.stderr))
}

/// Workspace with `u.txt` holding `01` repeated 500 times.
fn workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("u.txt"), "01".repeat(500)).unwrap();
    dir
}

fn h(p: f64) -> f64 {
    let t = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    t(p) + t(1.0 - p)
}

fn d2(a: f64, b: f64) -> f64 {
    a * (a / b).log2() + (1.0 - a) * ((1.0 - a) / (1.0 - b)).log2()
}

/// `d(δ ‖ p)` with `1 − h(δ) = R`, by bisection on `[p, 1/2]`.
fn bsc_esp(p: f64, rate: f64) -> f64 {
    let (mut lo, mut hi) = (p, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if 1.0 - h(mid) > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    d2(0.5 * (lo + hi), p)
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|x| if x == "inf" { f64::INFINITY } else { x.parse().unwrap() })
                .collect()
        })
        .collect()
}

#[test]
fn matched_point_bound_is_crossover() {
    let dir = workspace();
    let r = fsbound(dir.path(), &["bound-expected", "--source", "u.txt", "--channel", "bsc:0.1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["command"], "bound-expected");
    let b = v["result"]["bound"]["value"].as_f64().unwrap();
    assert!((b - 0.1).abs() < 1e-6, "{b}");
    assert!((v["result"]["capacity"].as_f64().unwrap() - (1.0 - h(0.1))).abs() < 1e-6);
}

#[test]
fn large_decoder_is_vacuous_but_written() {
    let dir = workspace();
    let r = fsbound(
        dir.path(),
        &["bound-expected", "--source", "u.txt", "--channel", "bsc:0.1", "--dec-states", "2", "-o", "out.json"],
    );
    assert_eq!(r.code, 1, "{}", r.stderr);
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out.json")).unwrap()).unwrap();
    assert_eq!(v["status"], "vacuous");
    assert_eq!(v["result"]["bound"]["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn missing_input_exits_2_without_output() {
    let dir = workspace();
    let r = fsbound(
        dir.path(),
        &["bound-expected", "--source", "u.txt", "--channel", "nope.json", "-o", "out.json"],
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("nope.json"), "{}", r.stderr);
    assert!(!dir.path().join("out.json").exists());
    let r = fsbound(dir.path(), &["bound-expected", "--source", "u.txt"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("--channel"), "{}", r.stderr);
}

#[test]
fn infeasible_level_writes_flagged_document() {
    let dir = workspace();
    fs::write(dir.path().join("rho.json"), "[[0.1, 1.0], [1.0, 0.1]]").unwrap();
    let r = fsbound(
        dir.path(),
        &["rdf", "--source-pmf", "0.5,0.5", "--distortion", "rho.json", "--level", "0.05"],
    );
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert_eq!(json(&r)["status"], "infeasible");
}

#[test]
fn excess_bound_matches_binary_oracle() {
    let dir = workspace();
    let args = [
        "bound-excess", "--source-pmf", "0.5,0.5", "--channel", "bsc:0.1", "--level", "0.2", "--deltas", "0.05",
        "--n", "100",
    ];
    let r = fsbound(dir.path(), &args);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("# fsbound "));
    let row = &csv_rows(&r.stdout)[0];
    let rate = 1.0 - h(0.25);
    let e = bsc_esp(0.1, rate);
    assert!((row[1] - rate).abs() < 1e-6);
    assert!((row[3] - e).abs() < 1e-6, "{} vs {e}", row[3]);
    assert!((row[4] - (-4.0 - 100.0 * e)).abs() < 1e-4);
}

#[test]
fn excess_bound_with_zero_exponent_is_the_prefactor() {
    let dir = workspace();
    let r = fsbound(
        dir.path(),
        &[
            "bound-excess", "--source-pmf", "0.5,0.5", "--channel", "bsc:0.45", "--level", "0.2", "--deltas",
            "0.05", "--n", "100", "--format", "json",
        ],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    let best = &v["result"]["best"];
    assert_eq!(best["exponent"].as_f64().unwrap(), 0.0);
    assert!((best["report"]["value"].as_f64().unwrap() - 0.0625).abs() < 1e-12);
}

#[test]
fn empty_delta_grid_is_an_error() {
    let dir = workspace();
    let r = fsbound(
        dir.path(),
        &["bound-excess", "--source", "u.txt", "--channel", "bsc:0.1", "--level", "1.0", "-o", "x.csv"],
    );
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("empty"), "{}", r.stderr);
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn simulate_uncoded_meets_the_bound() {
    let dir = workspace();
    let r = fsbound(
        dir.path(),
        &["simulate", "--source", "u.txt", "--channel", "bsc:0.1", "--trials", "2000", "--seed", "3"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    let m = &v["result"]["machines"][0];
    let mean = m["distortion"]["mean"].as_f64().unwrap();
    let hw = m["distortion"]["half_width"].as_f64().unwrap();
    let bound = m["bound"].as_f64().unwrap();
    assert!((mean - bound).abs() <= hw, "{mean} ± {hw} vs {bound}");
    assert_eq!(m["violation"], false);
}

#[test]
fn simulate_random_machines_replays_exactly() {
    let dir = workspace();
    let args = [
        "simulate", "--source", "u.txt", "--channel", "bsc:0.1", "--random", "8", "--block-len", "2",
        "--enc-states", "2", "--dec-states", "3", "--delay", "1", "--trials", "200", "--seed", "9", "--level",
        "0.3",
    ];
    let a = fsbound(dir.path(), &[&args[..], &["-o", "a.json"]].concat());
    let b = fsbound(dir.path(), &[&args[..], &["-o", "b.json"]].concat());
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(b.code, 0);
    let (fa, fb) = (fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
    assert_eq!(fa, fb);
    let v: Value = serde_json::from_slice(&fa).unwrap();
    assert_eq!(v["result"]["summary"]["machines"], 8);
    assert_eq!(v["result"]["summary"]["violations"], 0);
    for m in v["result"]["machines"].as_array().unwrap() {
        assert_eq!(m["period"], 2);
        assert!(m["excess"]["bound"].is_number(), "{m}");
    }
}

#[test]
fn self_conditioned_lz_is_zero() {
    let dir = workspace();
    fs::write(dir.path().join("w.txt"), "000000").unwrap();
    fs::write(dir.path().join("v.txt"), "010011").unwrap();
    let r = fsbound(dir.path(), &["lz", "--source", "u.txt", "--given", "u.txt"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(json(&r)["result"]["conditional"]["complexity"].as_f64().unwrap(), 0.0);
    let r = fsbound(dir.path(), &["lz", "--source", "v.txt", "--given", "w.txt"]);
    let c = &json(&r)["result"]["conditional"];
    assert_eq!(c["complexity"].as_f64().unwrap(), 2.0 / 3.0);
    assert_eq!(c["distinct_w_phrases"], 2);
    let r = fsbound(dir.path(), &["lz", "--source", "v.txt", "--q", "1.5"]);
    assert_eq!(r.code, 2);
}

#[test]
fn bsc_capacity() {
    let dir = workspace();
    let r = fsbound(dir.path(), &["capacity", "--channel", "bsc:0.1", "--rate", "0.25"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v = json(&r);
    let c = v["result"]["capacity"]["value"].as_f64().unwrap();
    assert!((c - 0.5310).abs() < 1e-4 && (c - (1.0 - h(0.1))).abs() < 1e-6);
    let e = v["result"]["sphere_packing"]["value"].as_f64().unwrap();
    assert!((e - bsc_esp(0.1, 0.25)).abs() < 1e-6);
}

#[test]
fn matrix_channel_file() {
    let dir = workspace();
    fs::write(dir.path().join("ch.json"), r#"{"rows": [[0.9, 0.1], [0.1, 0.9]]}"#).unwrap();
    let r = fsbound(dir.path(), &["capacity", "--channel", "ch.json"]);
    let c = json(&r)["result"]["capacity"]["value"].as_f64().unwrap();
    assert!((c - (1.0 - h(0.1))).abs() < 1e-6);
}

#[test]
fn causal_capacity_with_blind_state_is_plain_capacity() {
    let dir = workspace();
    let row = "[[0.85, 0.15], [0.85, 0.15]]";
    let flip = "[[0.15, 0.85], [0.15, 0.85]]";
    fs::write(
        dir.path().join("sc.json"),
        format!(r#"{{"state_pmf": [0.3, 0.7], "rows": [{row}, {flip}]}}"#),
    )
    .unwrap();
    let r = fsbound(dir.path(), &["causal-capacity", "--state-channel", "sc.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = json(&r)["result"]["capacity"]["value"].as_f64().unwrap();
    assert!((c - (1.0 - h(0.15))).abs() < 1e-6, "{c}");
}

#[test]
fn rdf_sweep_is_monotone_and_matches_closed_form() {
    let dir = workspace();
    let r = fsbound(
        dir.path(),
        &["sweep", "--kind", "rdf", "--source-pmf", "0.5,0.5", "--from", "0", "--to", "0.5", "--points", "11"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rows = csv_rows(&r.stdout);
    assert_eq!(rows.len(), 11);
    for w in rows.windows(2) {
        assert!(w[1][1] <= w[0][1] + 1e-12);
    }
    for row in &rows {
        assert!((row[1] - (1.0 - h(row[0]))).abs() < 1e-4);
    }
}

#[test]
fn wz_rdf_with_independent_side_information() {
    let dir = workspace();
    fs::write(dir.path().join("si.json"), "[[0.4, 0.6], [0.4, 0.6]]").unwrap();
    let r = fsbound(
        dir.path(),
        &["wz-rdf", "--source-pmf", "0.5,0.5", "--side-info", "si.json", "--level", "0.1"],
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let rate = json(&r)["result"]["solution"]["rate"].as_f64().unwrap();
    assert!((rate - (1.0 - h(0.1))).abs() < 1e-6, "{rate}");
}

fn config_file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn config_keys_override_flags() {
    let dir = workspace();
    config_file(dir.path(), "c.toml", "dec-states = 2\nchannel = \"bsc:0.1\"\n");
    let r = fsbound(
        dir.path(),
        &["--config", "c.toml", "bound-expected", "--source", "u.txt", "--channel", "bsc:0.3"],
    );
    assert_eq!(r.code, 1, "{}", r.stderr);
    let v = json(&r);
    assert_eq!(v["config"]["dec_states"], 2);
    assert_eq!(v["config"]["channel"], "bsc:0.1");

    config_file(dir.path(), "c.json", r#"{"mode": "finite-n"}"#);
    let r = fsbound(
        dir.path(),
        &["bound-expected", "--source", "u.txt", "--channel", "bsc:0.1", "--config", "c.json"],
    );
    let b = json(&r)["result"]["bound"]["value"].as_f64().unwrap();
    assert!(b > 0.05 && b < 0.1, "{b}");

    // 2-blocks of 0101… are deterministic, so nothing is left to bound
    config_file(dir.path(), "b.json", r#"{"block_len": 2}"#);
    let r = fsbound(
        dir.path(),
        &["bound-expected", "--source", "u.txt", "--channel", "bsc:0.1", "--config", "b.json"],
    );
    let v = json(&r);
    assert_eq!(v["result"]["block_len"], 2);
    assert_eq!(v["result"]["bound"]["value"].as_f64().unwrap(), 0.0);

    config_file(dir.path(), "bad.json", r#"{"channle": "bsc:0.1"}"#);
    let r = fsbound(dir.path(), &["--config", "bad.json", "bound-expected", "--source", "u.txt"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("channle"));
}
