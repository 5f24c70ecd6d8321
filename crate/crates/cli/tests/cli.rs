//! End-to-end checks of the `superspin` binary: CSV shapes, determinism,
//! labels, exceptional-point files, exit codes, and figure output.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superspin"))
        .args(args)
        .current_dir(env!("CARGO_TARGET_TMPDIR"))
        .output()
        .expect("spawn superspin")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "superspin {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn tmp_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .expect("header")
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

#[test]
fn spectrum_both_methods_row_counts() {
    let text = stdout(&[
        "spectrum", "--model", "btc", "--n", "3", "--omega", "1", "--gamma", "0.1", "--method",
        "both",
    ]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["method", "re", "im", "s", "sx", "m", "mp"]);
    assert_eq!(rows.len(), 32);
    assert_eq!(rows.iter().filter(|r| r[0] == "exact").count(), 16);
    assert_eq!(rows.iter().filter(|r| r[0] == "perturbative").count(), 16);
    assert!(text.ends_with('\n'));
    assert!(!text.contains('\r'), "LF line endings only");
}

#[test]
fn spectrum_is_deterministic() {
    let args = [
        "spectrum", "--model", "b", "--n", "4", "--omega", "1", "--gamma", "0.3",
    ];
    let first = stdout(&args);
    let second = stdout(&args);
    assert_eq!(first, second);
}

#[test]
fn gamma_zero_exact_spectrum_is_imaginary() {
    let text = stdout(&[
        "spectrum", "--model", "c", "--n", "4", "--omega", "1", "--gamma", "0", "--method", "exact",
    ]);
    let (_, rows) = parse_csv(&text);
    for r in rows {
        let re: f64 = r[1].parse().unwrap();
        assert!(re.abs() < 1e-12, "Re {re}");
    }
}

#[test]
fn model_a_perturbative_labels_are_magnetizations() {
    let text = stdout(&[
        "spectrum",
        "--model",
        "a",
        "--n",
        "3",
        "--omega",
        "1",
        "--gamma",
        "0.1",
        "--method",
        "perturbative",
    ]);
    let (_, rows) = parse_csv(&text);
    // steady state at (m, mp) = (N/2, N/2) = (1.5, 1.5), half-integers as decimals
    let steady = rows
        .iter()
        .find(|r| r[1] == "0" && r[2] == "0")
        .expect("zero eigenvalue row");
    assert_eq!(steady[5], "1.5");
    assert_eq!(steady[6], "1.5");
    // superspin columns stay empty for this model
    assert!(rows.iter().all(|r| r[3].is_empty() && r[4].is_empty()));
}

#[test]
fn sweep_writes_ep_events_next_to_output() {
    let out = tmp_path("sweep_btc_n1.csv");
    let status = run(&[
        "sweep",
        "--model",
        "btc",
        "--n",
        "1",
        "--omega",
        "1",
        "--gamma-min",
        "1.5",
        "--gamma-max",
        "2.5",
        "--steps",
        "101",
        "--detect-ep",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let sweep_text = std::fs::read_to_string(&out).unwrap();
    let (header, rows) = parse_csv(&sweep_text);
    assert_eq!(header, ["gamma", "re", "im"]);
    assert_eq!(rows.len(), 101 * 4);

    let events_text = std::fs::read_to_string(tmp_path("ep_events.csv")).unwrap();
    let (header, events) = parse_csv(&events_text);
    assert_eq!(header, ["pair_id", "gamma_star", "confidence"]);
    assert_eq!(events.len(), 1);
    let gamma_star: f64 = events[0][1].parse().unwrap();
    assert!(
        (gamma_star - 2.0).abs() < 1e-3,
        "gamma_star {gamma_star} not near 2"
    );
    assert_eq!(events[0][2], "high");
}

#[test]
fn dynamics_analytic_overlay_agrees() {
    let text = stdout(&[
        "dynamics",
        "--model",
        "b",
        "--n",
        "20",
        "--omega",
        "1",
        "--gamma",
        "0.5",
        "--t-max",
        "5",
        "--dt",
        "1e-3",
        "--init",
        "polarized-z",
        "--analytic",
    ]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["t", "jx", "jy", "jz", "provenance"]);
    let integrated: Vec<&Vec<String>> = rows.iter().filter(|r| r[4] == "integrated").collect();
    let analytic: Vec<&Vec<String>> = rows.iter().filter(|r| r[4] == "analytic").collect();
    assert_eq!(integrated.len(), 5001);
    assert_eq!(integrated.len(), analytic.len());
    let mut worst = 0.0f64;
    for (a, b) in integrated.iter().zip(analytic.iter()) {
        assert_eq!(a[0], b[0], "time grids align");
        let ja: f64 = a[3].parse().unwrap();
        let jb: f64 = b[3].parse().unwrap();
        worst = worst.max((ja - jb).abs());
    }
    assert!(worst < 1e-4, "max |d jz| = {worst}");
}

#[test]
fn density_defaults_reproduce_reference_row() {
    let text = stdout(&["density", "--model", "btc", "--gamma", "0.1"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["s_or_sx", "d", "g"]);
    let row = rows
        .iter()
        .find(|r| r[0] == "0.5")
        .expect("s_bar = 0.5 row");
    let g: f64 = row[2].parse().unwrap();
    assert!((g - 10.0).abs() < 1e-9);
    let d: f64 = row[1].parse().unwrap();
    assert!((d * g - 1.0).abs() < 1e-9);
}

#[test]
fn sweep_output_independent_of_thread_cap() {
    let args = [
        "sweep",
        "--model",
        "b",
        "--n",
        "3",
        "--omega",
        "1",
        "--gamma-min",
        "0.1",
        "--gamma-max",
        "1.0",
        "--steps",
        "7",
    ];
    let parallel = stdout(&args);
    let serial = Command::new(env!("CARGO_BIN_EXE_superspin"))
        .args(args)
        .env("SUPERSPIN_THREADS", "1")
        .current_dir(env!("CARGO_TARGET_TMPDIR"))
        .output()
        .expect("spawn superspin");
    assert!(serial.status.success());
    assert_eq!(parallel.as_bytes(), serial.stdout.as_slice());
}

#[test]
fn invalid_arguments_exit_2() {
    // negative dissipation
    let out = run(&[
        "spectrum", "--model", "btc", "--n", "3", "--omega", "1", "--gamma", "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // overdamped closed form requested
    let out = run(&[
        "dynamics",
        "--model",
        "b",
        "--n",
        "1",
        "--omega",
        "1",
        "--gamma",
        "3",
        "--t-max",
        "1",
        "--analytic",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa"));
    // clap-level usage error
    let out = run(&["spectrum", "--model", "btc"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn svg_output_is_self_contained() {
    let path = tmp_path("spectrum.svg");
    let status = run(&[
        "spectrum",
        "--model",
        "btc",
        "--n",
        "3",
        "--omega",
        "1",
        "--gamma",
        "0.1",
        "--svg",
        path.to_str().unwrap(),
        "--out",
        tmp_path("spectrum.csv").to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(
        !svg.contains("http://") || svg.contains("xmlns"),
        "no external assets"
    );
    assert!(svg.contains("circle"));
}

#[test]
fn json_mirror_round_trips_csv_values() {
    let json_path = tmp_path("spectrum.json");
    let csv_path = tmp_path("spectrum_rt.csv");
    let status = run(&[
        "spectrum",
        "--model",
        "btc",
        "--n",
        "2",
        "--omega",
        "1",
        "--gamma",
        "0.2",
        "--method",
        "exact",
        "--out",
        csv_path.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(parsed["model"], "btc");
    assert_eq!(parsed["n"], 2);
    let rows = parsed["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);

    let (_, csv_rows) = parse_csv(&std::fs::read_to_string(&csv_path).unwrap());
    for (jr, cr) in rows.iter().zip(csv_rows.iter()) {
        let j_re = jr["re"].as_f64().unwrap();
        let c_re: f64 = cr[1].parse().unwrap();
        assert!((j_re - c_re).abs() <= 1e-11 * j_re.abs().max(1.0));
    }
}
