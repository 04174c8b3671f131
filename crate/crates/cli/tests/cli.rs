use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use holderscope::signals::{generate, SignalSpec};
use holderscope::wavelets::read_leaders_binary;
use holderscope_cli::ingest::{ingest, write_samples, Format};
use proptest::prelude::*;
use serde_json::Value;
use tempfile::tempdir;

fn bin(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_holderscope"));
    cmd.args(args).env_remove("HOLDERSCOPE_THREADS");
    if let Some(t) = threads {
        cmd.env("HOLDERSCOPE_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_lines(path: &Path, values: impl Iterator<Item = String>) {
    let text: String = values.map(|v| v + "\n").collect();
    fs::write(path, text).unwrap();
}

#[test]
fn analyze_example_recovers_cusp_exponent() {
    let out = bin(
        &[
            "analyze",
            "--generate",
            "cusp:alpha=0.5,x0=0.5",
            "--n",
            "15",
            "--methods",
            "leaders,minimax",
            "--family",
            "power:0.1..2.0",
        ],
        None,
    );
    let v = json(&out);
    let point = &v["points"][0];
    let powers: Vec<&Value> = point["estimates"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["model"] == "power")
        .collect();
    assert_eq!(powers.len(), 2);
    for e in powers {
        let a = e["alpha_hat"].as_f64().unwrap();
        assert!((a - 0.5).abs() <= 0.05, "{}: {a}", e["method"]);
    }
    let g = point["generalized"]["value"].as_f64().unwrap();
    assert!((g - 0.5).abs() <= 0.05, "{g}");
    assert_eq!(v["config"]["j_fit"], serde_json::json!([4, 9]));
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = bin(&["analyze", "--generate", "cusp:alpha=0.5", "--n", "12", "--methods", "minimax"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"x0\": 5.0000000000000000e-1"), "{text}");
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempdir().unwrap();
    let run = |name: &str, threads: &str| {
        let out_dir = dir.path().join(name);
        let out = bin(
            &[
                "analyze",
                "--generate",
                "weierstrass:a=0.7071067811865476,b=2",
                "--n",
                "13",
                "--x0",
                "0.1:0.9:7",
                "--methods",
                "leaders,minimax,whitney,mollifier",
                "--sigma",
                "power_log:alpha=0.5,beta=0",
                "--family",
                "power:0.1..2.0",
                "--out",
                out_dir.to_str().unwrap(),
            ],
            Some(threads),
        );
        assert!(out.status.success(), "{}", stderr(&out));
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(&out_dir)
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
            })
            .collect();
        files.sort();
        (out.stdout, files)
    };
    let a = run("a", "1");
    let b = run("b", "4");
    let c = run("c", "4");
    assert_eq!(a, b);
    assert_eq!(b, c);
    assert_eq!(a.1.len(), 1 + 2 * 7);
    assert_eq!(fs::read(dir.path().join("a/results.json")).unwrap(), a.0);
}

#[test]
fn profile_csv_layout() {
    let dir = tempdir().unwrap();
    let out = bin(
        &[
            "analyze",
            "--generate",
            "cusp:alpha=0.3",
            "--n",
            "12",
            "--methods",
            "minimax,leaders",
            "--sigma",
            "power:alpha=0.3",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    let v = json(&out);
    let csv = fs::read_to_string(dir.path().join("profile_000.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "j,E_j,osc_j,deficiency_j,d_j,sigma_j,ratio");
    let (lo, hi) = (v["config"]["j_fit"][0].as_u64().unwrap(), v["config"]["j_fit"][1].as_u64().unwrap());
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len() as u64, hi - lo + 1);
    for (r, j) in rows.iter().zip(lo..) {
        assert_eq!(r[0], j.to_string());
        assert!(r[2].is_empty() && r[3].is_empty());
        let (e, s, ratio): (f64, f64, f64) = (r[1].parse().unwrap(), r[5].parse().unwrap(), r[6].parse().unwrap());
        assert!((ratio - e / s).abs() <= 1e-12 * ratio.abs());
        assert!((s - (-0.3 * j as f64).exp2()).abs() <= 1e-15);
    }
    let plot = fs::read_to_string(dir.path().join("plot_000.csv")).unwrap();
    let second: Vec<&str> = plot.lines().nth(1).unwrap().split(',').collect();
    let e: f64 = rows[0][1].parse().unwrap();
    assert!((second[1].parse::<f64>().unwrap() - e.log2()).abs() <= 1e-12);
}

#[test]
fn ingest_reports_grid_size() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    write_lines(&csv, (0..32768).map(|i| format!("{}", ((i as f64) / 32768.0 - 0.5).abs().sqrt())));
    assert_eq!(ingest(&csv, Format::Csv).unwrap().n(), 15);
    let raw = dir.path().join("s.bin");
    let bytes: Vec<u8> = (0..1 << 14).flat_map(|i| (i as f64).to_le_bytes()).collect();
    fs::write(&raw, bytes).unwrap();
    let out = bin(
        &["leaders", "--input", raw.to_str().unwrap(), "--out", dir.path().join("l.bin").to_str().unwrap()],
        None,
    );
    assert_eq!(json(&out)["n"], 14);
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempdir().unwrap();
    let short = dir.path().join("short.csv");
    write_lines(&short, (0..1000).map(|i| i.to_string()));
    let out = bin(&["analyze", "--input", short.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("length 1000 is not a power of two"), "{}", stderr(&out));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "0.1\n0.2\n0.3x\n0.4\n").unwrap();
    let out = bin(&["analyze", "--input", bad.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3:"), "{}", stderr(&out));

    let nan = dir.path().join("nan.bin");
    let bytes: Vec<u8> = [0.0, 1.0, f64::NAN, 2.0].iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(&nan, bytes).unwrap();
    let out = bin(&["analyze", "--input", nan.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("sample 2 is not finite"), "{}", stderr(&out));

    for args in [
        &["analyze", "--generate", "cusp:alpha=0.5", "--x0", "1.5"][..],
        &["analyze", "--generate", "cusp:alpha=0.5", "--methods", "fourier"],
        &["analyze", "--generate", "cusp:alpha=0.5", "--j-max", "14"],
        &["membership", "--generate", "cusp:alpha=0.5"],
        &["analyze", "--generate", "cusp:alpha=0.5", "--input", "x.csv"],
    ] {
        let out = bin(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    let out = bin(&["analyze", "--generate", "cusp:alpha=0.5", "--n", "12"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"generate": "cusp:alpha=0.8,x0=0.5", "n": 14, "methods": "minimax", "x0": "0.5"}"#,
    )
    .unwrap();
    let out = bin(&["analyze", "--config", cfg.to_str().unwrap(), "--n", "12"], None);
    let v = json(&out);
    assert_eq!(v["config"]["n"], 12);
    assert_eq!(v["config"]["methods"], serde_json::json!(["minimax"]));
    let a = v["points"][0]["estimates"][0]["alpha_hat"].as_f64().unwrap();
    assert!((a - 0.8).abs() <= 0.05);

    fs::write(&cfg, r#"{"generate": "cusp:alpha=0.8", "colour": "red"}"#).unwrap();
    let out = bin(&["analyze", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("colour"), "{}", stderr(&out));
}

#[test]
fn membership_reports_verdicts() {
    let run = |sigma: &str| {
        let out = bin(
            &["membership", "--generate", "cusp:alpha=0.5", "--n", "14", "--sigma", sigma, "--methods", "leaders,minimax"],
            None,
        );
        json(&out)["points"][0]["membership"]
            .as_array()
            .unwrap()
            .iter()
            .map(|m| m["verdict"].as_str().unwrap().to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(run("power:alpha=0.4"), ["consistent", "consistent"]);
    assert_eq!(run("power:alpha=0.9"), ["violated", "violated"]);
}

#[test]
fn family_check_and_selftest() {
    let v = json(&bin(&["family-check", "power:0.2..2.5"], None));
    assert_eq!(v["decreasing"], true);
    assert!(v["checks"].as_u64().unwrap() > 50);
    let out = bin(&["selftest"], Some("2"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn generate_then_ingest_is_bit_exact() {
    let dir = tempdir().unwrap();
    let spec = "cusp_log:alpha=0.5,beta=1,x0=0.3";
    let (want, _) = generate(&SignalSpec::<f64>::cusp_log(0.5, 1.0, 0.3, 13)).unwrap();
    for name in ["s.bin", "s.csv"] {
        let path = dir.path().join(name);
        let out = bin(&["generate", spec, "--n", "13", "--out", path.to_str().unwrap()], None);
        let v = json(&out);
        assert_eq!(v["ground_truth"]["alpha"].as_f64(), Some(0.5));
        let got = ingest(&path, Format::from_path(&path)).unwrap();
        let same = got.values().iter().zip(want.values()).all(|(a, b)| a.to_bits() == b.to_bits());
        assert!(same && got.len() == want.len(), "{name}");
    }
}

#[test]
fn leaders_binary_export_reads_back() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("lead.bin");
    let out = bin(
        &["leaders", "--generate", "cusp:alpha=0.5", "--n", "11", "--out", path.to_str().unwrap()],
        None,
    );
    let v = json(&out);
    assert_eq!(v["format"], "binary");
    let lp = read_leaders_binary(fs::File::open(&path).unwrap()).unwrap();
    assert_eq!(lp.j_max() as u64, v["j_reliable"].as_u64().unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sample_files_round_trip(n in 1u32..10, seed in any::<u64>(), csv in any::<bool>()) {
        let dir = tempdir().unwrap();
        let mut state = seed;
        let values: Vec<f64> = (0..1usize << n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let bits = state >> 2;
                let v = f64::from_bits(bits);
                if v.is_finite() { v } else { (state >> 11) as f64 * 1e-300 }
            })
            .collect();
        let f = holderscope::sampled::SampledSignal::new(values, Default::default()).unwrap();
        let format = if csv { Format::Csv } else { Format::Raw };
        let path = dir.path().join("x");
        write_samples(&path, &f, format).unwrap();
        let g = ingest(&path, format).unwrap();
        prop_assert_eq!(g.n(), n);
        for (a, b) in f.values().iter().zip(g.values()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
