use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nlradius::correlation::ols;
use nlradius::rng::seeded_rng;
use rand::Rng;
use serde_json::Value;
use tempfile::TempDir;

fn nlradius(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlradius"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = nlradius(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    nlradius(args).status.code().expect("exited normally")
}

fn json(line: &str) -> Value {
    serde_json::from_str(line.trim()).unwrap()
}

fn write_values(path: &Path, values: &[f64]) {
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    fs::write(path, text).unwrap();
}

fn gaussian_file(dir: &Path, name: &str, n: usize, seed: u64) -> PathBuf {
    let mut rng = seeded_rng(seed);
    let xs: Vec<f64> = (0..n)
        .map(|_| (0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0)
        .collect();
    let path = dir.join(name);
    write_values(&path, &xs);
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn csv_rows(path: &Path) -> Vec<csv::StringRecord> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap()).collect()
}

fn column(path: &Path, name: &str) -> usize {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().position(|h| h == name).unwrap()
}

fn simulate(dir: &Path, sets: &[&str]) -> Vec<PathBuf> {
    let mut args = vec!["simulate", "-o", s(dir)];
    for kv in sets {
        args.push("--set");
        args.push(kv);
    }
    ok(&args).lines().map(PathBuf::from).collect()
}

#[test]
fn simulate_writes_one_file_per_seed() {
    let dir = TempDir::new().unwrap();
    let files = simulate(dir.path(), &["system=henon", "lengths=200", "seeds=3"]);
    assert_eq!(files.len(), 3);
    for f in &files {
        assert_eq!(fs::read_to_string(f).unwrap().lines().count(), 200);
    }
    assert!(dir.path().join("manifest.json").exists());

    let again = TempDir::new().unwrap();
    let repeat = simulate(again.path(), &["system=henon", "lengths=200", "seeds=3"]);
    for (a, b) in files.iter().zip(&repeat) {
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }
}

#[test]
fn simulate_lorenz_length() {
    let dir = TempDir::new().unwrap();
    let files = simulate(dir.path(), &["system=lorenz", "lengths=4000"]);
    assert_eq!(files.len(), 1);
    assert_eq!(fs::read_to_string(&files[0]).unwrap().lines().count(), 4000);
}

#[test]
fn simulate_csv_has_state_columns() {
    let dir = TempDir::new().unwrap();
    let out = ok(&[
        "simulate",
        "-o",
        s(dir.path()),
        "--set",
        "system=rossler",
        "--set",
        "lengths=50",
        "--format",
        "csv",
    ]);
    let path = PathBuf::from(out.trim());
    let mut r = csv::Reader::from_path(&path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["t", "x", "y", "z"]);
    assert_eq!(r.records().count(), 50);
}

#[test]
fn radius_of_unit_spread_sample() {
    let dir = TempDir::new().unwrap();
    let raw = gaussian_file(dir.path(), "raw.txt", 1024, 5);
    let first = json(&ok(&["radius", s(&raw)]));
    let spread = first["spread"].as_f64().unwrap();
    let xs: Vec<f64> = fs::read_to_string(&raw)
        .unwrap()
        .lines()
        .map(|l| l.parse::<f64>().unwrap() / spread)
        .collect();
    let unit = dir.path().join("unit.txt");
    write_values(&unit, &xs);
    let report = json(&ok(&["radius", s(&unit)]));
    assert!((report["spread"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((report["r_opt"].as_f64().unwrap() - 0.46078).abs() < 5e-5);
    assert_eq!(report["n"], 1024);
    assert_eq!(report["N"], 1024);
}

#[test]
fn radius_reports_embedded_length_and_range() {
    let dir = TempDir::new().unwrap();
    let f = gaussian_file(dir.path(), "g.txt", 4000, 6);
    let report = json(&ok(&["radius", s(&f), "--dim", "3", "--tau", "17", "--beta", "0.1"]));
    assert_eq!(report["n"], 3966);
    let r = report["r_opt"].as_f64().unwrap();
    assert!((report["lower"].as_f64().unwrap() - 0.1 * r).abs() < 1e-12);
    assert_eq!(report["upper"].as_f64().unwrap(), r);
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let constant = dir.path().join("constant.txt");
    write_values(&constant, &[3.0; 100]);
    assert_eq!(code(&["radius", s(&constant)]), 4);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "# header\n1.0\n2.0\nabc\n").unwrap();
    let out = nlradius(&["radius", s(&bad)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":4:"));

    assert_eq!(code(&["radius", s(&dir.path().join("missing.txt"))]), 2);
    assert_eq!(code(&["radius", s(&constant), "--norm", "l3"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);

    let short = dir.path().join("short.txt");
    write_values(&short, &[1.0]);
    assert_eq!(code(&["radius", s(&short)]), 5);
}

#[test]
fn ingest_segments_and_comments() {
    let dir = TempDir::new().unwrap();
    let f = gaussian_file(dir.path(), "g.txt", 4096, 7);
    let text = format!("# recorded at 250 Hz\n{}", fs::read_to_string(&f).unwrap());
    fs::write(&f, text).unwrap();
    let out = ok(&["ingest", s(&f), "--segment", "1024", "--dt", "0.004"]);
    let lines: Vec<Value> = out.lines().map(json).collect();
    assert_eq!(lines.len(), 4);
    for (k, l) in lines.iter().enumerate() {
        assert_eq!(l["segment"], k);
        assert_eq!(l["start"], 1024 * k);
        assert_eq!(l["N"], 1024);
        assert!(l["r_opt"].as_f64().unwrap() > 0.0);
    }

    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "# nothing\n\n").unwrap();
    assert_ne!(code(&["ingest", s(&empty)]), 0);
}

#[test]
fn embed_delay_reports_and_writes_curve() {
    let dir = TempDir::new().unwrap();
    let mut rng = seeded_rng(21);
    let xs: Vec<f64> = (0..2000)
        .map(|i| {
            (2.0 * std::f64::consts::PI * i as f64 / 100.0).sin()
                + 0.01 * ((0..12).map(|_| rng.random::<f64>()).sum::<f64>() - 6.0)
        })
        .collect();
    let f = dir.path().join("sine.txt");
    write_values(&f, &xs);
    let curve = dir.path().join("mi.csv");
    let report = json(&ok(&["embed-delay", s(&f), "--max-tau", "60", "--curve", s(&curve)]));
    let tau = report["tau"].as_u64().unwrap();
    assert!((20..=30).contains(&tau), "tau = {tau}");
    assert_eq!(csv_rows(&curve).len(), 60);
}

#[test]
fn corrdim_tables_and_curve_round_trip() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "corrdim",
        "-o",
        s(dir.path()),
        "--set",
        "system=henon",
        "--set",
        "lengths=200",
        "--set",
        "seeds=100",
    ]);
    let est_path = dir.path().join("estimates.csv");
    let estimates = csv_rows(&est_path);
    // full range plus three beta ranges
    assert_eq!(estimates.len(), 400);

    let (seed_e, method_e, beta_e, d2_e) = (
        column(&est_path, "seed"),
        column(&est_path, "method"),
        column(&est_path, "beta"),
        column(&est_path, "d2"),
    );
    let curve_path = dir.path().join("curves.csv");
    let (seed_c, method_c, beta_c) = (
        column(&curve_path, "seed"),
        column(&curve_path, "method"),
        column(&curve_path, "beta"),
    );
    let (lr, lc, fit) = (
        column(&curve_path, "log_r"),
        column(&curve_path, "log_C"),
        column(&curve_path, "in_fit_range"),
    );
    let curves = csv_rows(&curve_path);
    for e in estimates.iter().filter(|e| &e[seed_e] == "3") {
        let (x, y): (Vec<f64>, Vec<f64>) = curves
            .iter()
            .filter(|c| c[seed_c] == e[seed_e] && c[method_c] == e[method_e] && c[beta_c] == e[beta_e])
            .filter(|c| &c[fit] == "true")
            .map(|c| (c[lr].parse::<f64>().unwrap(), c[lc].parse::<f64>().unwrap()))
            .unzip();
        let (slope, _, _) = ols(&x, &y);
        let d2: f64 = e[d2_e].parse().unwrap();
        assert!((slope - d2).abs() < 1e-12, "{slope} vs {d2}");
    }
    let manifest = json(&fs::read_to_string(dir.path().join("manifest.json")).unwrap());
    assert_eq!(manifest["command"], "corrdim");
}

#[test]
fn k2_writes_one_curve_per_length() {
    let dir = TempDir::new().unwrap();
    ok(&[
        "k2",
        "-o",
        s(dir.path()),
        "--set",
        "system=henon",
        "--set",
        "lengths=150,200,250,300",
        "--set",
        "seeds=4",
    ]);
    let curves: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("k2_curve_"))
        .collect();
    assert_eq!(curves.len(), 4);
    assert!(!dir.path().join("mse.csv").exists());

    let with_truth = TempDir::new().unwrap();
    ok(&[
        "k2",
        "-o",
        s(with_truth.path()),
        "--set",
        "system=henon",
        "--set",
        "lengths=300",
        "--set",
        "seeds=4",
        "--set",
        "truth=0.42",
        "--set",
        "resamples=200",
    ]);
    assert!(with_truth.path().join("mse.csv").exists());
}

fn compare(a: &[PathBuf], b: &[PathBuf], extra: &[&str]) -> Vec<csv::StringRecord> {
    let mut args = vec!["compare-rules".to_string(), "--group-a".into()];
    args.extend(a.iter().map(|p| p.display().to_string()));
    args.push("--group-b".into());
    args.extend(b.iter().map(|p| p.display().to_string()));
    args.extend(extra.iter().map(|x| x.to_string()));
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = ok(&argv);
    let mut r = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(
        r.headers().unwrap(),
        vec!["rule", "z", "mean_a", "mean_b", "n_a", "n_b", "error"]
    );
    r.records().map(|x| x.unwrap()).collect()
}

#[test]
fn compare_rules_identical_groups() {
    let dir = TempDir::new().unwrap();
    let files = simulate(dir.path(), &["system=henon", "lengths=500", "seeds=6"]);
    let rows = compare(&files, &files, &[]);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        match r[1].parse::<f64>() {
            Ok(z) => assert!(z.abs() < 1e-9, "{} z = {z}", &r[0]),
            Err(_) => assert!(!r[6].is_empty()),
        }
    }
}

#[test]
fn compare_rules_separates_noisy_henon() {
    let clean = TempDir::new().unwrap();
    let noisy = TempDir::new().unwrap();
    let a = simulate(clean.path(), &["system=henon", "lengths=3000", "seeds=16", "seed=1"]);
    let b = simulate(
        noisy.path(),
        &[
            "system=henon",
            "lengths=3000",
            "seeds=16",
            "seed=2",
            "noise_levels=0.08",
        ],
    );
    let rows = compare(&a, &b, &[]);
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let z: f64 = r[1].parse().unwrap_or_else(|_| panic!("{} failed: {}", &r[0], &r[6]));
        assert!(z.abs() > 2.0, "{}: z = {z}", &r[0]);
        assert_eq!(&r[4], "16");
    }
}

#[test]
fn rqa_export_pbm_and_csv() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("alt.txt");
    write_values(&f, &[0.0, 10.0, 0.0, 10.0, 0.0]);
    let pbm = ok(&["rqa-export", s(&f), "--radius", "1"]);
    assert_eq!(pbm, "P1\n5 5\n1 0 1 0 1\n0 1 0 1 0\n1 0 1 0 1\n0 1 0 1 0\n1 0 1 0 1\n");

    let csv_out = dir.path().join("rp.csv");
    let report = json(&ok(&[
        "rqa-export",
        s(&f),
        "--radius",
        "1",
        "--format",
        "csv",
        "-o",
        s(&csv_out),
    ]));
    assert_eq!(report["recurrent_points"], 13);
    assert_eq!(csv_rows(&csv_out).len(), 13);

    let hist = dir.path().join("hist.csv");
    ok(&[
        "rqa-export",
        s(&f),
        "--radius",
        "1",
        "-o",
        s(&dir.path().join("rp.pbm")),
        "--histogram",
        s(&hist),
        "--m-max",
        "3",
    ]);
    assert_eq!(csv_rows(&hist).len(), 3);
    assert_eq!(code(&["rqa-export", s(&f), "--dim", "2", "--histogram", s(&hist)]), 2);
}

#[test]
fn config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("exp.cfg");
    fs::write(&cfg, "# henon batch\nsystem = henon\nlengths = 100\nseeds = 2\n").unwrap();
    let out = dir.path().join("out");
    let files = ok(&["simulate", "--config", s(&cfg), "--set", "seeds=3", "-o", s(&out)]);
    assert_eq!(files.lines().count(), 3);
    assert!(fs::read_to_string(out.join("config.txt"))
        .unwrap()
        .contains("seeds = 3"));

    fs::write(&cfg, "system = henon\nlengths\n").unwrap();
    assert_eq!(code(&["simulate", "--config", s(&cfg), "-o", s(&out)]), 3);
    assert_eq!(code(&["simulate", "--set", "colour=blue", "-o", s(&out)]), 2);
}
