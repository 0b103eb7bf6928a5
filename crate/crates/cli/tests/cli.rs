use std::path::Path;
use std::process::{Command, Output};

use surflearn::io::{read_comments, read_csv, CoherentRow, LogicalRow, TrajectoryRow};

fn surflearn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surflearn"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// File contents with the comment block removed.
fn body(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n")
}

const SMALL_SCAN: &str = r#"
kind = "entropy_scan"
master_seed = 5
[grid]
theta = [0.25, 0.5]
phi = [0.0, 0.3]
[fermion]
L = 12
boundary = "periodic"
trajectories = 6
profile_stride = 2
"#;

#[test]
fn identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "scan.toml", SMALL_SCAN);
    let outs: Vec<_> = ["1", "3", "1"]
        .iter()
        .enumerate()
        .map(|(i, threads)| {
            let out = dir.path().join(format!("run{i}"));
            let o = surflearn(&["run", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    for name in ["trajectories.csv", "profiles.csv", "arcs.csv"] {
        let a = std::fs::read(outs[0].join(name)).unwrap();
        for o in &outs[1..] {
            assert_eq!(a, std::fs::read(o.join(name)).unwrap(), "{name}");
        }
    }
    let rows: Vec<TrajectoryRow> = read_csv(&outs[0].join("trajectories.csv")).unwrap();
    assert_eq!(rows.len(), 4 * 6);
    let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), 24);

    // a different master seed changes the samples but not the shape
    let out = dir.path().join("other");
    let o = surflearn(&["run", "--config", &cfg, "--seed", "6", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(body(&outs[0].join("trajectories.csv")), body(&out.join("trajectories.csv")));
    let other: Vec<TrajectoryRow> = read_csv(&out.join("trajectories.csv")).unwrap();
    assert_eq!(other.len(), rows.len());
}

#[test]
fn manifest_references_every_file_once() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "scan.toml", SMALL_SCAN);
    let out = dir.path().join("out");
    assert!(surflearn(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let hash = m["manifest_sha256"].as_str().unwrap();
    assert_eq!(hash.len(), 64);
    assert_eq!(m["master_seed"], 5);
    assert_eq!(m["tasks"].as_array().unwrap().len(), 24);
    assert!(m["failed"].as_array().unwrap().is_empty());
    let mut listed: Vec<String> = m["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["path"].as_str().unwrap().to_string())
        .collect();
    listed.sort();
    let mut on_disk: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    for f in &on_disk {
        assert_eq!(read_comments(&out.join(f)).unwrap()["manifest_sha256"], hash);
    }
}

#[test]
fn xy_line_scan_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "xy.toml",
        r#"
kind = "entropy_scan"
[grid]
theta = [0.5]
phi = [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]
[fermion]
L = 64
trajectories = 100
"#,
    );
    let out = dir.path().join("out");
    let o = surflearn(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: Vec<TrajectoryRow> = read_csv(&out.join("trajectories.csv")).unwrap();
    assert_eq!(rows.len(), 800);
    assert!(rows.iter().all(|r| r.sites == 64 && r.depth == 64 && r.cut == 32));
    let arcs = std::fs::read_to_string(out.join("arcs.csv")).unwrap();
    assert_eq!(arcs.lines().filter(|l| !l.starts_with('#')).count(), 1 + 8);
}

#[test]
fn coherent_info_limits() {
    let dir = tempfile::tempdir().unwrap();
    let ts: Vec<String> = (0..20).map(|i| format!("{}", 0.25 * i as f64 / 19.0)).collect();
    let cfg = write(
        dir.path(),
        "ci.toml",
        &format!(
            "kind = \"coherent_info\"\n[grid]\ntheta = [0.0]\nphi = [0.0]\nt = [{}]\n[statevector]\nd = 2\n",
            ts.join(", ")
        ),
    );
    let out = dir.path().join("out");
    assert!(surflearn(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]).status.success());
    let rows: Vec<CoherentRow> = read_csv(&out.join("coherent.csv")).unwrap();
    assert_eq!(rows.len(), 20);
    assert!((rows[0].i_c - 1.0).abs() < 1e-10);
    assert!(rows[19].i_c.abs() < 1e-10);
    assert!(rows.iter().all(|r| r.plan == "exhaustive" && (r.total_probability - 1.0).abs() < 1e-10));
    // d = 2 has 5 data qubits: at most 32 outcome strings per point, Born weights summing to 1
    let records: Vec<LogicalRow> = read_csv(&out.join("records.csv")).unwrap();
    for t in [0.0, rows[10].t] {
        let at: Vec<_> = records.iter().filter(|r| r.t == t).collect();
        assert!(!at.is_empty() && at.len() <= 32);
        let total: f64 = at.iter().map(|r| r.log_p.exp()).sum();
        assert!((total - 1.0).abs() < 1e-10, "{total}");
        assert!(at.iter().all(|r| (r.log_p.exp() - 0.5 * (r.p_pp + r.p_mm)).abs() < 1e-12));
    }
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sv = |d: usize| {
        format!(
            "kind = \"coherent_info\"\n[grid]\ntheta = [0.0]\nphi = [0.0]\nt = [0.1]\n\
             [statevector]\nd = {d}\nplan = \"monte_carlo\"\nsamples = 10\n"
        )
    };
    let ok = surflearn(&["validate", "--config", &write(dir.path(), "d4.toml", &sv(4))]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("2^26"));

    let big = surflearn(&["validate", "--config", &write(dir.path(), "d5.toml", &sv(5))]);
    assert_eq!(big.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&big.stderr).contains("capacity"));

    let chain = |l: usize| {
        format!("kind = \"entropy_scan\"\n[grid]\ntheta = [0.5]\nphi = [0.2]\n[fermion]\nL = {l}\ntrajectories = 1\n")
    };
    let ok = surflearn(&["validate", "--config", &write(dir.path(), "l256.toml", &chain(256))]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains(&format!("{}", 512 * 512)));
    let big = surflearn(&["validate", "--config", &write(dir.path(), "l1024.toml", &chain(1024))]);
    assert_eq!(big.status.code(), Some(3));

    let bad = surflearn(&["validate", "--config", &write(dir.path(), "bad.toml", "kind = \"entropy_scan\"\n")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("grid"));
    let missing = surflearn(&["run", "--config", "/nonexistent.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    // capacity is enforced by run as well
    let out = dir.path().join("never");
    let big = surflearn(&["run", "--config", &dir.path().join("d5.toml").to_string_lossy(), "--out", out.to_str().unwrap()]);
    assert_eq!(big.status.code(), Some(3));
}

#[test]
fn recipes_listed_and_runnable() {
    let o = surflearn(&["list-recipes"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["duality_table", "floquet_spectra", "entanglement_arcs", "ensemble_geometry"] {
        assert!(text.contains(name), "{name}");
    }
    let dir = tempfile::tempdir().unwrap();
    let o = surflearn(&["run", "--recipe", "duality_table", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    assert!(dir.path().join("duality.csv").exists());
}
