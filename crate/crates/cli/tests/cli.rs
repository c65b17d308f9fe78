use std::f64::consts::{PI, SQRT_2};
use std::path::Path;
use std::process::{Command, Output};

use compacton::functionals::report;
use compacton::io::read_columns;
use compacton::profiles::{build_compacton, ModelParams};
use serde_json::Value;
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compacton"))
        .args(args)
        .current_dir(dir)
        .env_remove("COMPACTON_RTOL")
        .env_remove("COMPACTON_ATOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn field(o: &str, key: &str) -> f64 {
    let line = o.lines().find(|l| l.starts_with(key)).unwrap_or_else(|| panic!("no '{key}' in {o}"));
    line[key.len() + 1..].trim().parse().unwrap()
}

#[test]
fn profile_examples() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["profile", "--p", "4", "--B", "0", "--c", "1", "--n", "2048"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("classification: Compacton"));
    assert!((field(&text, "half_width:") - PI / SQRT_2).abs() < 1e-12);

    let o = run(dir.path(), &["profile", "--p", "4", "--B", "-0.2", "--c", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("classification: Periodic"));
    assert!((field(&text, "period:") - SQRT_2 * PI).abs() < 1e-9);

    let o = run(dir.path(), &["profile", "--p", "4", "--B", "0", "--c", "-1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("B > 0") && err.lines().count() == 1, "{err}");
}

#[test]
fn profile_files_round_trip_through_functionals() {
    let dir = TempDir::new().unwrap();
    for (b, c, v) in [("0", "1", None), ("0.25", "1", None), ("0.25", "-1", None), ("0.25", "1", Some("1"))] {
        let mut args = vec!["profile", "--B", b, "--c", c, "--n", "1025", "--out", "prof.csv"];
        if let Some(v) = v {
            args.extend(["--v", v]);
        }
        let o = run(dir.path(), &args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("prof.csv.run.json")).unwrap()).unwrap();
        for a in manifest["artifacts"].as_array().unwrap() {
            assert!(dir.path().join(a.as_str().unwrap()).exists());
        }
        if v.is_some() {
            let cols = read_columns(&dir.path().join("prof.csv"), &["x", "phi", "theta", "re", "im"]).unwrap();
            assert_eq!(cols[0].len(), 1025);
            assert_eq!(run(dir.path(), &["functionals", "--in", "prof.csv"]).status.code(), Some(2));
            continue;
        }
        let from_file = json(&run(dir.path(), &["functionals", "--in", "prof.csv"]));
        let params = ModelParams::compacton(4.0, b.parse().unwrap(), c.parse().unwrap());
        let direct = report(&build_compacton(&params, 1025).unwrap()).unwrap();
        let direct = serde_json::to_value(direct).unwrap();
        for key in ["mass", "hamiltonian", "momentum_P", "pohozaev_residual", "energy_identity_residual"] {
            assert_eq!(from_file[key].as_f64().unwrap().to_bits(), direct[key].as_f64().unwrap().to_bits(), "{b},{c}: {key}");
        }
    }
}

#[test]
fn functionals_examples() {
    let dir = TempDir::new().unwrap();
    let rep = json(&run(dir.path(), &["functionals", "--B", "0", "--c", "1"]));
    assert!((rep["hamiltonian"].as_f64().unwrap() + SQRT_2 * PI / 4.0).abs() < 1e-8);
    assert!(rep["pohozaev_residual"].as_f64().unwrap().abs() < 1e-8);

    let rep = json(&run(dir.path(), &["functionals", "--B", "0", "--c", "1", "--v", "2"]));
    assert!((rep["momentum_K"].as_f64().unwrap() + 2.0 * PI / SQRT_2).abs() < 1e-6);

    assert_eq!(run(dir.path(), &["profile", "--B", "0", "--c", "1", "--n", "64", "--out", "p.csv"]).status.code(), Some(0));
    std::fs::copy(dir.path().join("p.csv.json"), dir.path().join("empty.csv.json")).unwrap();
    std::fs::write(dir.path().join("empty.csv"), "x,phi,dphi\n").unwrap();
    assert_eq!(run(dir.path(), &["functionals", "--in", "empty.csv"]).status.code(), Some(2));

    std::fs::copy(dir.path().join("p.csv.json"), dir.path().join("bad.csv.json")).unwrap();
    std::fs::write(dir.path().join("bad.csv"), "x,phi,dphi\n0,1,0\n0.1,x,0\n0.2,1,0\n").unwrap();
    let o = run(dir.path(), &["functionals", "--in", "bad.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 3") && err.contains("phi"), "{err}");

    assert_eq!(run(dir.path(), &["functionals", "--in", "missing.csv"]).status.code(), Some(2));
}

#[test]
fn minimize_examples() {
    let dir = TempDir::new().unwrap();
    let r = json(&run(dir.path(), &["minimize", "--p", "4", "--mass", "1"]));
    assert!((r["H_star"].as_f64().unwrap() + 0.0562697).abs() < 1e-7);
    let r = json(&run(dir.path(), &["minimize", "--p", "4", "--mass", "4.442883"]));
    assert!((r["c_star"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let o = run(dir.path(), &["minimize", "--p", "9", "--mass", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("p ≥ 8"));
}

#[test]
fn spectrum_examples() {
    let dir = TempDir::new().unwrap();
    let s = json(&run(dir.path(), &["spectrum", "--case", "B0c1", "--method", "b", "--k", "2"]));
    let ev: Vec<f64> = s["eigenvalues"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((ev[0] + 2.0).abs() < 1e-3 && ev[1].abs() < 1e-3, "{ev:?}");
    assert_eq!(s["continuum_edge"].as_f64(), Some(0.25));

    let s = json(&run(dir.path(), &["spectrum", "--case", "B14cm1", "--method", "green", "--k", "1"]));
    assert!((s["eigenvalues"][0].as_f64().unwrap() - 2.0).abs() < 1e-3);

    assert_eq!(run(dir.path(), &["spectrum", "--case", "B14c1", "--method", "b"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["spectrum", "--case", "B7", "--method", "b"]).status.code(), Some(2));
}

fn manifest(dir: &Path, prefix: &str) -> Value {
    let text = std::fs::read_to_string(dir.join(format!("{prefix}_manifest.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn evolve_dkdv_writes_series_and_snapshots() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        &["evolve", "--model", "dkdv", "--ic", "compacton:B=0,c=1", "--nu", "1e-4", "--T", "1", "--out-prefix", "out/dkdv"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let series = read_columns(&dir.path().join("out/dkdv_series.csv"), &["t", "mass", "hamiltonian", "momentum"]).unwrap();
    let m0 = series[1][0];
    assert!(series[1].iter().all(|m| ((m - m0) / m0).abs() < 1e-4));
    let snap = read_columns(&dir.path().join("out/dkdv_snap002.csv"), &["x", "u"]).unwrap();
    assert_eq!(snap[0].len(), 2048);
    let m = manifest(dir.path(), "out/dkdv");
    assert_eq!(m["exit_status"], 0);
    assert_eq!(m["run"]["grid"]["n"], 2048);
    assert_eq!(m["run"]["nu"].as_f64(), Some(1e-4));
    assert!(m["wall_time_seconds"].as_f64().unwrap() > 0.0);
    for a in m["artifacts"].as_array().unwrap() {
        assert!(dir.path().join(a.as_str().unwrap()).exists());
    }
}

#[test]
fn evolve_dnls_snapshot_times() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["evolve", "--model", "dnls", "--ic", "periodic:B=-0.2,c=1", "--T", "6.2832", "--out-prefix", "nls"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = &read_columns(&dir.path().join("nls_series.csv"), &["t", "mass", "hamiltonian", "momentum"]).unwrap()[0];
    assert_eq!(t, &vec![0.0, 3.1416, 6.2832]);
    let last = read_columns(&dir.path().join("nls_snap002.csv"), &["x", "re", "im"]).unwrap();
    let first = read_columns(&dir.path().join("nls_snap000.csv"), &["x", "re", "im"]).unwrap();
    let err = first[1].iter().zip(&last[1]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-2, "{err}");
}

#[test]
fn evolve_hydro_writes_transport_comparison() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["evolve", "--model", "hydro", "--ic", "gaussian+const:center=-5", "--T", "1", "--out-prefix", "hy"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let tr = read_columns(&dir.path().join("hy_transport.csv"), &["t", "correlation", "shift"]).unwrap();
    assert!(tr[1].iter().all(|&c| c > 0.99));
    assert!(manifest(dir.path(), "hy")["run"]["rho_floor_incidents"].is_u64());
}

#[test]
fn evolve_failures_and_overrides() {
    let dir = TempDir::new().unwrap();
    // tolerances far below roundoff force a step-size underflow.
    let o = run(
        dir.path(),
        &["evolve", "--model", "dkdv", "--n", "64", "--rtol", "1e-300", "--atol", "1e-300", "--out-prefix", "fail"],
    );
    assert_eq!(o.status.code(), Some(3));
    let m = manifest(dir.path(), "fail");
    assert_eq!(m["exit_status"], 3);
    assert_eq!(m["run"]["last_good_time"].as_f64(), Some(0.0));
    for a in m["artifacts"].as_array().unwrap() {
        assert!(dir.path().join(a.as_str().unwrap()).exists());
    }

    assert_eq!(run(dir.path(), &["evolve", "--model", "dkdv", "--ic", "periodic:B=-0.2,c=1", "--out-prefix", "x"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["evolve", "--model", "dkdv", "--ic", "compacton:B=0", "--out-prefix", "x"]).status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_compacton"))
        .args(["evolve", "--model", "linear", "--n", "64", "--T", "0.1", "--out-prefix", "env"])
        .current_dir(dir.path())
        .env("COMPACTON_RTOL", "1e-5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let o = Command::new(env!("CARGO_BIN_EXE_compacton"))
        .args(["evolve", "--model", "dkdv", "--n", "256", "--T", "0.01", "--out-prefix", "env"])
        .current_dir(dir.path())
        .env("COMPACTON_RTOL", "1e-5")
        .env("COMPACTON_ATOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(dir.path(), "env");
    assert_eq!(m["run"]["rtol"].as_f64(), Some(1e-5));
    assert_eq!(m["run"]["atol"].as_f64(), Some(1e-8));
}

#[test]
fn evolve_linear_and_sweep() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["evolve", "--model", "linear", "--case", "B14c1", "--ic", "bump:seed=4", "--n", "128", "--out-prefix", "lin"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cols = read_columns(&dir.path().join("lin_linear.csv"), &["t", "energy", "energy_h", "flux_upsilon", "ortho_phi", "ortho_phix"]).unwrap();
    assert!(cols[1].windows(2).all(|w| w[1] - w[0] < 1e-10 * cols[1][0]));

    let o = run(dir.path(), &["evolve", "--model", "linear", "--n", "64", "--sweep", "T=0.1,0.2", "--out-prefix", "sw/lin"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sw/lin_sweep.json")).unwrap()).unwrap();
    let runs = summary["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    for r in runs {
        assert!(dir.path().join(r["manifest"].as_str().unwrap()).exists());
    }
    assert!(dir.path().join("sw/lin.sweep/T=0.1/lin_final.csv").exists());
    assert!(dir.path().join("sw/lin.sweep/T=0.2/lin_final.csv").exists());
    assert_eq!(run(dir.path(), &["evolve", "--model", "linear", "--sweep", "q=1", "--out-prefix", "sw/x"]).status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let args = ["profile", "--B", "0.25", "--c", "0", "--n", "513", "--out"];
    run(dir.path(), &[&args[..], &["a.csv"]].concat());
    run(dir.path(), &[&args[..], &["b.csv"]].concat());
    assert_eq!(std::fs::read(dir.path().join("a.csv")).unwrap(), std::fs::read(dir.path().join("b.csv")).unwrap());
    let a = stdout(&run(dir.path(), &["minimize", "--p", "3", "--mass", "2"]));
    let b = stdout(&run(dir.path(), &["minimize", "--p", "3", "--mass", "2"]));
    assert_eq!(a, b);
}
