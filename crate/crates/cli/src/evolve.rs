use std::path::{Path, PathBuf};
use std::thread;
use std::time::Instant;

use compacton::evolution::{
    evolve as run_model, initial_condition, translated_correlation, Field, FieldState, InitialCondition, IntegratorConfig,
    PeriodicGrid, RegularizationConfig, RunConfig, RunOutput,
};
use compacton::io::write_columns;
use compacton::profiles::{build_periodic, ModelParams};
use compacton::spectral::{evolve_linearized, LinearSettings, LinearizedOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::{EvolveArgs, Model};

const DEFAULT_RTOL: f64 = 1e-6;
const DEFAULT_ATOL: f64 = 1e-9;

/// Flag, then environment variable, then default.
fn tolerance(flag: Option<f64>, var: &str, default: f64) -> Result<f64, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(var) {
        Ok(s) => s.trim().parse().map_err(|_| CliError::input(format!("{var}='{s}' is not a number"))),
        Err(_) => Ok(default),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Initial {
    Standard(InitialCondition),
    /// `ρ = 1 + ½cos(√2x)`, `u = 0`: a stationary hydrodynamic state.
    Cosine,
    /// Random smooth bump projected onto the constraints of the linearized flow.
    Bump { seed: u64 },
}

fn parse_ic(text: &str, model: Model, p: f64) -> Result<Initial, CliError> {
    let (kind, rest) = text.split_once(':').unwrap_or((text, ""));
    let mut pairs = Vec::new();
    for item in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| CliError::input(format!("'{item}' in --ic is not key=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::input(format!("--ic {k}: '{v}' is not a number")))?;
        pairs.push((k.trim().to_string(), v));
    }
    let mut take = |key: &str, default: Option<f64>| -> Result<f64, CliError> {
        match pairs.iter().position(|(k, _)| k == key) {
            Some(i) => Ok(pairs.remove(i).1),
            None => default.ok_or_else(|| CliError::input(format!("--ic {kind} needs {key}=..."))),
        }
    };
    let ic = match kind {
        "compacton" => {
            let p = take("p", Some(p))?;
            let b = take("B", None)?;
            let c = take("c", None)?;
            Initial::Standard(InitialCondition::Compacton { p, b, c, x0: take("x0", Some(0.0))? })
        }
        "perturbed" => Initial::Standard(InitialCondition::PerturbedCompacton { x0: take("x0", Some(0.0))? }),
        "periodic" => {
            let p = take("p", Some(p))?;
            let b = take("B", None)?;
            Initial::Standard(InitialCondition::Periodic { p, b, c: take("c", None)? })
        }
        "gaussian" | "gaussian+const" => Initial::Standard(InitialCondition::GaussianDrift {
            amplitude: take("amplitude", Some(1.0))?,
            width: take("width", Some(1.0))?,
            center: take("center", Some(0.0))?,
            velocity: take("velocity", Some(1.0))?,
        }),
        "cosine" => Initial::Cosine,
        "bump" => {
            let seed = take("seed", Some(0.0))?;
            if !(seed >= 0.0 && seed.fract() == 0.0) {
                return Err(CliError::input(format!("--ic bump: seed must be a nonnegative integer, got {seed}")));
            }
            Initial::Bump { seed: seed as u64 }
        }
        _ => return Err(CliError::input(format!("unknown initial condition '{kind}'"))),
    };
    if let Some((k, _)) = pairs.first() {
        return Err(CliError::input(format!("--ic {kind} does not take '{k}'")));
    }
    let fits = match (&ic, model) {
        (Initial::Standard(InitialCondition::Compacton { .. } | InitialCondition::PerturbedCompacton { .. }), Model::Dkdv) => true,
        (Initial::Standard(InitialCondition::Periodic { .. }), Model::Dnls) => true,
        (Initial::Standard(InitialCondition::GaussianDrift { .. }) | Initial::Cosine, Model::Hydro) => true,
        (Initial::Bump { .. }, Model::Linear) => true,
        _ => false,
    };
    if !fits {
        return Err(CliError::input(format!("initial condition '{kind}' does not apply to the {model:?} model")));
    }
    Ok(ic)
}

fn default_ic(model: Model) -> &'static str {
    match model {
        Model::Dkdv => "compacton:B=0,c=1",
        Model::Dnls => "periodic:B=-0.2,c=1",
        Model::Hydro => "gaussian+const",
        Model::Linear => "bump",
    }
}

fn initial_state(ic: &Initial, args: &EvolveArgs) -> Result<FieldState, CliError> {
    let (length, n) = match ic {
        Initial::Standard(InitialCondition::Periodic { p, b, c }) => {
            let period = build_periodic(&ModelParams::compacton(*p, *b, *c), 17)?.period;
            (args.length.unwrap_or(period), args.n.unwrap_or(256))
        }
        Initial::Standard(InitialCondition::GaussianDrift { .. }) => (args.length.unwrap_or(40.0), args.n.unwrap_or(512)),
        Initial::Cosine => (args.length.unwrap_or(4.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI), args.n.unwrap_or(256)),
        _ => (args.length.unwrap_or(40.0), args.n.unwrap_or(2048)),
    };
    let grid = PeriodicGrid::new(length, n)?;
    match ic {
        Initial::Standard(ic) => Ok(initial_condition(ic, &grid)?),
        Initial::Cosine => {
            let rho = grid.xs.iter().map(|x| 1.0 + 0.5 * (std::f64::consts::SQRT_2 * x).cos()).collect();
            Ok(FieldState { field: Field::Hydro { rho, u: vec![0.0; n] }, grid, t: 0.0 })
        }
        Initial::Bump { .. } => Err(CliError::input("bump data belong to the linear model")),
    }
}

/// `prefix` + `suffix`, e.g. `out/run` + `_series.csv`.
fn artifact(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_snapshot(path: &Path, s: &FieldState) -> Result<(), CliError> {
    let xs = &s.grid.xs;
    match &s.field {
        Field::Real(u) => write_columns(path, &["x", "u"], &[xs, u])?,
        Field::Complex(v) => {
            let re: Vec<f64> = v.iter().map(|z| z.re).collect();
            let im: Vec<f64> = v.iter().map(|z| z.im).collect();
            write_columns(path, &["x", "re", "im"], &[xs, &re, &im])?
        }
        Field::Hydro { rho, u } => write_columns(path, &["x", "rho", "u"], &[xs, rho, u])?,
    }
    Ok(())
}

/// Snapshots, diagnostics series and, for a drifting Gaussian, the
/// correlation with the translated initial density.
fn write_run(prefix: &Path, state0: &FieldState, out: &RunOutput, artifacts: &mut Vec<PathBuf>) -> Result<Value, CliError> {
    for (k, s) in out.snapshots.iter().enumerate() {
        let path = artifact(prefix, &format!("_snap{k:03}.csv"));
        write_snapshot(&path, s)?;
        artifacts.push(path);
    }
    let rows: Vec<_> = out.diagnostics.rows().collect();
    let col = |f: fn(&compacton::evolution::DiagnosticsRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    let series = artifact(prefix, "_series.csv");
    write_columns(
        &series,
        &["t", "mass", "hamiltonian", "momentum"],
        &[&col(|r| r.t), &col(|r| r.mass), &col(|r| r.hamiltonian), &col(|r| r.momentum)],
    )?;
    artifacts.push(series);

    let mut transport = Value::Null;
    if let Field::Hydro { rho: rho0, u } = &state0.field {
        if u.iter().any(|&v| v != 0.0) {
            let mut cols = [Vec::new(), Vec::new(), Vec::new()];
            for s in &out.snapshots {
                if let Field::Hydro { rho, .. } = &s.field {
                    let (corr, shift) = translated_correlation(rho0, rho, &state0.grid)?;
                    cols[0].push(s.t);
                    cols[1].push(corr);
                    cols[2].push(shift);
                }
            }
            let path = artifact(prefix, "_transport.csv");
            write_columns(&path, &["t", "correlation", "shift"], &[&cols[0], &cols[1], &cols[2]])?;
            artifacts.push(path);
            transport = json!({ "final_correlation": cols[1].last(), "final_shift": cols[2].last() });
        }
    }
    let (mass_drift, hamiltonian_drift) = out.diagnostics.relative_drifts();
    Ok(json!({
        "stats": out.stats,
        "rho_floor_incidents": out.stats.rho_floor_incidents,
        "relative_drift": { "mass": mass_drift, "hamiltonian": hamiltonian_drift },
        "transport": transport,
    }))
}

#[derive(Serialize)]
struct GridRecord {
    length: f64,
    n: usize,
    dx: f64,
}

fn nonlinear(args: &EvolveArgs, ic: &Initial, tol: (f64, f64), manifest: &mut RunManifest) -> Result<(), CliError> {
    let state0 = initial_state(ic, args)?;
    let g = &state0.grid;
    let mut cfg = RunConfig::uniform(args.t_end, args.samples);
    cfg.p = args.p;
    cfg.regularization = RegularizationConfig { nu: args.nu, dealias: args.dealias };
    cfg.integrator = IntegratorConfig { rtol: tol.0, atol: tol.1, ..Default::default() };
    let mut run = json!({
        "model": args.model,
        "grid": GridRecord { length: g.length, n: g.n, dx: g.dx },
        "nu": args.nu,
        "dealias": args.dealias,
        "rtol": tol.0,
        "atol": tol.1,
        "p": args.p,
        "sample_times": cfg.sample_times,
    });
    let result = run_model(&state0, &cfg);
    let (out, failure) = match result {
        Ok(out) => (out, None),
        Err(f) => {
            run["last_good_time"] = json!(f.last_good_time);
            let msg = format!("integration failed: {} (last good time {})", f.error, f.last_good_time);
            (f.partial, Some(CliError::runtime(msg)))
        }
    };
    let details = write_run(&args.out_prefix, &state0, &out, &mut manifest.artifacts)?;
    if let (Value::Object(run), Value::Object(details)) = (&mut run, details) {
        run.extend(details);
    }
    if failure.is_none() {
        let (dm, dh) = out.diagnostics.relative_drifts();
        println!("{}: mass drift {dm:e}, hamiltonian drift {dh:e}", args.out_prefix.display());
    }
    manifest.run = run;
    failure.map_or(Ok(()), Err)
}

/// Smooth bump `a·exp(−1/(1 − y²))` with random centre, width and amplitude.
fn random_bump(op: &LinearizedOperator, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xr = op.half_width;
    let center = rng.gen_range(-0.5..0.5) * xr;
    let width = rng.gen_range(0.25..0.45) * xr;
    let amp = rng.gen_range(0.5..2.0);
    op.xs
        .iter()
        .map(|&x| {
            let y = (x - center) / width;
            if y.abs() < 1.0 {
                amp * (-1.0 / (1.0 - y * y)).exp()
            } else {
                0.0
            }
        })
        .collect()
}

fn linear(args: &EvolveArgs, seed: u64, manifest: &mut RunManifest) -> Result<(), CliError> {
    let op = LinearizedOperator::new(args.case, args.n.unwrap_or(256))?;
    let v0 = op.constrain(&random_bump(&op, seed));
    let settings = LinearSettings { t_end: args.t_end, ..Default::default() };
    let run = evolve_linearized(&op, &v0, None, &settings)?;
    let d = &run.diagnostics;
    let path = artifact(&args.out_prefix, "_linear.csv");
    write_columns(
        &path,
        &["t", "energy", "energy_h", "flux_upsilon", "ortho_phi", "ortho_phix"],
        &[&d.t, &d.energy, &d.energy_h, &d.flux_upsilon, &d.ortho_phi, &d.ortho_phix],
    )?;
    manifest.artifacts.push(path);
    let path = artifact(&args.out_prefix, "_final.csv");
    write_columns(&path, &["x", "v0", "v"], &[&op.xs, &v0, &run.v])?;
    manifest.artifacts.push(path);
    let energy_increase = d.energy.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    println!("{}: largest energy increase per step {energy_increase:e}", args.out_prefix.display());
    manifest.run = json!({
        "model": args.model,
        "case": args.case,
        "cells": op.len(),
        "seed": seed,
        "steps": run.steps,
        "largest_energy_increase": energy_increase,
    });
    Ok(())
}

fn single(args: &EvolveArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if let Some(dir) = args.out_prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::runtime(format!("{}: {e}", dir.display())))?;
    }
    let mut manifest = RunManifest::new("evolve", args);
    let outcome = (|| {
        let rtol = tolerance(args.rtol, "COMPACTON_RTOL", DEFAULT_RTOL)?;
        let atol = tolerance(args.atol, "COMPACTON_ATOL", DEFAULT_ATOL)?;
        let ic = parse_ic(args.ic.as_deref().unwrap_or(default_ic(args.model)), args.model, args.p)?;
        match ic {
            Initial::Bump { seed } => linear(args, seed, &mut manifest),
            _ => nonlinear(args, &ic, (rtol, atol), &mut manifest),
        }
    })();
    let path = artifact(&args.out_prefix, "_manifest.json");
    if outcome.is_err() {
        manifest.artifacts.retain(|p| p.exists());
    }
    manifest.finish(started, &path, &outcome)?;
    outcome
}

fn sweep(args: &EvolveArgs, spec: &str) -> Result<(), CliError> {
    let (key, values) = spec.split_once('=').ok_or_else(|| CliError::input(format!("--sweep '{spec}' is not key=v1,v2,...")))?;
    let stem = args.out_prefix.file_name().map_or_else(|| "run".into(), |s| s.to_os_string());
    let mut runs = Vec::new();
    for v in values.split(',').map(str::trim).filter(|v| !v.is_empty()) {
        let mut a = args.clone();
        a.sweep = None;
        let num: f64 = v.parse().map_err(|_| CliError::input(format!("--sweep {key}: '{v}' is not a number")))?;
        match key {
            "nu" => a.nu = num,
            "rtol" => a.rtol = Some(num),
            "atol" => a.atol = Some(num),
            "T" => a.t_end = num,
            "n" if num >= 0.0 && num.fract() == 0.0 => a.n = Some(num as usize),
            "n" => return Err(CliError::input(format!("--sweep n: '{v}' is not a grid size"))),
            _ => return Err(CliError::input(format!("--sweep key must be nu, rtol, atol, n or T, got '{key}'"))),
        }
        let dir = artifact(&args.out_prefix, &format!(".sweep/{key}={v}"));
        a.out_prefix = dir.join(&stem);
        runs.push((v.to_string(), a));
    }
    if runs.is_empty() {
        return Err(CliError::input("--sweep lists no values"));
    }
    let results: Vec<Result<(), CliError>> = thread::scope(|s| {
        let handles: Vec<_> = runs.iter().map(|(_, a)| s.spawn(move || single(a))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(CliError::runtime("worker panicked")))).collect()
    });
    let summary: Vec<Value> = runs
        .iter()
        .zip(&results)
        .map(|((v, a), r)| {
            json!({
                "value": v,
                "manifest": artifact(&a.out_prefix, "_manifest.json"),
                "exit_status": r.as_ref().err().map_or(0, |e| e.code),
                "error": r.as_ref().err().map(|e| e.msg.clone()),
            })
        })
        .collect();
    compacton::io::write_json(&artifact(&args.out_prefix, "_sweep.json"), &json!({ "key": key, "runs": summary }))?;
    results.into_iter().filter_map(Result::err).max_by_key(|e| e.code).map_or(Ok(()), Err)
}

pub fn evolve(args: &EvolveArgs) -> Result<(), CliError> {
    match &args.sweep {
        Some(spec) => sweep(args, spec),
        None => single(args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_condition_strings() {
        assert_eq!(
            parse_ic("compacton:B=0,c=1", Model::Dkdv, 4.0).unwrap(),
            Initial::Standard(InitialCondition::Compacton { p: 4.0, b: 0.0, c: 1.0, x0: 0.0 })
        );
        assert_eq!(
            parse_ic("periodic:B=-0.2,c=1", Model::Dnls, 4.0).unwrap(),
            Initial::Standard(InitialCondition::Periodic { p: 4.0, b: -0.2, c: 1.0 })
        );
        assert!(matches!(parse_ic("gaussian+const", Model::Hydro, 4.0), Ok(Initial::Standard(_))));
        assert_eq!(parse_ic("bump:seed=3", Model::Linear, 4.0).unwrap(), Initial::Bump { seed: 3 });
        assert!(parse_ic("compacton:B=0", Model::Dkdv, 4.0).is_err());
        assert!(parse_ic("compacton:B=0,c=1,q=2", Model::Dkdv, 4.0).is_err());
        assert!(parse_ic("periodic:B=-0.2,c=1", Model::Dkdv, 4.0).is_err());
        assert!(parse_ic("bump:seed=0.5", Model::Linear, 4.0).is_err());
    }

    #[test]
    fn tolerance_precedence() {
        assert_eq!(tolerance(Some(1e-3), "COMPACTON_TEST_UNSET_VAR", 1e-6).unwrap(), 1e-3);
        assert_eq!(tolerance(None, "COMPACTON_TEST_UNSET_VAR", 1e-6).unwrap(), 1e-6);
    }
}
