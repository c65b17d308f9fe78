use std::path::Path;
use std::time::Instant;

use compacton::functionals::{hamiltonian_nls, minimize_in_family, momentum_k_nls, report, report_from_samples, FunctionalReport};
use compacton::io::{self, ProfileManifest};
use compacton::profiles::{build_compacton, build_nls_compacton, build_periodic, classify, compacton_violation, ModelParams, SolutionTag};
use compacton::spectral::{b_transform, eig_b, eig_green, CaseTag};

use crate::error::CliError;
use crate::manifest::{emit, manifest_for, RunManifest};
use crate::{FunctionalsArgs, Method, MinimizeArgs, ProfileArgs, SpectrumArgs};

fn invalid(params: &ModelParams, e: compacton::Error) -> CliError {
    CliError::input(compacton_violation(params).unwrap_or_else(|| e.to_string()))
}

pub fn profile(args: &ProfileArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let params = ModelParams::new(args.p, args.a, args.b, args.c);
    let class = classify(&params).map_err(|e| invalid(&params, e))?;
    println!("classification: {:?}", class.tag);
    if let Some(edge) = class.edge_case {
        println!("edge_case: {edge:?}");
    }
    let written = match class.tag {
        SolutionTag::Compacton => {
            let base = build_compacton(&params, args.n).map_err(|e| invalid(&params, e))?;
            println!("half_width: {}", base.half_width);
            match (args.v, &args.out) {
                (Some(v), Some(out)) => Some((out, io::write_nls_profile(out, &build_nls_compacton(&params, v, args.n)?)?)),
                (None, Some(out)) => Some((out, io::write_profile(out, &base)?)),
                _ => None,
            }
        }
        SolutionTag::Periodic => {
            if args.v.is_some() {
                return Err(CliError::input("--v applies to compactons only"));
            }
            let prof = build_periodic(&params, args.n)?;
            println!("period: {}", prof.period);
            match &args.out {
                Some(out) => Some((out, io::write_periodic(out, &prof)?)),
                None => None,
            }
        }
        SolutionTag::Front => {
            if args.out.is_some() {
                return Err(CliError::input("front profiles cannot be sampled on a bounded grid"));
            }
            None
        }
    };
    if let Some((csv, sidecar)) = written {
        let mut m = RunManifest::new("profile", args);
        m.artifacts = vec![csv.clone(), sidecar];
        m.finish(started, &manifest_for(csv), &Ok(()))?;
        println!("artifact: {}", csv.display());
    }
    Ok(())
}

fn report_from_file(path: &Path) -> Result<FunctionalReport, CliError> {
    let meta_path = io::manifest_path(path);
    let meta: ProfileManifest = io::read_json(&meta_path).map_err(|e| CliError::input(format!("{}: {e}", meta_path.display())))?;
    if meta.v.is_some() {
        return Err(CliError::input("NLS profile files are not read back; pass --B, --c and --v instead"));
    }
    let half_width = meta.half_width.ok_or_else(|| CliError::input("functionals need a compacton profile, found a periodic one"))?;
    let samples = io::read_profile(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    Ok(report_from_samples(&meta.params(), half_width, &samples.xs, &samples.phi)?)
}

pub fn functionals(args: &FunctionalsArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let rep = match &args.input {
        Some(path) => report_from_file(path)?,
        None => {
            let (b, c) = (args.b.unwrap_or_default(), args.c.unwrap_or_default());
            let params = ModelParams::compacton(args.p, b, c);
            let base = build_compacton(&params, args.n).map_err(|e| invalid(&params, e))?;
            let mut rep = report(&base)?;
            if let Some(v) = args.v {
                let q = build_nls_compacton(&params, v, args.n)?;
                rep.hamiltonian = hamiltonian_nls(&q)?;
                rep.momentum_K = momentum_k_nls(&q)?;
            }
            rep
        }
    };
    emit("functionals", args, &rep, args.out.as_deref(), started)
}

pub fn minimize(args: &MinimizeArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let res = minimize_in_family(args.p, args.mass)?;
    emit("minimize", args, &res, args.out.as_deref(), started)
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let spec = match args.method {
        Method::B => {
            if args.case != CaseTag::B0c1 {
                return Err(CliError::input(format!("the b-transform is available for B0c1 only, not {}", args.case)));
            }
            eig_b(&b_transform(args.case, args.t_max, args.n.unwrap_or(4096))?, args.k)?
        }
        Method::Green => eig_green(args.case, args.n.unwrap_or(800), args.k)?,
    };
    emit("spectrum", args, &spec, args.out.as_deref(), started)
}
