//! Conserved functionals `M`, `H`, `P`, `K`, the energy and Pohozaev
//! identities, fixed-mass minimization over the compacton family, the
//! Weinstein functional and the escaping minimizing sequence.

mod escaping;
mod minimize;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{CompactonProfile, ModelParams, NlsProfile};
use crate::quadrature::simpson;
pub use escaping::{escaping_sequence, unit_bump, EscapingSequence, PolarSegment};
pub use minimize::{family_functionals, minimize_in_family, MinimizerResult};

/// `∫ u²` by composite Simpson.
pub fn mass(u: &[f64], dx: f64) -> Result<f64> {
    let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    simpson(&sq, dx)
}

/// `∫ |v|²` for a complex field given by its parts.
pub fn mass_complex(re: &[f64], im: &[f64], dx: f64) -> Result<f64> {
    let sq: Vec<f64> = re.iter().zip(im).map(|(a, b)| a * a + b * b).collect();
    simpson(&sq, dx)
}

/// `½∫(u u_x)² − (1/p)∫|u|^p`, with `flux = u u_x` supplied by the caller.
pub fn hamiltonian(u: &[f64], flux: &[f64], dx: f64, p: f64) -> Result<f64> {
    if flux.len() != u.len() {
        return Err(Error::Grid(format!("{} flux samples for {} field samples", flux.len(), u.len())));
    }
    let dens: Vec<f64> = u.iter().zip(flux).map(|(v, f)| 0.5 * f * f - v.abs().powf(p) / p).collect();
    simpson(&dens, dx)
}

/// `u u_x = ½(u²)_x` by fourth-order centred differences, one-sided at the ends.
pub fn half_square_derivative(u: &[f64], dx: f64) -> Vec<f64> {
    let sq: Vec<f64> = u.iter().map(|v| 0.5 * v * v).collect();
    derivative(&sq, dx)
}

pub(crate) fn derivative(f: &[f64], dx: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 5 {
        for i in 0..n {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n - 1));
            if b > a {
                out[i] = (f[b] - f[a]) / ((b - a) as f64 * dx);
            }
        }
        return out;
    }
    for i in 2..n - 2 {
        out[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dx);
    }
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * dx);
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * dx);
    out[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) / (12.0 * dx);
    out[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) / (12.0 * dx);
    out
}

/// `P(u) = ∫ u`.
pub fn momentum_p(u: &[f64], dx: f64) -> Result<f64> {
    simpson(u, dx)
}

/// `K(v) = Im ∫ v̄ v_x` with second-order centred differences for `v_x`.
pub fn momentum_k(re: &[f64], im: &[f64], dx: f64) -> Result<f64> {
    let n = re.len();
    if im.len() != n {
        return Err(Error::Grid("real and imaginary parts differ in length".into()));
    }
    let d = |f: &[f64], i: usize| -> f64 {
        if i == 0 {
            (f[1] - f[0]) / dx
        } else if i == n - 1 {
            (f[n - 1] - f[n - 2]) / dx
        } else {
            (f[i + 1] - f[i - 1]) / (2.0 * dx)
        }
    };
    if n < 3 {
        return Err(Error::Grid(format!("Simpson quadrature needs at least 3 samples, got {n}")));
    }
    let dens: Vec<f64> = (0..n).map(|i| re[i] * d(im, i) - im[i] * d(re, i)).collect();
    simpson(&dens, dx)
}

/// `K(Q)` from the polar identity `∫Φ² vθ'`, where `Φ²θ' = −½`.
pub fn momentum_k_nls(q: &NlsProfile) -> Result<f64> {
    let dens = vec![-0.5 * q.v; q.base.len()];
    simpson(&dens, q.base.dx())
}

/// `H(Q) = ½∫|QQ'|² − (1/p)∫|Q|^p` with `|QQ'|² = (ΦΦ')² + v²(Φ²θ')²`.
pub fn hamiltonian_nls(q: &NlsProfile) -> Result<f64> {
    let b = &q.base;
    let p = b.params.p;
    let dens: Vec<f64> = b
        .phi
        .iter()
        .zip(&b.flux)
        .map(|(f, fl)| 0.5 * (fl * fl + 0.25 * q.v * q.v) - f.powf(p) / p)
        .collect();
    simpson(&dens, b.dx())
}

/// Residuals of the integral identities satisfied by an `A = 0` compacton.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    /// `c∫Φ² + 2∫(ΦΦ')² − ∫Φ^p`.
    pub energy: f64,
    /// `−c∫Φ² + ∫(ΦΦ')² + (2/p)∫Φ^p − 4B x_r`.
    pub pohozaev: f64,
    /// `H − [c(p−8)/(2p+8) M + (p−4)/(p+4) 2B x_r]`.
    pub combined: f64,
    /// Magnitude used to make the residuals relative.
    pub scale: f64,
}

/// The conserved quantities of one profile.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub mass: f64,
    pub hamiltonian: f64,
    pub momentum_P: f64,
    pub momentum_K: f64,
    pub pohozaev_residual: f64,
    pub energy_identity_residual: f64,
}

struct Integrals {
    mass: f64,
    flux2: f64,
    power: f64,
    first: f64,
}

fn integrals(p: f64, phi: &[f64], flux: &[f64], dx: f64) -> Result<Integrals> {
    let sq: Vec<f64> = phi.iter().map(|v| v * v).collect();
    let f2: Vec<f64> = flux.iter().map(|v| v * v).collect();
    let pw: Vec<f64> = phi.iter().map(|v| v.abs().powf(p)).collect();
    Ok(Integrals { mass: simpson(&sq, dx)?, flux2: simpson(&f2, dx)?, power: simpson(&pw, dx)?, first: simpson(phi, dx)? })
}

fn identities(params: &ModelParams, half_width: f64, it: &Integrals) -> IdentityResiduals {
    let ModelParams { p, b, c, .. } = *params;
    let h = 0.5 * it.flux2 - it.power / p;
    let energy = c * it.mass + 2.0 * it.flux2 - it.power;
    let pohozaev = -c * it.mass + it.flux2 + 2.0 / p * it.power - 4.0 * b * half_width;
    let predicted = c * (p - 8.0) / (2.0 * p + 8.0) * it.mass + (p - 4.0) / (p + 4.0) * 2.0 * b * half_width;
    let scale = (c.abs() * it.mass).max(it.flux2).max(it.power).max(h.abs());
    IdentityResiduals { energy, pohozaev, combined: h - predicted, scale }
}

/// Energy and Pohozaev residuals of a sampled compacton.
pub fn pohozaev_residual(profile: &CompactonProfile) -> Result<IdentityResiduals> {
    let it = integrals(profile.params.p, &profile.phi, &profile.flux, profile.dx())?;
    Ok(identities(&profile.params, profile.half_width, &it))
}

/// `ΦΦ' = −sign(x)√G(Φ)` recovered from the samples and the first integral.
pub fn flux_from_first_integral(params: &ModelParams, xs: &[f64], phi: &[f64]) -> Vec<f64> {
    let poly = params.poly();
    xs.iter()
        .zip(phi)
        .map(|(&x, &f)| if x == 0.0 { 0.0 } else { -x.signum() * poly.g(f).max(0.0).sqrt() })
        .collect()
}

/// Report for a compacton given only its parameters, grid and values. The
/// flux comes from the first integral, so a profile read back from CSV gives
/// the same report as the in-memory one.
pub fn report_from_samples(params: &ModelParams, half_width: f64, xs: &[f64], phi: &[f64]) -> Result<FunctionalReport> {
    if xs.len() < 3 || phi.len() != xs.len() {
        return Err(Error::Grid(format!("need matching grids with at least 3 samples, got {} and {}", xs.len(), phi.len())));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    let flux = flux_from_first_integral(params, xs, phi);
    let it = integrals(params.p, phi, &flux, dx)?;
    let id = identities(params, half_width, &it);
    Ok(FunctionalReport {
        mass: it.mass,
        hamiltonian: 0.5 * it.flux2 - it.power / params.p,
        momentum_P: it.first,
        momentum_K: 0.0,
        pohozaev_residual: id.combined,
        energy_identity_residual: id.energy,
    })
}

pub fn report(profile: &CompactonProfile) -> Result<FunctionalReport> {
    report_from_samples(&profile.params, profile.half_width, &profile.xs, &profile.phi)
}

/// `∫|u|^p / (‖u‖₂^α ‖u u_x‖₂^β)` with `α = (p+4)/3`, `β = (p−2)/3`.
pub fn weinstein(u: &[f64], flux: &[f64], dx: f64, p: f64) -> Result<f64> {
    if p <= 2.0 {
        return Err(Error::InvalidParams(format!("Weinstein functional needs p > 2, got {p}")));
    }
    let pw: Vec<f64> = u.iter().map(|v| v.abs().powf(p)).collect();
    let num = simpson(&pw, dx)?;
    let m = mass(u, dx)?;
    let f2: Vec<f64> = flux.iter().map(|v| v * v).collect();
    let d = simpson(&f2, dx)?;
    if m == 0.0 || d == 0.0 {
        return Err(Error::InvalidParams("Weinstein functional of a zero field".into()));
    }
    let (alpha, beta) = ((p + 4.0) / 3.0, (p - 2.0) / 3.0);
    Ok(num / (m.sqrt().powf(alpha) * d.sqrt().powf(beta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarFunctionals {
    pub mass: f64,
    pub momentum_k: f64,
    pub hamiltonian: f64,
}

/// `M = ∫ρ`, `K = ∫ρθ_x`, `H = ⅛∫ρ_x² + ½∫ρ²θ_x² − (1/p)∫ρ^{p/2}`.
///
/// `rho_x` is differenced from `rho` when absent. Where `ρ = 0` and `θ_x` is
/// not finite, `ρθ_x` is extended linearly from the neighbouring samples.
pub fn polar_functionals(rho: &[f64], theta_x: &[f64], rho_x: Option<&[f64]>, dx: f64, p: f64) -> Result<PolarFunctionals> {
    let n = rho.len();
    if theta_x.len() != n || rho_x.is_some_and(|r| r.len() != n) {
        return Err(Error::Grid("polar fields differ in length".into()));
    }
    if let Some(i) = rho.iter().position(|&r| r < 0.0) {
        return Err(Error::InvalidParams(format!("negative density {} at sample {i}", rho[i])));
    }
    let mut j: Vec<f64> = rho.iter().zip(theta_x).map(|(r, t)| if *r == 0.0 && !t.is_finite() { f64::NAN } else { r * t }).collect();
    for i in 0..n {
        if j[i].is_nan() {
            let (a, b) = if i + 2 < n && !j[i + 1].is_nan() && !j[i + 2].is_nan() {
                (j[i + 1], j[i + 2])
            } else if i >= 2 && !j[i - 1].is_nan() && !j[i - 2].is_nan() {
                (j[i - 1], j[i - 2])
            } else {
                (0.0, 0.0)
            };
            j[i] = 2.0 * a - b;
        }
    }
    let owned;
    let rx = match rho_x {
        Some(r) => r,
        None => {
            owned = derivative(rho, dx);
            &owned
        }
    };
    polar_from_current(rho, rx, &j, dx, p)
}

/// Same as [`polar_functionals`] with the current `j = ρθ_x` given directly.
pub fn polar_from_current(rho: &[f64], rho_x: &[f64], j: &[f64], dx: f64, p: f64) -> Result<PolarFunctionals> {
    let dens: Vec<f64> = (0..rho.len())
        .map(|i| 0.125 * rho_x[i] * rho_x[i] + 0.5 * j[i] * j[i] - rho[i].max(0.0).powf(p / 2.0) / p)
        .collect();
    Ok(PolarFunctionals { mass: simpson(rho, dx)?, momentum_k: simpson(j, dx)?, hamiltonian: simpson(&dens, dx)? })
}
