//! Nonlinear evolution of the degenerate KdV equation (regularized
//! pseudospectral), the degenerate NLS equation (centred differences) and
//! its hydrodynamic form, with conservation diagnostics.

mod fourier;
mod integrator;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{hamiltonian, mass, mass_complex, momentum_p, polar_functionals};
use crate::profiles::{build_periodic, CompactonShape, ModelParams};
use fourier::Fourier;
pub use integrator::{integrate, IntegrationFailure, IntegratorConfig, JacobianMode, OdeSystem, Trajectory};

/// Uniform periodic grid `x_j = −L/2 + j·dx`, `j = 0, …, n − 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicGrid {
    pub length: f64,
    pub n: usize,
    pub dx: f64,
    #[serde(skip)]
    pub xs: Vec<f64>,
    /// FFT-ordered wavenumbers `2πj/L`.
    #[serde(skip)]
    pub wavenumbers: Vec<f64>,
}

impl PeriodicGrid {
    pub fn new(length: f64, n: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Grid(format!("periodic length must be positive, got {length}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("sample count must be a power of two ≥ 8, got {n}")));
        }
        let dx = length / n as f64;
        let xs = (0..n).map(|j| -0.5 * length + j as f64 * dx).collect();
        let base = 2.0 * std::f64::consts::PI / length;
        let wavenumbers = (0..n).map(|j| if j <= n / 2 { j as f64 } else { j as f64 - n as f64 } * base).collect();
        Ok(Self { length, n, dx, xs, wavenumbers })
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::Grid(format!("{len} samples on a {}-point grid", self.n)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Real(Vec<f64>),
    Complex(Vec<Complex64>),
    Hydro { rho: Vec<f64>, u: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: PeriodicGrid,
    pub t: f64,
    pub field: Field,
}

impl FieldState {
    fn flatten(&self) -> Vec<f64> {
        match &self.field {
            Field::Real(u) => u.clone(),
            Field::Complex(v) => v.iter().map(|c| c.re).chain(v.iter().map(|c| c.im)).collect(),
            Field::Hydro { rho, u } => rho.iter().chain(u).copied().collect(),
        }
    }

    fn unflatten(&self, t: f64, y: &[f64]) -> Self {
        let n = self.grid.n;
        let field = match &self.field {
            Field::Real(_) => Field::Real(y.to_vec()),
            Field::Complex(_) => Field::Complex((0..n).map(|j| Complex64::new(y[j], y[n + j])).collect()),
            Field::Hydro { .. } => Field::Hydro { rho: y[..n].to_vec(), u: y[n..].to_vec() },
        };
        Self { grid: self.grid.clone(), t, field }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizationConfig {
    pub nu: f64,
    /// Zero the modes above two thirds of the Nyquist wavenumber.
    pub dealias: bool,
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        Self { nu: 1e-4, dealias: false }
    }
}

fn check_nu(nu: f64) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidParams(format!("regularization must be nonnegative, got {nu}")));
    }
    Ok(())
}

/// Spectral derivative with symbol `ik/(1 + νk⁴)`.
pub fn regularized_derivative(u: &[f64], grid: &PeriodicGrid, nu: f64) -> Result<Vec<f64>> {
    grid.check(u.len())?;
    check_nu(nu)?;
    Ok(Fourier::new(grid, nu, false).d(u))
}

fn signed_power(u: f64, e: f64) -> f64 {
    if e == 2.0 {
        u * u
    } else if e == 3.0 {
        u * u * u
    } else {
        u.signum() * u.abs().powf(e)
    }
}

fn dkdv_apply(fr: &Fourier, u: &[f64], p: f64) -> Vec<f64> {
    let w: Vec<f64> = u.iter().zip(fr.d(u)).map(|(a, b)| a * b).collect();
    let w = fr.d(&w);
    let w: Vec<f64> = u.iter().zip(w).map(|(a, b)| a * b + signed_power(*a, p - 1.0)).collect();
    fr.d(&w).into_iter().map(|v| -v).collect()
}

/// `−D_ν(u D_ν(u D_ν u) + u^{p−1})`.
pub fn dkdv_rhs(u: &[f64], grid: &PeriodicGrid, p: f64, nu: f64) -> Result<Vec<f64>> {
    grid.check(u.len())?;
    check_nu(nu)?;
    Ok(dkdv_apply(&Fourier::new(grid, nu, false), u, p))
}

fn dnls_apply(v: &[Complex64], dx: f64, p: f64) -> Vec<Complex64> {
    let n = v.len();
    let sq: Vec<Complex64> = v.iter().map(|z| z * z).collect();
    let h2 = 2.0 * dx * dx;
    (0..n)
        .map(|j| {
            // (v v_x)_x = ½(v²)_xx.
            let lap = (sq[(j + 1) % n] - 2.0 * sq[j] + sq[(j + n - 1) % n]) / h2;
            let m = v[j].norm();
            let pow = if p == 4.0 { m * m } else { m.powf(p - 2.0) };
            Complex64::i() * (v[j] * pow + v[j].conj() * lap)
        })
        .collect()
}

/// `i(|v|^{p−2}v + v̄(v v_x)_x)` with periodic centred differences.
pub fn dnls_rhs(v: &[Complex64], grid: &PeriodicGrid, p: f64) -> Result<Vec<Complex64>> {
    grid.check(v.len())?;
    Ok(dnls_apply(v, grid.dx, p))
}

fn hydro_apply(fr: &Fourier, rho: &[f64], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let flux: Vec<f64> = rho.iter().zip(u).map(|(a, b)| a * b).collect();
    let drho = fr.d(&flux).into_iter().map(|v| -v).collect();
    let du = fr.d(u);
    let disp = fr.apply(rho, |m| m * m * m + 2.0 * m);
    let dvel = (0..u.len()).map(|j| -3.0 * u[j] * du[j] + rho[j] * disp[j]).collect();
    (drho, dvel)
}

/// `(−D_ν(ρu), −3u D_ν u + ρ(D_ν³ρ + 2D_νρ))`.
pub fn hydro_rhs(rho: &[f64], u: &[f64], grid: &PeriodicGrid, nu: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    grid.check(rho.len())?;
    grid.check(u.len())?;
    check_nu(nu)?;
    if let Some(j) = rho.iter().position(|&r| r < 0.0) {
        return Err(Error::InvalidParams(format!("negative density {} at sample {j}", rho[j])));
    }
    Ok(hydro_apply(&Fourier::new(grid, nu, false), rho, u))
}

struct Dkdv {
    fr: Fourier,
    p: f64,
    n: usize,
}

impl OdeSystem for Dkdv {
    fn dim(&self) -> usize {
        self.n
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        dy.copy_from_slice(&dkdv_apply(&self.fr, y, self.p));
    }
    fn jacobian_mode(&self) -> JacobianMode {
        JacobianMode::MatrixFree
    }
}

struct Dnls {
    dx: f64,
    p: f64,
    n: usize,
}

impl OdeSystem for Dnls {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let v: Vec<Complex64> = (0..n).map(|j| Complex64::new(y[j], y[n + j])).collect();
        for (j, r) in dnls_apply(&v, self.dx, self.p).into_iter().enumerate() {
            dy[j] = r.re;
            dy[n + j] = r.im;
        }
    }
    fn jacobian_mode(&self) -> JacobianMode {
        JacobianMode::Banded { blocks: 2, bandwidth: 1 }
    }
}

struct Hydro {
    fr: Fourier,
    n: usize,
}

impl OdeSystem for Hydro {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) {
        let (a, b) = hydro_apply(&self.fr, &y[..self.n], &y[self.n..]);
        dy[..self.n].copy_from_slice(&a);
        dy[self.n..].copy_from_slice(&b);
    }
    fn jacobian_mode(&self) -> JacobianMode {
        JacobianMode::MatrixFree
    }
    fn enforce(&self, y: &mut [f64]) -> usize {
        let mut count = 0;
        for r in &mut y[..self.n] {
            if *r < 0.0 {
                *r = 0.0;
                count += 1;
            }
        }
        count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// The compacton `Φ_{B,c}` centred at `x0`, zero outside its support.
    Compacton { p: f64, b: f64, c: f64, x0: f64 },
    /// `φ_{0,1}(y)(1 + 0.01 y² φ_{0,1}³(y))`, `y = x − x0`.
    PerturbedCompacton { x0: f64 },
    /// One period of the `A = 0` periodic profile, as a complex field; the
    /// grid length must equal the period.
    Periodic { p: f64, b: f64, c: f64 },
    /// `ρ = a·exp(−(x − x0)²/(2σ²))` and constant velocity.
    GaussianDrift { amplitude: f64, width: f64, center: f64, velocity: f64 },
}

fn compacton_samples(shape: &CompactonShape, grid: &PeriodicGrid, x0: f64) -> Result<Vec<f64>> {
    let xr = shape.half_width();
    let half = 0.5 * grid.length;
    if x0 - xr < -half || x0 + xr >= half {
        return Err(Error::Grid(format!("support [{}, {}] leaves the box [{}, {})", x0 - xr, x0 + xr, -half, half)));
    }
    Ok(grid.xs.iter().map(|&x| shape.value(x - x0)).collect())
}

pub fn initial_condition(ic: &InitialCondition, grid: &PeriodicGrid) -> Result<FieldState> {
    let field = match *ic {
        InitialCondition::Compacton { p, b, c, x0 } => {
            let shape = CompactonShape::new(&ModelParams::compacton(p, b, c))?;
            Field::Real(compacton_samples(&shape, grid, x0)?)
        }
        InitialCondition::PerturbedCompacton { x0 } => {
            let shape = CompactonShape::new(&ModelParams::compacton(4.0, 0.0, 1.0))?;
            let base = compacton_samples(&shape, grid, x0)?;
            Field::Real(
                grid.xs.iter().zip(base).map(|(&x, f)| f * (1.0 + 0.01 * (x - x0).powi(2) * f.powi(3))).collect(),
            )
        }
        InitialCondition::Periodic { p, b, c } => {
            let prof = build_periodic(&ModelParams::compacton(p, b, c), grid.n + 1)?;
            if (prof.period - grid.length).abs() > 1e-9 * prof.period {
                return Err(Error::Grid(format!("box length {} differs from the period {}", grid.length, prof.period)));
            }
            Field::Complex(prof.phi[..grid.n].iter().map(|&v| Complex64::new(v, 0.0)).collect())
        }
        InitialCondition::GaussianDrift { amplitude, width, center, velocity } => {
            if !(amplitude >= 0.0 && width > 0.0) {
                return Err(Error::InvalidParams(format!("need amplitude ≥ 0 and width > 0, got {amplitude}, {width}")));
            }
            let rho = grid.xs.iter().map(|&x| amplitude * (-(x - center).powi(2) / (2.0 * width * width)).exp()).collect();
            Field::Hydro { rho, u: vec![velocity; grid.n] }
        }
    };
    Ok(FieldState { grid: grid.clone(), t: 0.0, field })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub hamiltonian: f64,
    /// `P = ∫u` for the real model, `K` for the complex and hydrodynamic ones.
    pub momentum: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub hamiltonian: Vec<f64>,
    pub momentum: Vec<f64>,
}

impl DiagnosticsSeries {
    pub fn push(&mut self, row: DiagnosticsRow) {
        self.times.push(row.t);
        self.mass.push(row.mass);
        self.hamiltonian.push(row.hamiltonian);
        self.momentum.push(row.momentum);
    }

    pub fn rows(&self) -> impl Iterator<Item = DiagnosticsRow> + '_ {
        (0..self.times.len()).map(|i| DiagnosticsRow {
            t: self.times[i],
            mass: self.mass[i],
            hamiltonian: self.hamiltonian[i],
            momentum: self.momentum[i],
        })
    }

    /// `max_t |Q(t) − Q(0)| / |Q(0)|` for mass and Hamiltonian.
    pub fn relative_drifts(&self) -> (f64, f64) {
        let drift = |q: &[f64]| {
            let q0 = q.first().copied().unwrap_or(0.0);
            q.iter().map(|v| (v - q0).abs()).fold(0.0, f64::max) / q0.abs().max(f64::MIN_POSITIVE)
        };
        (drift(&self.mass), drift(&self.hamiltonian))
    }
}

/// Samples closed by repeating the first one, for quadratures on `[−L/2, L/2]`.
fn closed(v: &[f64]) -> Vec<f64> {
    let mut out = v.to_vec();
    out.push(v[0]);
    out
}

/// Densities below `1e−8·max ρ` are treated as vacuum when recovering `θ_x`.
pub const VACUUM_THRESHOLD: f64 = 1e-8;

/// `M`, `H` and `P` or `K` of a state. Derivatives are the run's regularized
/// `D_ν` for the real and hydrodynamic fields and centred for the complex one,
/// so `H` is the quantity the discrete flow conserves.
pub fn diagnostics(state: &FieldState, p: f64, nu: f64) -> Result<DiagnosticsRow> {
    check_nu(nu)?;
    let g = &state.grid;
    let dx = g.dx;
    let (m, h, k) = match &state.field {
        Field::Real(u) => {
            g.check(u.len())?;
            let fr = Fourier::new(g, nu, false);
            let flux: Vec<f64> = u.iter().zip(fr.d(u)).map(|(a, b)| a * b).collect();
            (mass(&closed(u), dx)?, hamiltonian(&closed(u), &closed(&flux), dx, p)?, momentum_p(&closed(u), dx)?)
        }
        Field::Complex(v) => {
            g.check(v.len())?;
            let n = v.len();
            let vx: Vec<Complex64> = (0..n).map(|j| (v[(j + 1) % n] - v[(j + n - 1) % n]) / (2.0 * dx)).collect();
            let modulus: Vec<f64> = v.iter().map(|z| z.norm()).collect();
            let flux: Vec<f64> = v.iter().zip(&vx).map(|(a, b)| (a * b).norm()).collect();
            let current: Vec<f64> = v.iter().zip(&vx).map(|(a, b)| (a.conj() * b).im).collect();
            let re: Vec<f64> = v.iter().map(|z| z.re).collect();
            let im: Vec<f64> = v.iter().map(|z| z.im).collect();
            (
                mass_complex(&closed(&re), &closed(&im), dx)?,
                hamiltonian(&closed(&modulus), &closed(&flux), dx, p)?,
                momentum_p(&closed(&current), dx)?,
            )
        }
        Field::Hydro { rho, u } => {
            g.check(rho.len())?;
            g.check(u.len())?;
            let fr = Fourier::new(g, nu, false);
            let rho_x = fr.d(rho);
            let floor = VACUUM_THRESHOLD * rho.iter().fold(0.0f64, |a, &b| a.max(b));
            let rho: Vec<f64> = rho.iter().map(|&r| r.max(0.0)).collect();
            let theta_x: Vec<f64> = rho.iter().zip(u).map(|(&r, &v)| if r > floor { v / (2.0 * r) } else { 0.0 }).collect();
            let pf = polar_functionals(&closed(&rho), &closed(&theta_x), Some(&closed(&rho_x)), dx, p)?;
            (pf.mass, pf.hamiltonian, pf.momentum_k)
        }
    };
    Ok(DiagnosticsRow { t: state.t, mass: m, hamiltonian: h, momentum: k })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub p: f64,
    pub regularization: RegularizationConfig,
    pub integrator: IntegratorConfig,
    /// Increasing output times, starting at or after the initial time.
    pub sample_times: Vec<f64>,
}

impl RunConfig {
    /// Samples at `0, t_end/count, …, t_end`.
    pub fn uniform(t_end: f64, count: usize) -> Self {
        let count = count.max(1);
        Self {
            p: 4.0,
            regularization: RegularizationConfig::default(),
            integrator: IntegratorConfig::default(),
            sample_times: (0..=count).map(|i| t_end * i as f64 / count as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunStats {
    pub steps: usize,
    pub rejected: usize,
    pub jacobians: usize,
    pub rhs_evals: usize,
    pub rho_floor_incidents: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<FieldState>,
    pub diagnostics: DiagnosticsSeries,
    pub stats: RunStats,
}

#[derive(Debug, Clone)]
pub struct RunFailure {
    pub error: Error,
    pub partial: RunOutput,
    pub last_good_time: f64,
}

fn collect(state0: &FieldState, traj: &Trajectory, p: f64, nu: f64) -> Result<RunOutput> {
    let snapshots: Vec<FieldState> = traj.times.iter().zip(&traj.states).map(|(&t, y)| state0.unflatten(t, y)).collect();
    let mut diagnostics = DiagnosticsSeries::default();
    for s in &snapshots {
        diagnostics.push(self::diagnostics(s, p, nu)?);
    }
    let stats = RunStats {
        steps: traj.steps,
        rejected: traj.rejected,
        jacobians: traj.jacobians,
        rhs_evals: traj.rhs_evals,
        rho_floor_incidents: traj.enforced,
    };
    Ok(RunOutput { snapshots, diagnostics, stats })
}

/// Evolve `state0` with the model matching its field kind: dKdV for a real
/// field, dNLS for a complex one, the hydrodynamic system for a pair.
pub fn evolve(state0: &FieldState, cfg: &RunConfig) -> std::result::Result<RunOutput, Box<RunFailure>> {
    let early = |error: Error| {
        let partial = RunOutput {
            snapshots: vec![],
            diagnostics: DiagnosticsSeries::default(),
            stats: RunStats { steps: 0, rejected: 0, jacobians: 0, rhs_evals: 0, rho_floor_incidents: 0 },
        };
        Box::new(RunFailure { error, partial, last_good_time: state0.t })
    };
    let grid = &state0.grid;
    let reg = cfg.regularization;
    check_nu(reg.nu).map_err(early)?;
    if !(cfg.p > 2.0) {
        return Err(early(Error::InvalidParams(format!("need p > 2, got {}", cfg.p))));
    }
    let y0 = state0.flatten();
    if y0.len() != grid.n * if matches!(state0.field, Field::Real(_)) { 1 } else { 2 } {
        return Err(early(Error::Grid("field length does not match the grid".into())));
    }
    let result = match &state0.field {
        Field::Real(_) => {
            integrate(&Dkdv { fr: Fourier::new(grid, reg.nu, reg.dealias), p: cfg.p, n: grid.n }, &y0, state0.t, &cfg.sample_times, &cfg.integrator)
        }
        Field::Complex(_) => integrate(&Dnls { dx: grid.dx, p: cfg.p, n: grid.n }, &y0, state0.t, &cfg.sample_times, &cfg.integrator),
        Field::Hydro { rho, .. } => {
            if rho.iter().any(|&r| r < 0.0) {
                return Err(early(Error::InvalidParams("initial density is negative somewhere".into())));
            }
            integrate(&Hydro { fr: Fourier::new(grid, reg.nu, reg.dealias), n: grid.n }, &y0, state0.t, &cfg.sample_times, &cfg.integrator)
        }
    };
    match result {
        Ok(traj) => collect(state0, &traj, cfg.p, reg.nu).map_err(early),
        Err(f) => {
            let partial = collect(state0, &f.partial, cfg.p, reg.nu).map_err(early)?;
            Err(Box::new(RunFailure { error: f.error, partial, last_good_time: f.last_t }))
        }
    }
}

/// Vertex of the least-squares parabola through the samples within the top
/// quarter of the maximum, which averages out small ripples on the crest.
pub fn peak_location(u: &[f64], grid: &PeriodicGrid) -> f64 {
    let n = u.len();
    let j = (0..n).fold(0, |b, i| if u[i] > u[b] { i } else { b });
    let level = 0.75 * u[j];
    let mut pts = vec![(0.0, u[j])];
    for dir in [-1i64, 1] {
        let mut k = 1i64;
        while k < n as i64 / 2 {
            let i = (j as i64 + dir * k).rem_euclid(n as i64) as usize;
            if u[i] < level {
                break;
            }
            pts.push((dir as f64 * k as f64 * grid.dx, u[i]));
            k += 1;
        }
    }
    if pts.len() < 3 {
        return grid.xs[j];
    }
    // normal equations for u ≈ a + b s + c s².
    let mut m = nalgebra::Matrix3::zeros();
    let mut r = nalgebra::Vector3::zeros();
    for &(s, v) in &pts {
        let basis = nalgebra::Vector3::new(1.0, s, s * s);
        m += basis * basis.transpose();
        r += basis * v;
    }
    match m.lu().solve(&r) {
        Some(c) if c[2] < 0.0 => grid.xs[j] - 0.5 * c[1] / c[2],
        _ => grid.xs[j],
    }
}

/// Pearson correlation of `rho` with `rho0` translated by the displacement
/// of the centre of mass; returns `(correlation, displacement)`.
pub fn translated_correlation(rho0: &[f64], rho: &[f64], grid: &PeriodicGrid) -> Result<(f64, f64)> {
    grid.check(rho0.len())?;
    grid.check(rho.len())?;
    let centre = |r: &[f64]| {
        let m: f64 = r.iter().sum();
        r.iter().zip(&grid.xs).map(|(a, x)| a * x).sum::<f64>() / m
    };
    let shift = centre(rho) - centre(rho0);
    let moved = Fourier::new(grid, 0.0, false).translate(rho0, grid, shift);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(&moved), mean(rho));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (a, b) in moved.iter().zip(rho) {
        sab += (a - ma) * (b - mb);
        saa += (a - ma).powi(2);
        sbb += (b - mb).powi(2);
    }
    Ok((sab / (saa * sbb).sqrt(), shift))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rejects_non_powers_of_two() {
        assert!(PeriodicGrid::new(1.0, 100).is_err());
        assert!(PeriodicGrid::new(-1.0, 128).is_err());
        let g = PeriodicGrid::new(4.0, 8).unwrap();
        assert_eq!(g.xs[0], -2.0);
        assert_eq!(g.dx, 0.5);
    }

    #[test]
    fn constants_are_stationary() {
        let g = PeriodicGrid::new(10.0, 64).unwrap();
        let c = vec![0.7; 64];
        assert!(regularized_derivative(&c, &g, 0.0).unwrap().iter().all(|v| v.abs() < 1e-14));
        assert!(dkdv_rhs(&c, &g, 4.0, 1e-4).unwrap().iter().all(|v| v.abs() < 1e-13));
        let (a, b) = hydro_rhs(&c, &c, &g, 1e-4).unwrap();
        assert!(a.iter().chain(&b).all(|v| v.abs() < 1e-13));
        assert!(dnls_rhs(&[Complex64::new(0.0, 0.0); 64], &g, 4.0).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn peak_refinement_finds_parabola_vertex() {
        let g = PeriodicGrid::new(8.0, 64).unwrap();
        let u: Vec<f64> = g.xs.iter().map(|x| 1.0 - (x - 0.3).powi(2)).collect();
        assert!((peak_location(&u, &g) - 0.3).abs() < 1e-12);
    }
}
