//! The linearized flow `v_t = (L_φ v)_x + f` on the constrained subspace.
//!
//! `L_h = −Φ(D₂ + K)Φ` is symmetric, with `D₂` the odd-reflection Laplacian
//! and the diagonal `K ≈ 2` tuned so that `L_h φ = −2cφ` exactly. The flux
//! derivative uses ghosts `z_{−1} = z_0` (free left end) and `z_n = −z_{n−1}`
//! (`L_φ v = 0` at `x_r`), which gives `⟨z, D₁z⟩ = −(z_0² + z_{n−1}²)/2`.
//! Crank–Nicolson then makes `E = ⟨L_h v, v⟩` non-increasing step by step.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::LinearizedOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LinearSettings {
    pub t_end: f64,
    /// Initial step; defaults to `1e−3` times the interval length.
    pub dt: Option<f64>,
    /// Largest allowed relative edge value of `φv0` and of `L_φ v0` at `x_r`.
    pub bc_tol: f64,
    /// Largest allowed relative projection of `v0` on the constraint directions.
    pub ortho_tol: f64,
}

impl Default for LinearSettings {
    fn default() -> Self {
        Self { t_end: 1.0, dt: None, bc_tol: 1e-2, ortho_tol: 1e-8 }
    }
}

/// Per-step record. `energy_h = √E`; `flux_upsilon` is `L_φ v` in the first
/// cell, for which the scheme satisfies `dE/dt = −Υ² − (L_φ v)²_{n−1}` exactly.
#[derive(Debug, Clone, Default, Serialize)]
pub struct LinearDiagnostics {
    pub t: Vec<f64>,
    pub energy: Vec<f64>,
    pub energy_h: Vec<f64>,
    pub flux_upsilon: Vec<f64>,
    pub ortho_phi: Vec<f64>,
    pub ortho_phix: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LinearRun {
    pub v: Vec<f64>,
    pub diagnostics: LinearDiagnostics,
    pub steps: usize,
}

/// The symmetric well-balanced `L_h`.
fn l_matrix(op: &LinearizedOperator) -> DMatrix<f64> {
    let n = op.len();
    let h2 = op.h * op.h;
    let c = op.case.c();
    let y: Vec<f64> = op.phi.iter().map(|p| p * p).collect();
    let d2 = |v: &[f64], i: usize| -> f64 {
        let vm = if i == 0 { -v[0] } else { v[i - 1] };
        let vp = if i + 1 == n { -v[n - 1] } else { v[i + 1] };
        (vp - 2.0 * v[i] + vm) / h2
    };
    let kappa: Vec<f64> = (0..n).map(|i| (2.0 * c - d2(&y, i)) / y[i]).collect();
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n {
        let edge = if i == 0 || i + 1 == n { 3.0 } else { 2.0 };
        l[(i, i)] = -op.phi[i] * op.phi[i] * (kappa[i] - edge / h2);
        if i + 1 < n {
            let o = -op.phi[i] * op.phi[i + 1] / h2;
            l[(i, i + 1)] = o;
            l[(i + 1, i)] = o;
        }
    }
    l
}

fn d1_matrix(n: usize, h: f64) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n, n);
    let s = 0.5 / h;
    for i in 0..n {
        if i + 1 < n {
            d[(i, i + 1)] += s;
        } else {
            d[(i, i)] -= s;
        }
        if i > 0 {
            d[(i, i - 1)] -= s;
        } else {
            d[(i, i)] -= s;
        }
    }
    d
}

pub fn evolve_linearized(
    op: &LinearizedOperator,
    v0: &[f64],
    forcing: Option<&[f64]>,
    settings: &LinearSettings,
) -> Result<LinearRun> {
    op.check_len(v0)?;
    if let Some(f) = forcing {
        op.check_len(f)?;
    }
    if !(settings.t_end >= 0.0) {
        return Err(Error::InvalidParams(format!("t_end must be nonnegative, got {}", settings.t_end)));
    }
    let n = op.len();
    let vnorm = op.inner(v0, v0).sqrt();
    for d in op.constraint_directions() {
        let ip = op.inner(v0, d);
        if ip.abs() > settings.ortho_tol * vnorm * op.inner(d, d).sqrt() {
            return Err(Error::Orthogonality(format!("initial data has ⟨v0, ·⟩ = {ip:e}")));
        }
    }

    let l = l_matrix(op);
    let phi = DVector::from_column_slice(&op.phi);
    let phi_hat = &phi / phi.norm();
    let proj = DMatrix::identity(n, n) - &phi_hat * phi_hat.transpose();
    let a = &proj * d1_matrix(n, op.h) * &l;
    let f = forcing.map(|f| &proj * DVector::from_column_slice(f));

    // v0 must satisfy φv = 0 at both edges and L_φ v = 0 at x_r; afterwards
    // the ghost cells impose them.
    let v = DVector::from_column_slice(v0);
    let z = &l * &v;
    let y: Vec<f64> = op.phi.iter().zip(v0).map(|(p, w)| p * w).collect();
    let ymax = y.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let edge = |a: f64, b: f64| (0.5 * (3.0 * a - b)).abs();
    let bc = [
        edge(y[0], y[1]) / ymax,
        edge(y[n - 1], y[n - 2]) / ymax,
        edge(z[n - 1], z[n - 2]) / z.amax(),
    ];
    if ymax > 0.0 && bc.iter().any(|r| *r > settings.bc_tol) {
        return Err(Error::BoundaryCondition(format!("relative edge residuals {bc:?} of the initial data")));
    }

    let mut diag = LinearDiagnostics::default();
    let record = |diag: &mut LinearDiagnostics, t: f64, v: &DVector<f64>| -> f64 {
        let z = &l * v;
        let e = op.h * z.dot(v);
        diag.t.push(t);
        diag.energy.push(e);
        diag.energy_h.push(e.max(0.0).sqrt());
        diag.flux_upsilon.push(z[0]);
        diag.ortho_phi.push(op.inner(v.as_slice(), &op.phi));
        diag.ortho_phix.push(op.inner(v.as_slice(), &op.phi_x));
        e
    };

    let mut v = v;
    let mut t = 0.0;
    let mut e_prev = record(&mut diag, t, &v);
    let mut dt = settings.dt.unwrap_or(2e-3 * op.half_width).min(settings.t_end.max(f64::MIN_POSITIVE));
    let id = DMatrix::<f64>::identity(n, n);
    let factor = |dt: f64| ((&id - &a * (0.5 * dt)).lu(), &id + &a * (0.5 * dt));
    let (mut lu, mut rhs_op) = factor(dt);
    let mut steps = 0;
    while t < settings.t_end * (1.0 - 1e-14) {
        let step = dt.min(settings.t_end - t);
        if step < dt * (1.0 - 1e-12) {
            (lu, rhs_op) = factor(step);
        }
        let mut rhs = &rhs_op * &v;
        if let Some(f) = &f {
            rhs += f * step;
        }
        let next = lu.solve(&rhs).ok_or_else(|| Error::Linear("singular Crank–Nicolson matrix".into()))?;
        if next.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { t });
        }
        let e_next = op.h * (&l * &next).dot(&next);
        let growth = e_next - e_prev;
        if f.is_none() && growth > 1e-12 * e_prev.abs().max(1e-300) && step > 1e-12 {
            dt = 0.5 * step;
            (lu, rhs_op) = factor(dt);
            continue;
        }
        v = next;
        t += step;
        steps += 1;
        e_prev = record(&mut diag, t, &v);
        if step < dt {
            (lu, rhs_op) = factor(dt);
        }
    }
    Ok(LinearRun { v: v.as_slice().to_vec(), diagnostics: diag, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::CaseTag;

    #[test]
    fn well_balanced_ground_state() {
        for case in CaseTag::ALL {
            let op = LinearizedOperator::new(case, 64).unwrap();
            let l = l_matrix(&op);
            let r = &l * DVector::from_column_slice(&op.phi);
            for i in 0..64 {
                assert!((r[i] + 2.0 * case.c() * op.phi[i]).abs() < 1e-10);
            }
            assert!((&l - l.transpose()).amax() == 0.0);
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let op = LinearizedOperator::new(CaseTag::B14c1, 64).unwrap();
        let run = evolve_linearized(&op, &[0.0; 64], None, &LinearSettings { t_end: 0.1, ..Default::default() }).unwrap();
        assert!(run.v.iter().all(|&x| x == 0.0));
    }
}
