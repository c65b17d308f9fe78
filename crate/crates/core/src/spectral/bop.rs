//! The Schrödinger form `L_b = −∂_t² + ¼ + (15/4)V(t)` of the `B0c1`
//! linearization, and a direct weighted discretization of `L_φ`.

use serde::Serialize;

use super::tridiag::Tridiag;
use super::{count_zeros, CaseTag, GridInfo, LinearizedOperator, Spectrum};
use crate::error::{Error, Result};
use crate::profiles::CompactonShape;

/// Largest admissible `|V(±T)|`.
pub const TRUNCATION_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct BOperator {
    pub t_max: f64,
    /// Uniform grid on `[−T, T]` with an even number of intervals.
    pub ts: Vec<f64>,
    pub x_of_t: Vec<f64>,
    pub potential: Vec<f64>,
    pub conjugator: Vec<f64>,
    pub constant_term: f64,
    pub coupling: f64,
}

/// Integrate `x' = −φ(x)`, `G' = φ_x(x)` from `t = 0`; returns `x(t)` and
/// `g(t) = exp(−G/2)` at `t = 0, dt, …, m·dt`.
fn flow(shape: &CompactonShape, dt: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let rhs = |x: f64| (-shape.value(x), shape.derivative(x));
    let sub = 4;
    let k = dt / sub as f64;
    let (mut x, mut g) = (0.0f64, 0.0f64);
    let mut xs = vec![x];
    let mut gs = vec![1.0];
    for _ in 0..m {
        for _ in 0..sub {
            let (a1, b1) = rhs(x);
            let (a2, b2) = rhs(x + 0.5 * k * a1);
            let (a3, b3) = rhs(x + 0.5 * k * a2);
            let (a4, b4) = rhs(x + k * a3);
            x += k / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            g += k / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        }
        xs.push(x);
        gs.push((-0.5 * g).exp());
    }
    (xs, gs)
}

/// Change variables by `dx/dt = −φ(x)`, `x(0) = 0`, for the `B0c1` compacton.
pub fn b_transform(case: CaseTag, t_max: f64, n: usize) -> Result<BOperator> {
    if case != CaseTag::B0c1 {
        return Err(Error::InvalidParams(format!("the b-transform is defined for B0c1, not {case}")));
    }
    if !(t_max > 0.0) || n < 8 || n % 4 != 0 {
        return Err(Error::Grid(format!("need T > 0 and a multiple of 4 intervals, got T = {t_max}, n = {n}")));
    }
    let shape = CompactonShape::new(&case.model())?;
    let m = n / 2;
    let dt = t_max / m as f64;
    let (xf, gf) = flow(&shape, dt, m);
    let mut ts = Vec::with_capacity(n + 1);
    let mut x_of_t = Vec::with_capacity(n + 1);
    let mut conjugator = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (j, sign) = if i < m { (m - i, -1.0) } else { (i - m, 1.0) };
        ts.push(sign * j as f64 * dt);
        // φ is even and φ_x odd, so x(−t) = −x(t) and G(−t) = G(t).
        x_of_t.push(sign * xf[j]);
        conjugator.push(gf[j]);
    }
    let potential: Vec<f64> = x_of_t.iter().map(|&x| -0.5 * shape.value(x).powi(2)).collect();
    let tail = potential[n].abs().max(potential[0].abs());
    if tail > TRUNCATION_FLOOR {
        return Err(Error::Truncation(tail));
    }
    Ok(BOperator { t_max, ts, x_of_t, potential, conjugator, constant_term: 0.25, coupling: 3.75 })
}

fn b_matrix(bop: &BOperator, stride: usize) -> Tridiag {
    let n = bop.ts.len() - 1;
    let h = bop.ts[stride] - bop.ts[0];
    let diag = (stride..n)
        .step_by(stride)
        .map(|i| 2.0 / (h * h) + bop.constant_term + bop.coupling * bop.potential[i])
        .collect::<Vec<_>>();
    let off = vec![-1.0 / (h * h); diag.len() - 1];
    Tridiag { diag, off }
}

/// Lowest `k` eigenvalues of the Dirichlet-truncated `L_b`, Richardson
/// extrapolated from grids `h` and `2h`.
pub fn eig_b(bop: &BOperator, k: usize) -> Result<Spectrum> {
    let fine = b_matrix(bop, 1);
    let coarse = b_matrix(bop, 2);
    if k == 0 || k > coarse.len() {
        return Err(Error::InvalidParams(format!("cannot compute {k} eigenvalues on this grid")));
    }
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenfunctions = Vec::with_capacity(k);
    for j in 0..k {
        let lf = fine.eigenvalue(j);
        let lc = coarse.eigenvalue(j);
        eigenvalues.push((4.0 * lf - lc) / 3.0);
        let mut v = vec![0.0];
        v.extend(fine.eigenvector(lf));
        v.push(0.0);
        eigenfunctions.push(v);
    }
    let zero_counts = eigenfunctions.iter().map(|f| count_zeros(f)).collect();
    let discrete_count = eigenvalues.iter().take_while(|&&l| l < bop.constant_term).count();
    Ok(Spectrum {
        case: CaseTag::B0c1,
        eigenvalues,
        eigenfunctions,
        nodes: bop.ts.clone(),
        continuum_edge: Some(bop.constant_term),
        zero_counts,
        discrete_count,
        grid: GridInfo { n: bop.ts.len() - 1, T: Some(bop.t_max), x_r: None },
    })
}

/// Lowest `k` eigenpairs of the symmetric matrix `−Φ D₂ Φ − 2Φ²` on the
/// operator's cells, with `φw` reflected oddly across both edges.
pub fn direct_spectrum(op: &LinearizedOperator, k: usize) -> Result<Spectrum> {
    let n = op.len();
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!("cannot compute {k} eigenvalues on {n} cells")));
    }
    let h2 = op.h * op.h;
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let d = if i == 0 || i == n - 1 { 3.0 } else { 2.0 };
            op.phi[i] * op.phi[i] * (d / h2 - 2.0)
        })
        .collect();
    let off: Vec<f64> = (0..n - 1).map(|i| -op.phi[i] * op.phi[i + 1] / h2).collect();
    let t = Tridiag { diag, off };
    let mut eigenvalues = Vec::with_capacity(k);
    let mut eigenfunctions = Vec::with_capacity(k);
    for j in 0..k {
        let l = t.eigenvalue(j);
        let mut v = t.eigenvector(l);
        let s = op.h.sqrt();
        v.iter_mut().for_each(|a| *a /= s);
        if v[n / 2] < 0.0 || (v[n / 2] == 0.0 && v[0] < 0.0) {
            v.iter_mut().for_each(|a| *a = -*a);
        }
        eigenvalues.push(l);
        eigenfunctions.push(v);
    }
    let edge = (op.case == CaseTag::B0c1).then_some(0.25);
    let discrete_count = eigenvalues.iter().take_while(|&&l| edge.is_none_or(|e| l < e)).count();
    let zero_counts = eigenfunctions.iter().map(|f| count_zeros(f)).collect();
    Ok(Spectrum {
        case: op.case,
        eigenvalues,
        eigenfunctions,
        nodes: op.xs.clone(),
        continuum_edge: edge,
        zero_counts,
        discrete_count,
        grid: GridInfo { n, T: None, x_r: Some(op.half_width) },
    })
}
