//! Homogeneous solutions, variation-of-parameters inverses and the Nyström
//! discretization of the inverse kernel.

use std::f64::consts::SQRT_2;

use nalgebra::{DMatrix, SymmetricEigen};

use super::{count_zeros, CaseTag, GridInfo, LinearizedOperator, Spectrum};
use crate::error::{Error, Result};
use crate::profiles::CompactonShape;
use crate::quadrature::{cell_centered_total, cumulative_cell_centered};

/// Two solutions `q_a`, `q_b` of `L_φ q = 0`, handled through `y = φq`,
/// which solves `y'' + 2y = 0`.
///
/// * `B0c1`: `q_a = φ_x`, `q_b = φ − 1/φ`.
/// * `B14c±1`: `q_a = q_−`, `q_b = q_+` with `φq_± = sin(√2(x ∓ x_r))/√2`.
/// * `B14c0`: `q_a = φ`, `q_b = q_* = sin(√2x)/(√2φ)`.
#[derive(Debug, Clone)]
pub struct GreenKernel {
    pub case: CaseTag,
    pub half_width: f64,
    /// The case's modified Wronskian, constant on the interval.
    pub wronskian_constant: f64,
    shape: CompactonShape,
}

impl GreenKernel {
    /// `(φq_a, (φq_a)', φq_b, (φq_b)')` at `x`.
    pub fn y(&self, x: f64) -> [f64; 4] {
        let r = SQRT_2;
        let xr = self.half_width;
        match self.case {
            CaseTag::B0c1 => [-(r * x).sin() / r, -(r * x).cos(), (r * x).cos(), -r * (r * x).sin()],
            CaseTag::B14c0 => [(r * x).cos(), -r * (r * x).sin(), (r * x).sin() / r, (r * x).cos()],
            CaseTag::B14c1 | CaseTag::B14cm1 => {
                let (m, p) = (r * (x + xr), r * (x - xr));
                [m.sin() / r, m.cos(), p.sin() / r, p.cos()]
            }
        }
    }

    /// `(q_a(x), q_b(x))`.
    pub fn q(&self, x: f64) -> (f64, f64) {
        let phi = self.shape.value(x);
        let [ya, _, yb, _] = self.y(x);
        (ya / phi, yb / phi)
    }

    /// The modified Wronskian at `x`: `(φq_1)_x(φq_2) − (φq_2)_x(φq_1)` for
    /// `B0c1`, `(φq_a)(φq_b)_x − (φq_b)(φq_a)_x` otherwise.
    pub fn wronskian_at(&self, x: f64) -> f64 {
        let [ya, dya, yb, dyb] = self.y(x);
        match self.case {
            CaseTag::B0c1 => dya * yb - dyb * ya,
            _ => ya * dyb - yb * dya,
        }
    }

    /// `y_a y_b' − y_a' y_b`, the normalization of variation of parameters.
    fn w_ab(&self) -> f64 {
        let [ya, dya, yb, dyb] = self.y(0.0);
        ya * dyb - dya * yb
    }

    /// `q_a` vanishes at both edges (a kernel direction of the Dirichlet problem).
    fn degenerate(&self) -> bool {
        matches!(self.case, CaseTag::B0c1 | CaseTag::B14c0)
    }

    /// Kernel of the inverse: `w(x) = ∫ K(x, y) f(y) dy`. For the degenerate
    /// cases this is the left-anchored particular solution before projection.
    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let (qa_x, qb_x) = self.q(x);
        let (qa_y, qb_y) = self.q(y);
        let w = self.w_ab();
        if self.degenerate() {
            if y < x {
                -(qb_x * qa_y - qa_x * qb_y) / w
            } else {
                0.0
            }
        } else if y < x {
            -qb_x * qa_y / w
        } else {
            -qa_x * qb_y / w
        }
    }
}

pub fn homogeneous_solutions(case: CaseTag) -> Result<GreenKernel> {
    let shape = CompactonShape::new(&case.model())?;
    let mut k = GreenKernel { case, half_width: shape.half_width(), wronskian_constant: 0.0, shape };
    k.wronskian_constant = k.wronskian_at(0.0);
    Ok(k)
}

/// `L_φ^{−1} f` by variation of parameters with cell-centred cumulative
/// quadrature. In the degenerate cases the free multiple of the kernel
/// direction is fixed by orthogonality to it.
pub fn green_apply(op: &LinearizedOperator, f: &[f64]) -> Result<Vec<f64>> {
    op.check_len(f)?;
    let fnorm = op.inner(f, f).sqrt();
    if fnorm == 0.0 {
        return Ok(vec![0.0; f.len()]);
    }
    for d in op.inverse_constraints() {
        let ip = op.inner(f, d);
        let scale = fnorm * op.inner(d, d).sqrt();
        if ip.abs() > 1e-8 * scale {
            return Err(Error::Orthogonality(format!("relative projection {:e} exceeds 1e-8", ip / scale)));
        }
    }
    let kern = homogeneous_solutions(op.case)?;
    let n = op.len();
    let h = op.h;
    let ys: Vec<[f64; 4]> = op.xs.iter().map(|&x| kern.y(x)).collect();
    // y'' + 2y = g with g = −f/φ; the products y_a g = −q_a f stay bounded.
    let ga: Vec<f64> = (0..n).map(|i| -ys[i][0] * f[i] / op.phi[i]).collect();
    let gb: Vec<f64> = (0..n).map(|i| -ys[i][2] * f[i] / op.phi[i]).collect();
    let ia = cumulative_cell_centered(&ga, h);
    let ib = cumulative_cell_centered(&gb, h);
    let ta = cell_centered_total(&ga, h);
    let tb = cell_centered_total(&gb, h);
    let w = kern.w_ab();
    let mut out: Vec<f64> = (0..n)
        .map(|i| {
            let (ya, yb) = (ys[i][0], ys[i][2]);
            let y = if kern.degenerate() {
                // y_b survives at x_r, so its coefficient is anchored there;
                // the two anchors agree when ∫y_a g = 0.
                let a = if op.xs[i] < 0.0 { ia[i] } else { ia[i] - ta };
                (yb * a - ya * ib[i]) / w
            } else {
                (yb * ia[i] + ya * (tb - ib[i])) / w
            };
            y / op.phi[i]
        })
        .collect();
    if kern.degenerate() {
        let qa: Vec<f64> = (0..n).map(|i| ys[i][0] / op.phi[i]).collect();
        let c = op.inner(&out, &qa) / op.inner(&qa, &qa);
        out.iter_mut().zip(&qa).for_each(|(o, q)| *o -= c * q);
    }
    Ok(out)
}

/// Nodes and weights of the midpoint rule in `τ` under the grading
/// `x = −x_r + 2x_r τ²/(τ² + (1 − τ)²)`.
pub(crate) fn graded_nodes(xr: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = Vec::with_capacity(n);
    let mut ws = Vec::with_capacity(n);
    for i in 0..n {
        let t = (i as f64 + 0.5) / n as f64;
        let den = t * t + (1.0 - t) * (1.0 - t);
        xs.push(-xr + 2.0 * xr * t * t / den);
        ws.push(2.0 * xr * 2.0 * t * (1.0 - t) / (den * den) / n as f64);
    }
    for i in 0..n / 2 {
        xs[n - 1 - i] = -xs[i];
        ws[n - 1 - i] = ws[i];
    }
    (xs, ws)
}

fn require_quarter(case: CaseTag) -> Result<()> {
    if case == CaseTag::B0c1 {
        return Err(Error::InvalidParams("the Nyström kernel route needs a B = 1/4 case".into()));
    }
    Ok(())
}

/// Symmetric weighted Nyström matrix `√ω_i K(x_i, x_j) √ω_j`, projected off
/// `φ` for `c = 0`. Also returns the nodes, weights and weighted `φ`.
fn nystrom(kern: &GreenKernel, n: usize) -> (DMatrix<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let (xs, ws) = graded_nodes(kern.half_width, n);
    let sw: Vec<f64> = ws.iter().map(|w| w.sqrt()).collect();
    let mut s = DMatrix::from_fn(n, n, |i, j| sw[i] * kern.kernel(xs[i], xs[j]) * sw[j]);
    let phi_t: Vec<f64> = xs.iter().zip(&sw).map(|(&x, w)| w * kern.shape.value(x)).collect();
    if kern.degenerate() {
        let norm = phi_t.iter().map(|v| v * v).sum::<f64>().sqrt();
        let u = nalgebra::DVector::from_iterator(n, phi_t.iter().map(|v| v / norm));
        let su = &s * &u;
        let ust = u.transpose() * &s;
        let usu = (u.transpose() * &su)[(0, 0)];
        s = &s - &su * u.transpose() - &u * &ust + &u * u.transpose() * usu;
        s = (&s + s.transpose()) * 0.5;
    }
    (s, xs, ws, phi_t)
}

/// Lowest `k` eigenvalues of `L_φ` from the Nyström discretization of its
/// inverse on `n` graded nodes. For `c = 0` the kernel acts on `φ^⊥` and the
/// pair `(0, φ)` is prepended.
pub fn eig_green(case: CaseTag, n: usize, k: usize) -> Result<Spectrum> {
    require_quarter(case)?;
    if n < 16 {
        return Err(Error::Grid(format!("need at least 16 Nyström nodes, got {n}")));
    }
    let kern = homogeneous_solutions(case)?;
    let (s, xs, ws, phi_t) = nystrom(&kern, n);
    let eig = SymmetricEigen::new(s);
    let mut pairs: Vec<(f64, usize)> = Vec::new();
    let skip = if kern.degenerate() {
        // the column most aligned with φ carries the projected-out direction.
        (0..n).max_by(|&a, &b| {
            let ov = |j: usize| eig.eigenvectors.column(j).iter().zip(&phi_t).map(|(u, v)| u * v).sum::<f64>().abs();
            ov(a).total_cmp(&ov(b))
        })
    } else {
        None
    };
    for j in 0..n {
        if Some(j) == skip || eig.eigenvalues[j] == 0.0 {
            continue;
        }
        pairs.push((1.0 / eig.eigenvalues[j], j));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut eigenvalues = Vec::new();
    let mut eigenfunctions = Vec::new();
    if kern.degenerate() {
        eigenvalues.push(0.0);
        eigenfunctions.push(xs.iter().map(|&x| kern.shape.value(x)).collect());
    }
    for &(lam, j) in pairs.iter() {
        if eigenvalues.len() >= k {
            break;
        }
        let col = eig.eigenvectors.column(j);
        let mut f: Vec<f64> = (0..n).map(|i| col[i] / ws[i].sqrt()).collect();
        // fix the sign so the sample nearest the left edge is positive.
        if let Some(&first) = f.iter().find(|v| v.abs() > 1e-12) {
            if first < 0.0 {
                f.iter_mut().for_each(|v| *v = -*v);
            }
        }
        eigenvalues.push(lam);
        eigenfunctions.push(f);
    }
    eigenvalues.truncate(k);
    eigenfunctions.truncate(k);
    let zero_counts = eigenfunctions.iter().map(|f| count_zeros(f)).collect();
    Ok(Spectrum {
        case,
        discrete_count: eigenvalues.len(),
        eigenvalues,
        eigenfunctions,
        nodes: xs,
        continuum_edge: None,
        zero_counts,
        grid: GridInfo { n, T: None, x_r: Some(kern.half_width) },
    })
}

/// `sup_x ∫|K(x, y)|² dy` on graded meshes of `base·2^l` nodes, `l < levels`.
pub fn hs_norm_bound(case: CaseTag, base: usize, levels: usize) -> Result<Vec<f64>> {
    require_quarter(case)?;
    let kern = homogeneous_solutions(case)?;
    (0..levels)
        .map(|l| {
            let n = base << l;
            let (s, _, ws, _) = nystrom(&kern, n);
            Ok((0..n).map(|i| s.row(i).iter().map(|v| v * v).sum::<f64>() / ws[i]).fold(0.0, f64::max))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_nodes_integrate_smooth_functions() {
        let (xs, ws) = graded_nodes(2.0, 400);
        let total: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x * x).sum();
        assert!((total - 16.0 / 3.0).abs() < 1e-4);
        assert_eq!(xs[0], -xs[399]);
    }

    #[test]
    fn wronskians_are_constant() {
        for case in CaseTag::ALL {
            let k = homogeneous_solutions(case).unwrap();
            for i in 1..20 {
                let x = -k.half_width + 2.0 * k.half_width * i as f64 / 20.0;
                assert!((k.wronskian_at(x) - k.wronskian_constant).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_is_symmetric_off_the_degenerate_cases() {
        let k = homogeneous_solutions(CaseTag::B14c1).unwrap();
        for &(x, y) in &[(0.3, -0.7), (1.2, 0.1), (-1.5, 1.4)] {
            assert!((k.kernel(x, y) - k.kernel(y, x)).abs() < 1e-12);
        }
    }

    #[test]
    fn b0c1_is_rejected_by_the_kernel_route() {
        assert!(eig_green(CaseTag::B0c1, 64, 2).is_err());
    }
}
