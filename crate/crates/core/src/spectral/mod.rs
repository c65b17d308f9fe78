//! The linearized operator `L_φ w = −φ(∂² + 2)(φw)` about the quartic
//! compactons, its inverse kernels, spectra and dissipative flow.

mod bop;
mod green;
mod semigroup;
mod tridiag;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{CompactonShape, ModelParams};

pub use bop::{b_transform, direct_spectrum, eig_b, BOperator};
pub use green::{eig_green, green_apply, homogeneous_solutions, hs_norm_bound, GreenKernel};
pub use semigroup::{evolve_linearized, LinearDiagnostics, LinearRun, LinearSettings};

/// The four quartic compactons whose linearization is analyzed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    B0c1,
    B14c1,
    B14c0,
    B14cm1,
}

impl CaseTag {
    pub const ALL: [CaseTag; 4] = [CaseTag::B0c1, CaseTag::B14c1, CaseTag::B14c0, CaseTag::B14cm1];

    /// `(B, c)`.
    pub fn params(self) -> (f64, f64) {
        match self {
            CaseTag::B0c1 => (0.0, 1.0),
            CaseTag::B14c1 => (0.25, 1.0),
            CaseTag::B14c0 => (0.25, 0.0),
            CaseTag::B14cm1 => (0.25, -1.0),
        }
    }

    pub fn model(self) -> ModelParams {
        let (b, c) = self.params();
        ModelParams::compacton(4.0, b, c)
    }

    pub fn c(self) -> f64 {
        self.params().1
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CaseTag::B0c1 => "B0c1",
            CaseTag::B14c1 => "B14c1",
            CaseTag::B14c0 => "B14c0",
            CaseTag::B14cm1 => "B14cm1",
        };
        f.write_str(s)
    }
}

impl FromStr for CaseTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B0c1" => Ok(CaseTag::B0c1),
            "B14c1" => Ok(CaseTag::B14c1),
            "B14c0" => Ok(CaseTag::B14c0),
            "B14cm1" => Ok(CaseTag::B14cm1),
            _ => Err(Error::InvalidParams(format!("unknown case '{s}'; expected B0c1, B14c1, B14c0 or B14cm1"))),
        }
    }
}

/// `L_φ` on the cell-centred grid `x_i = −x_r + (i + ½)h` of the support.
#[derive(Debug, Clone)]
pub struct LinearizedOperator {
    pub case: CaseTag,
    pub shape: CompactonShape,
    pub half_width: f64,
    pub h: f64,
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub phi_x: Vec<f64>,
}

impl LinearizedOperator {
    pub fn new(case: CaseTag, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::Grid(format!("need at least 8 cells, got {n}")));
        }
        let shape = CompactonShape::new(&case.model())?;
        let xr = shape.half_width();
        let h = 2.0 * xr / n as f64;
        let xs: Vec<f64> = (0..n).map(|i| -xr + (i as f64 + 0.5) * h).collect();
        // mirror so the grid is exactly symmetric.
        let mut xs = xs;
        for i in 0..n / 2 {
            xs[n - 1 - i] = -xs[i];
        }
        let phi = xs.iter().map(|&x| shape.value(x)).collect();
        let phi_x = xs.iter().map(|&x| shape.derivative(x)).collect();
        Ok(Self { case, shape, half_width: xr, h, xs, phi, phi_x })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Cell-sum inner product `h Σ a_i b_i`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    /// Directions the linearized flow's data must be orthogonal to.
    pub fn constraint_directions(&self) -> Vec<&[f64]> {
        match self.case {
            CaseTag::B0c1 => vec![&self.phi, &self.phi_x],
            _ => vec![&self.phi],
        }
    }

    /// Directions a right-hand side of `L_φ w = f` must be orthogonal to.
    pub fn inverse_constraints(&self) -> Vec<&[f64]> {
        match self.case {
            CaseTag::B0c1 => vec![&self.phi, &self.phi_x],
            CaseTag::B14c0 => vec![&self.phi],
            CaseTag::B14c1 | CaseTag::B14cm1 => vec![],
        }
    }

    /// Remove the constrained components of `v` using compactly supported
    /// even and odd correctors, so the result still vanishes near the edges.
    pub fn constrain(&self, v: &[f64]) -> Vec<f64> {
        let xr = self.half_width;
        let bump = |x: f64| {
            let y = x / (0.5 * xr);
            if y.abs() < 1.0 {
                (-1.0 / (1.0 - y * y)).exp()
            } else {
                0.0
            }
        };
        let even: Vec<f64> = self.xs.iter().map(|&x| bump(x)).collect();
        let odd: Vec<f64> = self.xs.iter().map(|&x| x * bump(x)).collect();
        let mut out = v.to_vec();
        let a = self.inner(&out, &self.phi) / self.inner(&even, &self.phi);
        out.iter_mut().zip(&even).for_each(|(o, e)| *o -= a * e);
        if self.case == CaseTag::B0c1 {
            let b = self.inner(&out, &self.phi_x) / self.inner(&odd, &self.phi_x);
            out.iter_mut().zip(&odd).for_each(|(o, e)| *o -= b * e);
        }
        out
    }

    fn check_len(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.len() {
            return Err(Error::Grid(format!("{} samples for a {}-cell operator", w.len(), self.len())));
        }
        Ok(())
    }
}

/// `−φ((φw)'' + 2φw)` with second-order centred differences on `y = φw`.
///
/// `y` vanishes at both edges; the ghost value is the cubic through that zero
/// and the first three cells.
pub fn apply_l(op: &LinearizedOperator, w: &[f64]) -> Result<Vec<f64>> {
    op.check_len(w)?;
    let n = op.len();
    let y: Vec<f64> = op.phi.iter().zip(w).map(|(p, v)| p * v).collect();
    let ghost = |a: f64, b: f64, c: f64| -3.0 * a + b - 0.2 * c;
    let left = ghost(y[0], y[1], y[2]);
    let right = ghost(y[n - 1], y[n - 2], y[n - 3]);
    let h2 = op.h * op.h;
    Ok((0..n)
        .map(|i| {
            let ym = if i == 0 { left } else { y[i - 1] };
            let yp = if i + 1 == n { right } else { y[i + 1] };
            -op.phi[i] * ((yp - 2.0 * y[i] + ym) / h2 + 2.0 * y[i])
        })
        .collect())
}

/// `E_φ[w] = ⟨L_φ w, w⟩ = ‖(φw)_x‖² − 2‖φw‖²`.
pub fn energy_form(op: &LinearizedOperator, w: &[f64]) -> Result<f64> {
    let lw = apply_l(op, w)?;
    Ok(op.inner(&lw, w))
}

/// Roots of `α² + α + λ = 0`, `α_± = (−1 ± √(1 − 4λ))/2`.
pub fn frobenius_exponents(lambda: Complex64) -> (Complex64, Complex64) {
    let disc = (Complex64::new(1.0, 0.0) - 4.0 * lambda).sqrt();
    ((disc - 1.0) * 0.5, (-disc - 1.0) * 0.5)
}

/// Sign changes of `samples`, ignoring values below `1e−9·max|samples|`.
pub fn count_zeros(samples: &[f64]) -> usize {
    let amp = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-9 * amp;
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in samples {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub T: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub case: CaseTag,
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenfunctions: Vec<Vec<f64>>,
    /// Abscissae of the eigenfunction samples (`t` for the b-operator, `x` otherwise).
    #[serde(skip)]
    pub nodes: Vec<f64>,
    pub continuum_edge: Option<f64>,
    pub zero_counts: Vec<usize>,
    /// Leading eigenvalues that are genuinely discrete; later entries sit in
    /// the continuum and are discretization artifacts.
    pub discrete_count: usize,
    pub grid: GridInfo,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_examples() {
        let re = |l: f64| {
            let (a, b) = frobenius_exponents(Complex64::new(l, 0.0));
            (a.re, b.re, a.im, b.im)
        };
        assert_eq!(re(0.0), (0.0, -1.0, 0.0, 0.0));
        assert_eq!(re(0.25), (-0.5, -0.5, 0.0, 0.0));
        assert_eq!(re(-2.0), (1.0, -2.0, 0.0, 0.0));
        let (a, b) = frobenius_exponents(Complex64::new(1.25, 0.0));
        assert_eq!((a.re, a.im, b.im), (-0.5, 1.0, -1.0));
    }

    #[test]
    fn zero_counting_ignores_noise() {
        assert_eq!(count_zeros(&[1.0, 2.0, 1.0]), 0);
        assert_eq!(count_zeros(&[1.0, -1.0, 1.0]), 2);
        assert_eq!(count_zeros(&[1.0, 1e-12, -1e-12, 1.0]), 0);
        assert_eq!(count_zeros(&[]), 0);
    }

    #[test]
    fn case_tags_round_trip() {
        for c in CaseTag::ALL {
            assert_eq!(c.to_string().parse::<CaseTag>().unwrap(), c);
        }
        assert!("B1c1".parse::<CaseTag>().is_err());
    }

    #[test]
    fn apply_l_zero_and_ground_state() {
        for case in CaseTag::ALL {
            let op = LinearizedOperator::new(case, 1024).unwrap();
            assert!(apply_l(&op, &vec![0.0; 1024]).unwrap().iter().all(|&v| v == 0.0));
            let lphi = apply_l(&op, &op.phi).unwrap();
            let err = lphi.iter().zip(&op.phi).map(|(l, p)| (l + 2.0 * case.c() * p).abs()).fold(0.0, f64::max);
            assert!(err < 1e-4, "{case}: {err}");
            assert!(apply_l(&op, &[0.0; 3]).is_err());
        }
    }
}
