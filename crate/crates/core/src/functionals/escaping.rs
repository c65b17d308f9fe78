use std::sync::OnceLock;

use serde::Serialize;

use super::{minimize_in_family, polar_from_current, MinimizerResult, PolarFunctionals};
use crate::error::{Error, Result};
use crate::profiles::{CompactonShape, ModelParams};
use crate::quadrature::adaptive;

fn raw_bump(y: f64) -> f64 {
    if y.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - y * y)).exp()
    }
}

fn bump_norm() -> f64 {
    static NORM: OnceLock<f64> = OnceLock::new();
    *NORM.get_or_init(|| 1.0 / adaptive(-1.0, 1.0, 1e-15, raw_bump))
}

/// Smooth bump supported in `(−1, 1)` with unit integral: `(χ(y), χ'(y))`.
pub fn unit_bump(y: f64) -> (f64, f64) {
    if y.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let q = 1.0 - y * y;
    let v = bump_norm() * raw_bump(y);
    (v, -2.0 * y / (q * q) * v)
}

/// Polar fields on one uniform grid segment: `ρ`, `ρ_x` and the current `j = ρθ_x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarSegment {
    pub x0: f64,
    pub dx: f64,
    pub rho: Vec<f64>,
    pub rho_x: Vec<f64>,
    pub j: Vec<f64>,
}

impl PolarSegment {
    pub fn functionals(&self, p: f64) -> Result<PolarFunctionals> {
        polar_from_current(&self.rho, &self.rho_x, &self.j, self.dx, p)
    }
}

/// `u = φ + ε√χ_R e^{iζ}(· − 10R)` held in polar form.
#[derive(Debug, Clone, Serialize)]
pub struct EscapingSequence {
    pub minimizer: MinimizerResult,
    /// The minimizer `φ` on its support, then the bump on `[9R, 11R]`.
    pub segments: Vec<PolarSegment>,
    pub mass: f64,
    pub momentum_k: f64,
    pub hamiltonian: f64,
    /// `H(φ)` from the samples of the first segment.
    pub h_phi: f64,
    /// `ε²R∫χ`.
    pub bump_mass: f64,
}

const SAMPLES: usize = 8193;

/// Build the escaping sequence with the bump `chi` (value and derivative on `(−1, 1)`).
pub fn escaping_sequence<C: Fn(f64) -> (f64, f64)>(
    m0: f64,
    k0: f64,
    p: f64,
    r: f64,
    eps: f64,
    chi: C,
) -> Result<EscapingSequence> {
    if !(r > 0.0 && eps > 0.0 && r.is_finite() && eps.is_finite() && k0.is_finite()) {
        return Err(Error::InvalidParams(format!("need R > 0 and ε > 0, got R = {r}, ε = {eps}")));
    }
    let minimizer = minimize_in_family(p, m0)?;
    let shape = CompactonShape::new(&ModelParams::compacton(p, minimizer.B_star, minimizer.c_star))?;
    let xr = shape.half_width();
    if xr >= 9.0 * r {
        return Err(Error::Overlap { first: 0, second: 1 });
    }

    let dx = 2.0 * xr / (SAMPLES - 1) as f64;
    let xs: Vec<f64> = (0..SAMPLES).map(|i| -xr + i as f64 * dx).collect();
    let phi_seg = PolarSegment {
        x0: -xr,
        dx,
        rho: xs.iter().map(|&x| shape.value(x).powi(2)).collect(),
        rho_x: xs.iter().map(|&x| 2.0 * shape.flux(x)).collect(),
        j: vec![0.0; SAMPLES],
    };

    let dy = 2.0 / (SAMPLES - 1) as f64;
    let ys: Vec<f64> = (0..SAMPLES).map(|i| -1.0 + i as f64 * dy).collect();
    let vals: Vec<(f64, f64)> = ys.iter().map(|&y| chi(y)).collect();
    if vals.iter().any(|v| v.0 < 0.0) || vals[0].0 != 0.0 || vals[SAMPLES - 1].0 != 0.0 {
        return Err(Error::InvalidParams("bump must be nonnegative and vanish at ±1".into()));
    }
    let e2 = eps * eps;
    let current = k0 / (2.0 * r);
    let bump_seg = PolarSegment {
        x0: 9.0 * r,
        dx: dy * r,
        rho: vals.iter().map(|v| e2 * v.0).collect(),
        rho_x: vals.iter().map(|v| e2 * v.1 / r).collect(),
        j: vec![current; SAMPLES],
    };

    let a = phi_seg.functionals(p)?;
    let b = bump_seg.functionals(p)?;
    Ok(EscapingSequence {
        minimizer,
        segments: vec![phi_seg, bump_seg],
        mass: a.mass + b.mass,
        momentum_k: a.momentum_k + b.momentum_k,
        hamiltonian: a.hamiltonian + b.hamiltonian,
        h_phi: a.hamiltonian,
        bump_mass: b.mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_has_unit_integral_and_matching_derivative() {
        let total = adaptive(-1.0, 1.0, 1e-14, |y| unit_bump(y).0);
        assert!((total - 1.0).abs() < 1e-13);
        let h = 1e-5;
        for &y in &[-0.7, -0.2, 0.0, 0.4, 0.9] {
            let fd = (unit_bump(y + h).0 - unit_bump(y - h).0) / (2.0 * h);
            assert!((fd - unit_bump(y).1).abs() < 1e-7 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn overlap_is_rejected() {
        let m0 = 2f64.sqrt() * std::f64::consts::PI;
        assert!(matches!(escaping_sequence(m0, 0.1, 4.0, 0.1, 0.1, unit_bump), Err(Error::Overlap { .. })));
    }
}
