use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{orbit::Orbit, CompactonShape, ModelParams};
use crate::roots::{bisect, golden_section};

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizerResult {
    pub B_star: f64,
    pub c_star: f64,
    pub H_star: f64,
    pub mass: f64,
    pub iterations: usize,
}

fn orbit_functionals(orbit: &Orbit) -> (f64, f64) {
    let poly = orbit.poly;
    let p = poly.p;
    let top = orbit.upper;
    let mass = 2.0 * orbit.integrate(0.0, top, |s| s * s * s);
    let flux2 = 2.0 * orbit.integrate(0.0, top, |s| s * poly.g(s).max(0.0));
    let power = 2.0 * orbit.integrate(0.0, top, |s| s.powf(p + 1.0));
    (mass, 0.5 * flux2 - power / p)
}

/// `(M, H)` of `Φ_{B,c}` by quadrature in the level variable.
pub fn family_functionals(params: &ModelParams) -> Result<(f64, f64)> {
    let shape = CompactonShape::by_quadrature(params)?;
    Ok(orbit_functionals(shape.orbit()))
}

fn mass_of(p: f64, b: f64, c: f64) -> Result<f64> {
    family_functionals(&ModelParams::compacton(p, b, c)).map(|(m, _)| m)
}

/// Minimize `H(Φ_{B,c})` subject to `M(Φ_{B,c}) = m` over `B ≥ 0`, `c > 0`.
pub fn minimize_in_family(p: f64, m: f64) -> Result<MinimizerResult> {
    if !(p > 2.0 && p < 8.0) {
        return Err(Error::InvalidParams(format!(
            "p = {p} is outside (2, 8); for p ≥ 8 the fixed-mass minimum is not attained"
        )));
    }
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::Infeasible(format!("target mass must be positive and finite, got {m}")));
    }
    let root2pi = std::f64::consts::SQRT_2 * std::f64::consts::PI;
    if p == 4.0 {
        return Ok(MinimizerResult {
            B_star: 0.0,
            c_star: m / root2pi,
            H_star: -m * m / (4.0 * root2pi),
            mass: m,
            iterations: 0,
        });
    }
    // B = 0 branch scales as M(0, c) = c^e M(0, 1).
    let e = (4.0 - p / 2.0) / (p - 2.0);
    let m1 = mass_of(p, 0.0, 1.0)?;
    let c_max = (m / m1).powf(1.0 / e);

    let b_of_c = |c: f64| -> Result<f64> {
        if c >= c_max {
            return Ok(0.0);
        }
        let mut hi = 1.0f64;
        while mass_of(p, hi, c)? < m {
            hi *= 4.0;
            if hi > 1e200 {
                return Err(Error::Infeasible(format!("no B attains mass {m} at c = {c}")));
            }
        }
        bisect(|b| mass_of(p, b, c).unwrap_or(f64::NAN) - m, 0.0, hi, 1e-15)
            .ok_or_else(|| Error::Infeasible(format!("mass {m} not bracketed at c = {c}")))
    };
    let h_of_c = |c: f64| -> f64 {
        let c = c.min(c_max);
        match b_of_c(c).and_then(|b| family_functionals(&ModelParams::compacton(p, b, c))) {
            Ok((_, h)) => h,
            Err(_) => f64::INFINITY,
        }
    };

    // coarse scan, then golden section around the best sample.
    let k = 32;
    let grid: Vec<f64> = (1..=k).map(|i| c_max * i as f64 / k as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&c| h_of_c(c)).collect();
    let best = (0..k).min_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap_or(k - 1);
    let lo = if best == 0 { 0.5 * grid[0] } else { grid[best - 1] };
    let hi = if best + 1 < k { grid[best + 1] } else { c_max };
    let (c_star, h_star, iterations) = golden_section(&h_of_c, lo, hi, 1e-10 * c_max);
    let (c_star, h_star) = if h_of_c(c_max) <= h_star { (c_max, h_of_c(c_max)) } else { (c_star, h_star) };
    let b_star = b_of_c(c_star)?;
    let mass = mass_of(p, b_star, c_star)?;
    Ok(MinimizerResult { B_star: b_star, c_star, H_star: h_star, mass, iterations: iterations + k })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_functionals_match_closed_forms() {
        // p = 4, B = 0, c = 1: M = √2π, H = −M/4.
        let (m, h) = family_functionals(&ModelParams::compacton(4.0, 0.0, 1.0)).unwrap();
        let root2pi = std::f64::consts::SQRT_2 * std::f64::consts::PI;
        assert!((m - root2pi).abs() < 1e-12);
        assert!((h + root2pi / 4.0).abs() < 1e-12);
        // p = 2, B = 1/2, c = 0: M = 4/3, H = −1/3.
        let (m, h) = family_functionals(&ModelParams::compacton(2.0, 0.5, 0.0)).unwrap();
        assert!((m - 4.0 / 3.0).abs() < 1e-12);
        assert!((h + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(minimize_in_family(9.0, 1.0).is_err());
        assert!(minimize_in_family(8.0, 1.0).is_err());
        assert!(minimize_in_family(3.0, -1.0).is_err());
    }
}
