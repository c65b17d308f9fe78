use serde::Serialize;

use super::{compacton_orbit, CompactonProfile, CompactonShape, ModelParams};
use crate::error::{Error, Result};

/// Behaviour of `θ(x_r − s)` as `s → 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PhaseAsymptotics {
    /// `θ ≈ coefficient / s` (B = 0).
    Pole { coefficient: f64 },
    /// `θ ≈ coefficient · log s` (B > 0).
    Log { coefficient: f64 },
}

/// `Q = Φ e^{ivθ}` with `θ' = −1/(2Φ²)`, `θ(0) = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct NlsProfile {
    pub base: CompactonProfile,
    pub v: f64,
    pub theta: Vec<f64>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub asymptotics: PhaseAsymptotics,
}

/// Phase `θ(x) = −∫_0^x dy/(2Φ²)` on the profile grid.
///
/// For `x > 0` this is `−∫_{Φ(x)}^{φ_max} ds/(2s√G(s))` along the level set,
/// which avoids differentiating or dividing by the sampled profile. The
/// endpoints carry `θ(±x_r) = ∓∞`.
pub fn nls_phase(base: &CompactonProfile) -> Result<(Vec<f64>, PhaseAsymptotics)> {
    let ModelParams { a, b, c, .. } = base.params;
    if a != 0.0 {
        return Err(Error::InvalidParams("the NLS phase is defined on the A = 0 branch".into()));
    }
    let n = base.len();
    if base.phi[1..n - 1].iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidParams("profile has non-positive interior values".into()));
    }
    let orbit = compacton_orbit(&base.params)?;
    let mut theta = vec![0.0; n];
    for i in (n / 2)..n {
        let j = n - 1 - i;
        let x = base.xs[i];
        let t = if i == n - 1 {
            -f64::INFINITY
        } else if x == 0.0 {
            0.0
        } else {
            let level = base.phi[i].min(orbit.upper);
            -orbit.integrate(level, orbit.upper, |s| 0.5 / s)
        };
        theta[i] = t;
        theta[j] = -t;
    }
    let asymptotics = if b > 0.0 {
        PhaseAsymptotics::Log { coefficient: 1.0 / (4.0 * (2.0 * b).sqrt()) }
    } else {
        PhaseAsymptotics::Pole { coefficient: -1.0 / (2.0 * c) }
    };
    Ok((theta, asymptotics))
}

/// NLS compacton `Q^v_{B,c}` sampled on `n` points of its support.
pub fn build_nls_compacton(params: &ModelParams, v: f64, n: usize) -> Result<NlsProfile> {
    let base = CompactonShape::new(params)?.sample(n)?;
    let (theta, asymptotics) = nls_phase(&base)?;
    let (re, im) = base
        .phi
        .iter()
        .zip(&theta)
        .map(|(&f, &t)| {
            if f == 0.0 {
                (0.0, 0.0)
            } else {
                let arg = v * t;
                (f * arg.cos(), f * arg.sin())
            }
        })
        .unzip();
    Ok(NlsProfile { base, v, theta, re, im, asymptotics })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_matches_tangent_for_b_zero() {
        let q = build_nls_compacton(&ModelParams::compacton(4.0, 0.0, 1.0), 1.0, 257).unwrap();
        for (x, t) in q.base.xs.iter().zip(&q.theta).skip(1).take(255) {
            let exact = -(2f64.sqrt() / 4.0) * (x / 2f64.sqrt()).tan();
            assert!((t - exact).abs() < 1e-10 * (1.0 + exact.abs()), "x = {x}: {t} vs {exact}");
        }
        assert_eq!(q.theta[128], 0.0);
        assert_eq!(q.theta[256], -f64::INFINITY);
    }

    #[test]
    fn zero_speed_has_no_imaginary_part() {
        let q = build_nls_compacton(&ModelParams::compacton(4.0, 0.25, 1.0), 0.0, 64).unwrap();
        assert!(q.im.iter().all(|&v| v == 0.0));
        assert_eq!(q.re, q.base.phi);
    }
}
