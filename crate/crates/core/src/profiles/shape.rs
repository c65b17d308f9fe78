use serde::Serialize;

use super::orbit::Orbit;
use super::{compacton_orbit, first_integral, periodic_orbit, ModelParams};
use crate::error::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone)]
enum Closed {
    /// p = 4, A = 0: Φ² = c + Z cos(√2 x).
    Quartic { z: f64 },
    /// p = 2, A = 0: Φ² = (1 − c)(x_r² − x²).
    Quadratic,
    None,
}

/// Evaluator for a single compacton `Φ_{A,B,c}` at arbitrary `x`.
#[derive(Debug, Clone)]
pub struct CompactonShape {
    params: ModelParams,
    orbit: Orbit,
    closed: Closed,
    half_width: f64,
}

impl CompactonShape {
    /// Closed form where one exists (p ∈ {2, 4}, A = 0), quadrature otherwise.
    pub fn new(params: &ModelParams) -> Result<Self> {
        let orbit = compacton_orbit(params)?;
        let ModelParams { p, a, b, c } = *params;
        let (closed, half_width) = if p == 4.0 && a == 0.0 {
            let z = (4.0 * b + c * c).sqrt();
            (Closed::Quartic { z }, (-c / z).clamp(-1.0, 1.0).acos() / SQRT2)
        } else if p == 2.0 {
            (Closed::Quadratic, (2.0 * b).sqrt() / (1.0 - c))
        } else {
            (Closed::None, orbit.length())
        };
        Ok(Self { params: *params, orbit, closed, half_width })
    }

    /// Always use the quadrature inversion, even when a closed form exists.
    pub fn by_quadrature(params: &ModelParams) -> Result<Self> {
        let orbit = compacton_orbit(params)?;
        let half_width = orbit.length();
        Ok(Self { params: *params, orbit, closed: Closed::None, half_width })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn amplitude(&self) -> f64 {
        self.orbit.upper
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self.closed, Closed::None)
    }

    pub(crate) fn orbit(&self) -> &Orbit {
        &self.orbit
    }

    /// `Φ(x)`, zero outside the support.
    pub fn value(&self, x: f64) -> f64 {
        let xr = self.half_width;
        if x.abs() >= xr {
            return 0.0;
        }
        match self.closed {
            Closed::Quartic { z } => {
                let sq = 2.0 * z * (SQRT2 * (xr + x) / 2.0).sin() * (SQRT2 * (xr - x) / 2.0).sin();
                sq.max(0.0).sqrt()
            }
            Closed::Quadratic => ((1.0 - self.params.c) * (xr - x.abs()) * (xr + x.abs())).sqrt(),
            Closed::None => self.orbit.invert(xr - x.abs()).unwrap_or(0.0),
        }
    }

    /// `Φ Φ'`, bounded up to the edges.
    pub fn flux(&self, x: f64) -> f64 {
        let xr = self.half_width;
        if x.abs() > xr {
            return 0.0;
        }
        match self.closed {
            Closed::Quartic { z } => -(z * SQRT2 / 2.0) * (SQRT2 * x).sin(),
            Closed::Quadratic => (self.params.c - 1.0) * x,
            Closed::None => self.flux_at_level(x, self.value(x)),
        }
    }

    fn flux_at_level(&self, x: f64, phi: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        -x.signum() * self.orbit.poly.g(phi).max(0.0).sqrt()
    }

    /// `Φ'(x)`; infinite at the edges when `Φ ∼ √d` or `d^{2/3}`.
    pub fn derivative(&self, x: f64) -> f64 {
        let phi = self.value(x);
        self.derivative_at(x, phi)
    }

    fn derivative_at(&self, x: f64, phi: f64) -> f64 {
        if x.abs() > self.half_width {
            return 0.0;
        }
        if phi > 0.0 {
            let flux = match self.closed {
                Closed::None => self.flux_at_level(x, phi),
                _ => self.flux(x),
            };
            return flux / phi;
        }
        let ModelParams { a, b, c, .. } = self.params;
        if b > 0.0 || a > 0.0 {
            -x.signum() * f64::INFINITY
        } else {
            -x.signum() * c.sqrt()
        }
    }

    /// Samples on `n` uniform points of `[−x_r, x_r]`, built on `x ≥ 0` and
    /// mirrored so the grid and the profile are exactly symmetric.
    pub fn sample(&self, n: usize) -> Result<CompactonProfile> {
        if n < 16 {
            return Err(Error::Grid(format!("profile needs at least 16 samples, got {n}")));
        }
        let xr = self.half_width;
        let mut xs = vec![0.0; n];
        let mut phi = vec![0.0; n];
        let mut dphi = vec![0.0; n];
        let mut flux = vec![0.0; n];
        let h = 2.0 * xr / (n - 1) as f64;
        let mut prev = f64::INFINITY;
        for i in (n / 2)..n {
            let j = n - 1 - i;
            let x = if i == n - 1 {
                xr
            } else if i == j {
                0.0
            } else {
                xr - h * (n - 1 - i) as f64
            };
            let v = if i == n - 1 { 0.0 } else { self.value(x) };
            if v > prev {
                return Err(Error::Inversion(format!("profile is not monotone at x = {x}")));
            }
            prev = v;
            let fl = match self.closed {
                Closed::None => self.flux_at_level(x, v),
                _ => self.flux(x),
            };
            let fl = if i == n - 1 && matches!(self.closed, Closed::None) {
                -(2.0 * self.params.b).max(0.0).sqrt()
            } else {
                fl
            };
            let d = self.derivative_at(x, v);
            xs[i] = x;
            phi[i] = v;
            flux[i] = fl;
            dphi[i] = d;
            if j != i {
                xs[j] = -x;
                phi[j] = v;
                flux[j] = -fl;
                dphi[j] = -d;
            }
        }
        Ok(CompactonProfile {
            params: self.params,
            half_width: xr,
            xs,
            phi,
            dphi,
            flux,
            closed_form: self.is_closed_form(),
        })
    }
}

/// Sampled compacton `Φ_{B,c}` on a uniform grid of its support.
#[derive(Debug, Clone, Serialize)]
pub struct CompactonProfile {
    pub params: ModelParams,
    pub half_width: f64,
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    /// `Φ'`; infinite at the endpoints when `B > 0`.
    pub dphi: Vec<f64>,
    /// `Φ Φ'`, finite everywhere.
    pub flux: Vec<f64>,
    pub closed_form: bool,
}

impl CompactonProfile {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dx(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    /// `max |(Φ')² − F(Φ)|` over interior samples.
    pub fn first_integral_residual(&self) -> f64 {
        residual(&self.params, &self.phi[1..self.len() - 1], &self.dphi[1..self.len() - 1])
    }
}

fn residual(params: &ModelParams, phi: &[f64], dphi: &[f64]) -> f64 {
    phi.iter()
        .zip(dphi)
        .map(|(&f, &d)| match first_integral(f, params) {
            Ok(v) => (d * d - v).abs(),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// One period of a positive periodic profile with its maximum at `x = 0`.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicProfile {
    pub params: ModelParams,
    pub period: f64,
    pub xs: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub closed_form: bool,
}

impl PeriodicProfile {
    pub(super) fn build(params: &ModelParams, n: usize) -> Result<Self> {
        if n < 16 {
            return Err(Error::Grid(format!("profile needs at least 16 samples, got {n}")));
        }
        let orbit = periodic_orbit(params)?;
        let ModelParams { p, a, b, c } = *params;
        let closed = p == 4.0 && a == 0.0 && 4.0 * b + c * c > 0.0;
        let z = (4.0 * b + c * c).sqrt();
        let period = if closed { SQRT2 * std::f64::consts::PI } else { 2.0 * orbit.length() };
        let half = period / 2.0;
        let h = period / (n - 1) as f64;
        let mut xs = vec![0.0; n];
        let mut phi = vec![0.0; n];
        let mut dphi = vec![0.0; n];
        for i in (n / 2)..n {
            let j = n - 1 - i;
            let x = if i == j { 0.0 } else { half - h * (n - 1 - i) as f64 };
            let (v, d) = if closed {
                let v = (c + z * (SQRT2 * x).cos()).sqrt();
                (v, -z * SQRT2 * (SQRT2 * x).sin() / (2.0 * v))
            } else {
                let v = orbit.invert(half - x).ok_or_else(|| Error::Inversion(format!("no level at x = {x}")))?;
                let d = if x == 0.0 { 0.0 } else { -x.signum() * orbit.poly.g(v).max(0.0).sqrt() / v };
                (v, d)
            };
            xs[i] = x;
            phi[i] = v;
            dphi[i] = d;
            if i != j {
                xs[j] = -x;
                phi[j] = v;
                dphi[j] = -d;
            }
        }
        Ok(Self { params: *params, period, xs, phi, dphi, closed_form: closed })
    }

    /// `max |(Φ')² − F(Φ)|` over all samples.
    pub fn first_integral_residual(&self) -> f64 {
        residual(&self.params, &self.phi, &self.dphi)
    }
}
