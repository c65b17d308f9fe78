//! Traveling-wave profiles of the degenerate equation from the first integral
//! `(φ')² = F(φ) = 2B/φ² + 2A/φ + c − (2/p)φ^{p−2}`.

mod multi;
mod nls;
pub(crate) mod orbit;
mod shape;
mod weak;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::newton_bisect;
pub use multi::{assemble_multi, Component, MultiCompacton};
pub use nls::{build_nls_compacton, nls_phase, NlsProfile, PhaseAsymptotics};
use orbit::{Lower, Orbit, Poly};
pub use shape::{CompactonProfile, CompactonShape, PeriodicProfile};
pub use weak::weak_residual;

/// Exponent and integration constants of one traveling-wave branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub c: f64,
}

impl ModelParams {
    pub fn new(p: f64, a: f64, b: f64, c: f64) -> Self {
        Self { p, a, b, c }
    }

    /// The `A = 0` branch.
    pub fn compacton(p: f64, b: f64, c: f64) -> Self {
        Self { p, a: 0.0, b, c }
    }

    pub(crate) fn poly(&self) -> Poly {
        Poly { p: self.p, a: self.a, b: self.b, c: self.c }
    }

    fn check_finite(&self) -> Result<()> {
        if [self.p, self.a, self.b, self.c].iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParams("parameters must be finite".into()))
        }
    }
}

/// `F_{A,B,c}(φ)` as written.
pub fn first_integral(phi: f64, params: &ModelParams) -> Result<f64> {
    let ModelParams { p, a, b, c } = *params;
    if phi == 0.0 {
        if a != 0.0 || b != 0.0 {
            return Err(Error::DivisionByZero { a, b });
        }
        return Ok(if p == 2.0 { c - 1.0 } else { c });
    }
    if phi < 0.0 {
        return Err(Error::InvalidParams(format!("phi must be nonnegative, got {phi}")));
    }
    Ok(2.0 * b / (phi * phi) + 2.0 * a / phi + c - 2.0 / p * phi.powf(p - 2.0))
}

/// Positive root of `z^e − cz − A` located by a log-spaced scan and refined
/// to relative tolerance 1e-12.
fn positive_root_of_power(a: f64, c: f64, e: f64) -> Option<f64> {
    let h = |z: f64| (z.powf(e) - c * z - a, e * z.powf(e - 1.0) - c);
    let n = 256;
    let (lo_exp, hi_exp) = (-6.0f64, 6.0f64);
    let mut prev_z = 10f64.powf(lo_exp);
    let mut prev = h(prev_z).0;
    if prev == 0.0 {
        return Some(prev_z);
    }
    for i in 1..=n {
        let z = 10f64.powf(lo_exp + (hi_exp - lo_exp) * i as f64 / n as f64);
        let v = h(z).0;
        if v == 0.0 {
            return Some(z);
        }
        if v.signum() != prev.signum() {
            return newton_bisect(h, prev_z, z, 1e-12);
        }
        prev = v;
        prev_z = z;
    }
    None
}

/// Positive solution of `A + cz = z^{p−2}`, if any.
pub fn stationary_point(a: f64, c: f64, p: f64) -> Option<f64> {
    if p <= 2.0 {
        return None;
    }
    positive_root_of_power(a, c, p - 2.0)
}

/// Constant solution of the profile equation, `A + cz = z^{p−1}`; this is the
/// critical point of `φ²F(φ)` where a front can level off.
pub fn equilibrium_point(a: f64, c: f64, p: f64) -> Option<f64> {
    if p <= 2.0 {
        return None;
    }
    positive_root_of_power(a, c, p - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolutionTag {
    Periodic,
    Front,
    Compacton,
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeCase {
    B_pos_A_nonzero,
    B_zero_A_pos,
    A_zero_B_pos,
    A_B_zero_c_pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionClass {
    pub tag: SolutionTag,
    pub edge_case: Option<EdgeCase>,
}

/// Upper bound `U` with `G(U) < 0`, found by doubling.
fn negative_bound(poly: &Poly) -> f64 {
    let mut u = 1.0;
    while poly.g(u) >= 0.0 && u < 1e150 {
        u *= 2.0;
    }
    u
}

/// First sign change of `G` in `(from, to]` with `G(from) > 0`, from a
/// 256-point scan refined by safeguarded Newton.
fn first_descent(poly: &Poly, from: f64, to: f64) -> Option<f64> {
    let n = 256;
    let h = (to - from) / n as f64;
    let mut prev = from;
    for i in 1..=n {
        let s = from + h * i as f64;
        if poly.g(s) <= 0.0 {
            return newton_bisect(|t| (poly.g(t), poly.dg(t)), prev, s, 1e-13);
        }
        prev = s;
    }
    None
}

/// Largest amplitude `φ_max`: first zero of `G` above 0 on a branch with
/// `G(0+) ≥ 0`.
fn phi_max(params: &ModelParams) -> Result<f64> {
    let poly = params.poly();
    let upper = negative_bound(&poly);
    // shrink the starting point until G is positive there.
    let mut start = upper / 256.0;
    let mut tries = 0;
    while poly.g(start) <= 0.0 {
        start /= 256.0;
        tries += 1;
        if tries > 20 {
            return Err(Error::NoPositiveSolution);
        }
    }
    let mut root = first_descent(&poly, start, upper).ok_or(Error::NoPositiveSolution)?;
    // a finer look below the first scan cell in case it held two roots.
    if let Some(r) = first_descent(&poly, start, root) {
        if r < root {
            root = r;
        }
    }
    Ok(root)
}

/// Scan for `max G` on `(0, U)`; positive iff some positive orbit exists.
fn max_g(poly: &Poly) -> (f64, f64) {
    let upper = negative_bound(poly);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 1..=2048 {
        let s = upper * (i as f64 / 2048.0).powi(2);
        let g = poly.g(s);
        if g > best.0 {
            best = (g, s);
        }
    }
    best
}

fn g_nonneg_at_zero(params: &ModelParams) -> bool {
    let ModelParams { a, b, c, .. } = *params;
    b > 0.0 || (b == 0.0 && a > 0.0) || (a == 0.0 && b == 0.0 && c > 0.0)
}

/// Which of the three maximal-solution types the parameters produce.
pub fn classify(params: &ModelParams) -> Result<SolutionClass> {
    params.check_finite()?;
    let ModelParams { p, a, b, c } = *params;
    if p <= 2.0 {
        return Err(Error::InvalidParams(format!("classification needs p > 2, got p = {p}")));
    }
    let poly = params.poly();
    if g_nonneg_at_zero(params) {
        if let Some(z) = equilibrium_point(a, c, p) {
            let fz = first_integral(z, params)?;
            if fz.abs() < 1e-10 * (1.0 + c.abs()) {
                let positive_below = (1..256).all(|i| poly.g(z * i as f64 / 256.0) > 0.0);
                if positive_below {
                    return Ok(SolutionClass { tag: SolutionTag::Front, edge_case: None });
                }
            }
        }
        let edge_case = if b > 0.0 && a != 0.0 {
            EdgeCase::B_pos_A_nonzero
        } else if b == 0.0 && a > 0.0 {
            EdgeCase::B_zero_A_pos
        } else if b > 0.0 {
            EdgeCase::A_zero_B_pos
        } else {
            EdgeCase::A_B_zero_c_pos
        };
        return Ok(SolutionClass { tag: SolutionTag::Compacton, edge_case: Some(edge_case) });
    }
    let (gmax, _) = max_g(&poly);
    if gmax > 0.0 {
        Ok(SolutionClass { tag: SolutionTag::Periodic, edge_case: None })
    } else {
        Err(Error::NoPositiveSolution)
    }
}

/// Explanation of why `(p, A, B, c)` does not give a compacton, if it does not.
pub fn compacton_violation(params: &ModelParams) -> Option<String> {
    let ModelParams { p, a, b, c } = *params;
    if !(p.is_finite() && a.is_finite() && b.is_finite() && c.is_finite()) {
        return Some("parameters must be finite".into());
    }
    if p == 2.0 {
        if a != 0.0 {
            return Some("p = 2 compactons need A = 0".into());
        }
        if !(b > 0.0 && c < 1.0) {
            return Some("p = 2 compactons need B > 0 and c < 1".into());
        }
        return None;
    }
    if p < 2.0 {
        return Some(format!("p must be at least 2, got {p}"));
    }
    if !g_nonneg_at_zero(params) {
        return Some("a compacton needs B > 0, or B = 0 and A > 0, or A = B = 0 and c > 0".into());
    }
    match classify(params) {
        Ok(SolutionClass { tag: SolutionTag::Compacton, .. }) => None,
        Ok(cls) => Some(format!("parameters give a {:?} solution, not a compacton", cls.tag)),
        Err(e) => Some(e.to_string()),
    }
}

pub(crate) fn compacton_orbit(params: &ModelParams) -> Result<Orbit> {
    if let Some(msg) = compacton_violation(params) {
        return Err(Error::InvalidParams(msg));
    }
    let top = if params.p == 2.0 {
        (2.0 * params.b / (1.0 - params.c)).sqrt()
    } else {
        phi_max(params)?
    };
    if params.poly().dg(top) >= 0.0 {
        return Err(Error::InvalidParams("the turning point of the profile is degenerate".into()));
    }
    Ok(Orbit::new(params.poly(), Lower::Zero, top))
}

/// Lower and upper turning points of a periodic orbit.
pub(crate) fn periodic_orbit(params: &ModelParams) -> Result<Orbit> {
    let cls = classify(params)?;
    if cls.tag != SolutionTag::Periodic {
        return Err(Error::InvalidParams(format!("parameters give a {:?} solution, not a periodic one", cls.tag)));
    }
    let poly = params.poly();
    let (gmax, smax) = max_g(&poly);
    debug_assert!(gmax > 0.0);
    let lo = newton_bisect(|t| (poly.g(t), poly.dg(t)), 0.0_f64.max(1e-300), smax, 1e-13)
        .ok_or_else(|| Error::InvalidParams("no lower turning point".into()))?;
    let hi_bound = negative_bound(&poly);
    let hi = newton_bisect(|t| (poly.g(t), poly.dg(t)), smax, hi_bound, 1e-13)
        .ok_or_else(|| Error::InvalidParams("no upper turning point".into()))?;
    Ok(Orbit::new(poly, Lower::Root(lo), hi))
}

/// Half-width `x_{B,c}` of the compacton support.
pub fn support_half_width(params: &ModelParams) -> Result<f64> {
    CompactonShape::new(params).map(|s| s.half_width())
}

/// Leading terms of `φ(−X + x)` as `(exponent, coefficient)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeExpansion {
    pub edge_case: EdgeCase,
    pub terms: Vec<(f64, f64)>,
}

impl EdgeExpansion {
    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(e, k)| k * x.powf(e)).sum()
    }
}

/// Edge expansion with `order` terms (at most two are known).
pub fn edge_expansion(params: &ModelParams, order: usize) -> Result<EdgeExpansion> {
    let cls = classify(params)?;
    let edge_case = cls
        .edge_case
        .ok_or_else(|| Error::InvalidParams(format!("parameters give a {:?} solution, not a compacton", cls.tag)))?;
    let ModelParams { a, b, c, .. } = *params;
    let mut terms = match edge_case {
        EdgeCase::B_pos_A_nonzero => {
            let r = (2.0 * b).sqrt();
            vec![(0.5, (2.0 * r).sqrt()), (1.0, 2.0 * a / (3.0 * r))]
        }
        EdgeCase::B_zero_A_pos => {
            let lead = 3f64.powf(2.0 / 3.0) * a.cbrt() / 2f64.cbrt();
            vec![(2.0 / 3.0, lead), (4.0 / 3.0, c * lead * lead / (10.0 * a))]
        }
        EdgeCase::A_zero_B_pos => {
            let r = (2.0 * b).sqrt();
            vec![(0.5, (2.0 * r).sqrt()), (1.5, c / (2f64.powf(1.5) * (2.0 * b).powf(0.25)))]
        }
        EdgeCase::A_B_zero_c_pos => vec![(1.0, c.sqrt())],
    };
    terms.truncate(order.max(1));
    Ok(EdgeExpansion { edge_case, terms })
}

/// Parameters of `λΦ_{B,c}(λ^{p/2−2}x)`.
pub fn scale_params(params: &ModelParams, lambda: f64) -> ModelParams {
    let p = params.p;
    ModelParams {
        p,
        a: params.a * lambda.powf(p - 1.0),
        b: params.b * lambda.powf(p),
        c: params.c * lambda.powf(p - 2.0),
    }
}

/// Sampled compacton on `n` points of `[−x_r, x_r]`.
pub fn build_compacton(params: &ModelParams, n: usize) -> Result<CompactonProfile> {
    CompactonShape::new(params)?.sample(n)
}

/// One period of a periodic profile on `n` points, maximum at `x = 0`.
pub fn build_periodic(params: &ModelParams, n: usize) -> Result<PeriodicProfile> {
    PeriodicProfile::build(params, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_integral_examples() {
        let q = ModelParams::compacton(4.0, 0.0, 1.0);
        assert_eq!(first_integral(1.0, &q).unwrap(), 0.5);
        assert!(first_integral(2f64.sqrt(), &q).unwrap().abs() < 1e-15);
        let b = ModelParams::compacton(4.0, 0.25, 1.0);
        assert!(matches!(first_integral(0.0, &b), Err(Error::DivisionByZero { .. })));
        let vals: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|&f| first_integral(f, &b).unwrap()).collect();
        assert!(vals[0] < vals[1] && vals[1] < vals[2]);
    }

    #[test]
    fn stationary_point_examples() {
        assert!((stationary_point(0.0, 1.0, 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((stationary_point(1.0, 0.0, 4.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(stationary_point(0.0, -1.0, 4.0).is_none());
        assert!(stationary_point(0.0, 1.0, 2.0).is_none());
    }

    #[test]
    fn classify_examples() {
        let per = classify(&ModelParams::compacton(4.0, -0.2, 1.0)).unwrap();
        assert_eq!(per.tag, SolutionTag::Periodic);
        assert_eq!(per.edge_case, None);
        let c = classify(&ModelParams::compacton(4.0, 0.25, 1.0)).unwrap();
        assert_eq!(c.edge_case, Some(EdgeCase::A_zero_B_pos));
        let c = classify(&ModelParams::compacton(4.0, 0.0, 1.0)).unwrap();
        assert_eq!(c.edge_case, Some(EdgeCase::A_B_zero_c_pos));
        let c = classify(&ModelParams::new(3.0, 1.0, 0.0, 0.5)).unwrap();
        assert_eq!(c.edge_case, Some(EdgeCase::B_zero_A_pos));
        let c = classify(&ModelParams::new(4.0, -0.1, 0.25, 1.0)).unwrap();
        assert_eq!(c.edge_case, Some(EdgeCase::B_pos_A_nonzero));
        assert!(classify(&ModelParams::compacton(2.0, 0.25, 0.0)).is_err());
        assert_eq!(classify(&ModelParams::compacton(4.0, 0.0, -1.0)), Err(Error::NoPositiveSolution));
        assert_eq!(classify(&ModelParams::compacton(4.0, -1.0, 1.0)), Err(Error::NoPositiveSolution));
    }

    #[test]
    fn front_is_detected_at_a_double_root() {
        // G(s) = (s − 1)²(−s²/2 − s + 2) is positive on [0, 1) with a double root at 1.
        let params = ModelParams::new(4.0, -2.5, 1.0, 3.5);
        assert_eq!(classify(&params).unwrap().tag, SolutionTag::Front);
        let nearby = ModelParams::new(4.0, -2.5, 1.01, 3.5);
        assert_eq!(classify(&nearby).unwrap().tag, SolutionTag::Compacton);
    }

    #[test]
    fn edge_expansion_examples() {
        let e = edge_expansion(&ModelParams::compacton(4.0, 0.0, 1.0), 2).unwrap();
        assert_eq!(e.terms[0], (1.0, 1.0));
        let e = edge_expansion(&ModelParams::compacton(4.0, 0.25, 1.0), 1).unwrap();
        assert!((e.terms[0].1 - 1.189207115002721).abs() < 1e-12);
        let e = edge_expansion(&ModelParams::new(3.0, 1.0, 0.0, 1.0), 1).unwrap();
        assert!((e.terms[0].1 - 1.650963624447313).abs() < 1e-12);
        assert!(edge_expansion(&ModelParams::compacton(4.0, -0.2, 1.0), 1).is_err());
    }

    #[test]
    fn scale_params_examples() {
        let q = ModelParams::compacton(4.0, 0.25, 1.0);
        assert_eq!(scale_params(&q, 1.0), q);
        let s = scale_params(&q, 2.0);
        assert_eq!((s.b, s.c), (4.0, 4.0));
    }

    #[test]
    fn half_width_examples() {
        let w = support_half_width(&ModelParams::compacton(4.0, 0.0, 1.0)).unwrap();
        assert!((w - std::f64::consts::PI / 2f64.sqrt()).abs() < 1e-14);
        let w = support_half_width(&ModelParams::compacton(4.0, 0.25, 0.0)).unwrap();
        assert!((w - std::f64::consts::PI / (2.0 * 2f64.sqrt())).abs() < 1e-14);
        let w = support_half_width(&ModelParams::compacton(2.0, 0.5, 0.0)).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert!(support_half_width(&ModelParams::compacton(4.0, 0.0, -1.0)).is_err());
        assert!(support_half_width(&ModelParams::compacton(2.0, 0.5, 1.5)).is_err());
    }
}
