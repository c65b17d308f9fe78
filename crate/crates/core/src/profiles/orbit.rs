//! Quadrature along one arc of the level set `(φ')² = F(φ)`.
//!
//! Everything is written in terms of `G(s) = s² F(s)`, which is a smooth
//! function of `s ≥ 0`. Along the arc `dx = s ds / √G(s)`.

use crate::quadrature::adaptive;
use crate::roots::newton_bisect;

const TOL: f64 = 1e-14;

/// `G(s) = 2B + 2As + cs² − (2/p)s^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Poly {
    pub p: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Poly {
    pub fn g(&self, s: f64) -> f64 {
        2.0 * self.b + 2.0 * self.a * s + self.c * s * s - 2.0 / self.p * s.powf(self.p)
    }

    pub fn dg(&self, s: f64) -> f64 {
        2.0 * self.a + 2.0 * self.c * s - 2.0 * s.powf(self.p - 1.0)
    }

    pub fn ddg(&self, s: f64) -> f64 {
        2.0 * self.c - 2.0 * (self.p - 1.0) * s.powf(self.p - 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lower {
    /// The arc reaches `φ = 0` (compacton edge).
    Zero,
    /// The arc turns at a simple root of `G` (periodic minimum).
    Root(f64),
}

/// One monotone arc from `lower` up to the simple root `upper` of `G`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub poly: Poly,
    pub lower: Lower,
    pub upper: f64,
    split: f64,
    total: f64,
}

impl Orbit {
    pub fn new(poly: Poly, lower: Lower, upper: f64) -> Self {
        let lo = match lower {
            Lower::Zero => 0.0,
            Lower::Root(r) => r,
        };
        let split = 0.5 * (lo + upper);
        let mut orbit = Self { poly, lower, upper, split, total: 0.0 };
        let id = |s: f64| s;
        orbit.total = orbit.lower_between(lo, split, id) + orbit.upper_between(split, upper, id);
        orbit
    }

    pub fn lo(&self) -> f64 {
        match self.lower {
            Lower::Zero => 0.0,
            Lower::Root(r) => r,
        }
    }

    /// Length of the arc in `x`.
    pub fn length(&self) -> f64 {
        self.total
    }

    /// `G(s)/(upper − s)` with `s = upper − u²`.
    fn h_upper(&self, u: f64) -> f64 {
        let u2 = u * u;
        if u2 < 1e-6 * self.upper.max(1.0) {
            -self.poly.dg(self.upper) + 0.5 * self.poly.ddg(self.upper) * u2
        } else {
            self.poly.g(self.upper - u2) / u2
        }
    }

    /// `G(s)/(s − lo)` with `s = lo + w²`, for a root lower end.
    fn h_lower(&self, lo: f64, w: f64) -> f64 {
        let w2 = w * w;
        if w2 < 1e-6 * lo.max(1.0) {
            self.poly.dg(lo) + 0.5 * self.poly.ddg(lo) * w2
        } else {
            self.poly.g(lo + w2) / w2
        }
    }

    /// `∫_a^b weight(s)/√G(s) ds` on the lower half of the arc.
    fn lower_between<W: Fn(f64) -> f64>(&self, a: f64, b: f64, weight: W) -> f64 {
        let lo = self.lo();
        let wa = (a - lo).max(0.0).sqrt();
        let wb = (b - lo).max(0.0).sqrt();
        if wb <= wa {
            return 0.0;
        }
        match self.lower {
            Lower::Zero => adaptive(wa, wb, TOL, |w| {
                let s = w * w;
                2.0 * w * weight(s) / self.poly.g(s).sqrt()
            }),
            Lower::Root(lo) => adaptive(wa, wb, TOL, |w| 2.0 * weight(lo + w * w) / self.h_lower(lo, w).sqrt()),
        }
    }

    /// `∫_a^b weight(s)/√G(s) ds` on the upper half of the arc.
    fn upper_between<W: Fn(f64) -> f64>(&self, a: f64, b: f64, weight: W) -> f64 {
        let ua = (self.upper - b).max(0.0).sqrt();
        let ub = (self.upper - a).max(0.0).sqrt();
        if ub <= ua {
            return 0.0;
        }
        adaptive(ua, ub, TOL, |u| 2.0 * weight(self.upper - u * u) / self.h_upper(u).sqrt())
    }

    /// `∫_a^b weight(s)/√G(s) ds` for `lo ≤ a ≤ b ≤ upper`.
    pub fn integrate<W: Fn(f64) -> f64>(&self, a: f64, b: f64, weight: W) -> f64 {
        let a = a.clamp(self.lo(), self.upper);
        let b = b.clamp(self.lo(), self.upper);
        if b <= self.split {
            self.lower_between(a, b, weight)
        } else if a >= self.split {
            self.upper_between(a, b, weight)
        } else {
            self.lower_between(a, self.split, &weight) + self.upper_between(self.split, b, &weight)
        }
    }

    /// Distance in `x` from the lower end of the arc to the level `s`.
    pub fn distance(&self, s: f64) -> f64 {
        let id = |t: f64| t;
        if s <= self.split {
            self.lower_between(self.lo(), s, id)
        } else {
            self.total - self.upper_between(s, self.upper, id)
        }
    }

    /// Level `s` reached at distance `d` from the lower end.
    pub fn invert(&self, d: f64) -> Option<f64> {
        if d <= 0.0 {
            return Some(self.lo());
        }
        if d >= self.total {
            return Some(self.upper);
        }
        newton_bisect(
            |s| {
                let g = self.poly.g(s).max(0.0);
                (self.distance(s) - d, s / g.sqrt())
            },
            self.lo(),
            self.upper,
            1e-15,
        )
    }
}
