//! Quadrature rules shared by the profile, functional and spectral code.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 20-point rule.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(20))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }

    /// Composite rule over `panels` equal subintervals.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

/// Adaptive bisection on the shared 20-point rule. A panel is accepted when
/// its two halves agree with it to `tol` times the estimate of `∫|f|` over
/// the whole interval.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, mut f: F) -> f64 {
    let gl = GaussLegendre::standard();
    let whole = gl.integrate(a, b, &mut f);
    let magnitude = gl.integrate(a, b, |x| f(x).abs());
    let abs_tol = tol * magnitude.max(f64::MIN_POSITIVE);
    adaptive_step(gl, a, b, whole, abs_tol, 0, &mut f)
}

fn adaptive_step<F: FnMut(f64) -> f64>(
    gl: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    depth: usize,
    f: &mut F,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = gl.integrate(a, m, &mut *f);
    let right = gl.integrate(m, b, &mut *f);
    let refined = left + right;
    if depth >= 40 || (refined - whole).abs() <= abs_tol || a == m || m == b {
        return refined;
    }
    adaptive_step(gl, a, m, left, abs_tol, depth + 1, f) + adaptive_step(gl, m, b, right, abs_tol, depth + 1, f)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Simpson rule on a uniform grid; an even number of samples
/// closes with the 3/8 rule on the last three intervals.
pub fn simpson(values: &[f64], dx: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 {
        return Err(Error::Grid(format!("Simpson quadrature needs at least 3 samples, got {n}")));
    }
    let simpson_odd = |v: &[f64]| -> f64 {
        let m = v.len();
        let mut s = v[0] + v[m - 1];
        for (i, &y) in v.iter().enumerate().take(m - 1).skip(1) {
            s += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
        }
        s * dx / 3.0
    };
    if n % 2 == 1 {
        return Ok(simpson_odd(values));
    }
    if n == 4 {
        return Ok(3.0 * dx / 8.0 * (values[0] + 3.0 * values[1] + 3.0 * values[2] + values[3]));
    }
    let head = simpson_odd(&values[..n - 3]);
    let t = &values[n - 4..];
    Ok(head + 3.0 * dx / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]))
}

/// Trapezoidal rule for samples of a periodic function (last point not repeated).
pub fn periodic_trapezoid(values: &[f64], dx: f64) -> f64 {
    values.iter().sum::<f64>() * dx
}

/// Running integral `∫_{left}^{x_i} g` at cell centres `x_i = left + (i + 1/2) h`.
///
/// Interior increments use the four-point rule
/// `h/24 (-g_{i-1} + 13 g_i + 13 g_{i+1} - g_{i+2})`; the half cell next to
/// the left edge and the one-sided increments use quadratic interpolation.
pub fn cumulative_cell_centered(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut out = vec![0.0; n];
    if n == 0 {
        return out;
    }
    if n < 4 {
        let mut acc = 0.5 * h * g[0];
        out[0] = acc;
        for i in 1..n {
            acc += 0.5 * h * (g[i - 1] + g[i]);
            out[i] = acc;
        }
        return out;
    }
    // ∫ over [-h/2, 0] relative to the first centre, quadratic through g0,g1,g2.
    out[0] = h * (17.0 * g[0] - 7.0 * g[1] + 2.0 * g[2]) / 24.0;
    for i in 0..n - 1 {
        let inc = if i == 0 {
            h * (5.0 * g[0] + 8.0 * g[1] - g[2]) / 12.0
        } else if i + 2 >= n {
            h * (-g[i - 1] + 8.0 * g[i] + 5.0 * g[i + 1]) / 12.0
        } else {
            h * (-g[i - 1] + 13.0 * g[i] + 13.0 * g[i + 1] - g[i + 2]) / 24.0
        };
        out[i + 1] = out[i] + inc;
    }
    out
}

/// Total integral over `[left, left + n h]` from cell-centred samples.
pub fn cell_centered_total(g: &[f64], h: f64) -> f64 {
    let n = g.len();
    if n < 4 {
        return g.iter().sum::<f64>() * h;
    }
    let cum = cumulative_cell_centered(g, h);
    // last half cell mirrors the first.
    cum[n - 1] + h * (17.0 * g[n - 1] - 7.0 * g[n - 2] + 2.0 * g[n - 3]) / 24.0
}
