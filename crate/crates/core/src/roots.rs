//! Bracketed root finding: bisection safeguarded Newton iterations.

/// Find a root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign.
///
/// `fd` returns the value and derivative. Newton steps that leave the current
/// bracket, or that fail to halve it, fall back to bisection. Terminates when
/// the bracket is below `rtol * max(|x|, tiny)` or the residual vanishes.
pub fn newton_bisect<F>(mut fd: F, mut lo: f64, mut hi: f64, rtol: f64) -> Option<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut flo, _) = fd(lo);
    let (fhi, _) = fd(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    let mut x = 0.5 * (lo + hi);
    let mut last_width = (hi - lo).abs();
    for _ in 0..200 {
        let (fx, dfx) = fd(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let width = (hi - lo).abs();
        if width <= rtol * x.abs().max(1e-300) {
            return Some(0.5 * (lo + hi));
        }
        let newton = x - fx / dfx;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        let inside = dfx.is_finite() && dfx != 0.0 && newton > a && newton < b;
        let step_ok = inside && (newton - x).abs() < 0.5 * last_width;
        last_width = width;
        x = if step_ok { newton } else { 0.5 * (lo + hi) };
        if step_ok && (fx / dfx).abs() <= 0.25 * rtol * x.abs() {
            return Some(x);
        }
    }
    Some(x)
}

/// Pure bisection on a sign change; used where no derivative is available.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, rtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() <= rtol * mid.abs().max(1e-300) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section minimisation of a unimodal function on `[a, b]`.
/// Returns `(argmin, min, iterations)`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, usize) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut it = 0;
    while (b - a).abs() > tol && it < 500 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
        it += 1;
    }
    if fc < fd {
        (c, fc, it)
    } else {
        (d, fd, it)
    }
}
