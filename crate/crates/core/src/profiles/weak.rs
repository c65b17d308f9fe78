use super::CompactonShape;

/// Distributional residual of `−cφ' + (φ(φφ')' + φ^{p−1})' = 0` against a
/// test function, with `φ` extended by zero outside its support.
///
/// `test_fn(x)` returns `[ψ, ψ', ψ'']`. The pairing is
/// `−∫(−cφ + φ^{p−1})ψ' + ∫φφ'(φ'ψ' + φψ'')`, computed in the level variable
/// `s = φ` on each half of the support so the edge singularities of `φ'`
/// cancel analytically. It vanishes for `A = 0`; for `A ≠ 0` it equals
/// `A(ψ(−x_r) − ψ(x_r))`.
pub fn weak_residual<T: Fn(f64) -> [f64; 3]>(shape: &CompactonShape, test_fn: T) -> f64 {
    let orbit = shape.orbit();
    let poly = orbit.poly;
    let (p, c) = (poly.p, poly.c);
    let xr = orbit.length();
    let half = |side: f64| {
        orbit.integrate(0.0, orbit.upper, |s| {
            let x = side * (xr - orbit.distance(s));
            let [_, d1, d2] = test_fn(x);
            let g = poly.g(s).max(0.0);
            let bulk = -(-c * s + s.powf(p - 1.0)) * s * d1;
            bulk + g * d1 - side * s * s * g.sqrt() * d2
        })
    };
    half(1.0) + half(-1.0)
}
