use std::f64::consts::{PI, SQRT_2};

use compacton::profiles::{
    assemble_multi, build_compacton, build_nls_compacton, build_periodic, edge_expansion, scale_params,
    support_half_width, weak_residual, CompactonShape, Component, ModelParams, MultiCompacton, PhaseAsymptotics,
};
use compacton::quadrature::simpson;
use proptest::prelude::*;

fn quartic_oracle(b: f64, c: f64, x: f64) -> f64 {
    let z = (4.0 * b + c * c).sqrt();
    (c + z * (SQRT_2 * x).cos()).max(0.0).sqrt()
}

#[test]
fn closed_form_values_at_the_center() {
    let p = build_compacton(&ModelParams::compacton(4.0, 0.0, 1.0), 4097).unwrap();
    assert!((p.phi[2048] - SQRT_2).abs() < 1e-15);
    let p = build_compacton(&ModelParams::compacton(4.0, 0.25, 1.0), 4097).unwrap();
    assert!((p.phi[2048] - (1.0 + SQRT_2).sqrt()).abs() < 1e-15);
    assert!(p.closed_form);
}

#[test]
fn quartic_profile_matches_direct_cosine_formula() {
    for (b, c) in [(0.0, 1.0), (0.25, 1.0), (0.25, 0.0), (0.25, -1.0), (1.0, 2.0)] {
        let prof = build_compacton(&ModelParams::compacton(4.0, b, c), 1001).unwrap();
        for (x, v) in prof.xs.iter().zip(&prof.phi) {
            assert!((v - quartic_oracle(b, c, *x)).abs() < 1e-7, "B = {b}, c = {c}, x = {x}");
        }
    }
}

#[test]
fn profile_invariants_hold_for_every_branch() {
    let cases = [(4.0, 0.0, 1.0), (4.0, 0.25, 1.0), (4.0, 0.25, 0.0), (4.0, 0.25, -1.0), (2.0, 0.5, 0.0), (3.0, 0.25, 1.0)];
    for (p, b, c) in cases {
        let prof = build_compacton(&ModelParams::compacton(p, b, c), 4096).unwrap();
        let n = prof.len();
        assert!(prof.first_integral_residual() < 1e-8, "({p},{b},{c}): {}", prof.first_integral_residual());
        assert_eq!(prof.phi[0], 0.0);
        assert_eq!(prof.phi[n - 1], 0.0);
        assert_eq!(prof.xs[0], -prof.half_width);
        for i in 0..n {
            assert_eq!(prof.phi[i], prof.phi[n - 1 - i]);
            assert_eq!(prof.xs[i], -prof.xs[n - 1 - i]);
        }
        assert!(prof.phi[1..n - 1].iter().all(|&v| v > 0.0));
        for i in n / 2..n - 1 {
            assert!(prof.phi[i + 1] <= prof.phi[i]);
        }
        // (ΦΦ')² → 2B at the edge: Lagrange extrapolation in t = √(x_r − x),
        // in which the flux is smooth.
        let pts: Vec<(f64, f64)> = (1..=6)
            .map(|k| ((prof.half_width - prof.xs[n - 1 - k]).sqrt(), prof.flux[n - 1 - k].powi(2)))
            .collect();
        let edge: f64 = pts
            .iter()
            .enumerate()
            .map(|(i, &(ti, fi))| {
                let w: f64 = pts.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &(tj, _))| tj / (tj - ti)).product();
                w * fi
            })
            .sum();
        assert!((edge - 2.0 * b).abs() < 1e-6, "({p},{b},{c}): edge flux² {edge}");
    }
}

#[test]
fn quadrature_derivative_agrees_with_finite_differences() {
    // Φ' is stored from the first integral; check it against the sampled values.
    let shape = CompactonShape::new(&ModelParams::compacton(3.0, 0.25, 1.0)).unwrap();
    let xr = shape.half_width();
    let h = 1e-3;
    for k in 1..40 {
        let x = -0.9 * xr + 1.8 * xr * k as f64 / 40.0;
        let fd = (-shape.value(x + 2.0 * h) + 8.0 * shape.value(x + h) - 8.0 * shape.value(x - h)
            + shape.value(x - 2.0 * h))
            / (12.0 * h);
        assert!((fd - shape.derivative(x)).abs() < 1e-8, "x = {x}");
    }
}

#[test]
fn quadrature_builder_matches_quartic_closed_form() {
    for (b, c) in [(0.0, 1.0), (0.25, 1.0), (0.25, 0.0), (0.25, -1.0)] {
        let params = ModelParams::compacton(4.0, b, c);
        let closed = CompactonShape::new(&params).unwrap();
        let quad = CompactonShape::by_quadrature(&params).unwrap();
        assert!((closed.half_width() - quad.half_width()).abs() < 1e-12);
        let a = closed.sample(2001).unwrap();
        let q = quad.sample(2001).unwrap();
        let dev = a.phi.iter().zip(&q.phi).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(dev < 1e-6, "B = {b}, c = {c}: {dev}");
    }
}

#[test]
fn half_widths() {
    let w = support_half_width(&ModelParams::compacton(4.0, 0.25, 1.0)).unwrap();
    assert!((w - 3.0 * PI / (4.0 * SQRT_2)).abs() < 1e-14);
    // general p: the arc-length quadrature against a brute-force midpoint sum
    // in the angle variable s = φ_max sin τ.
    let params = ModelParams::compacton(3.0, 0.25, 1.0);
    let shape = CompactonShape::new(&params).unwrap();
    let top = shape.amplitude();
    let g = |s: f64| 0.5 + s * s - 2.0 / 3.0 * s.powi(3);
    let m = 200_000;
    let mut sum = 0.0;
    for i in 0..m {
        let tau = (i as f64 + 0.5) * (PI / 2.0) / m as f64;
        let s = top * tau.sin();
        let ds = top * tau.cos();
        sum += s * ds / g(s).sqrt();
    }
    sum *= (PI / 2.0) / m as f64;
    assert!((shape.half_width() - sum).abs() < 1e-9, "{} vs {sum}", shape.half_width());
}

#[test]
fn periodic_extremes_and_period() {
    let per = build_periodic(&ModelParams::compacton(4.0, -0.2, 1.0), 1025).unwrap();
    let max = per.phi.iter().cloned().fold(f64::MIN, f64::max);
    let min = per.phi.iter().cloned().fold(f64::MAX, f64::min);
    assert!((max - (1.0 + 0.2f64.sqrt()).sqrt()).abs() < 1e-12);
    assert!((min - (1.0 - 0.2f64.sqrt()).sqrt()).abs() < 1e-12);
    assert!((per.period - SQRT_2 * PI).abs() < 1e-14);
    assert!(per.first_integral_residual() < 1e-10);

    let near = build_periodic(&ModelParams::compacton(4.0, -1e-10, 1.0), 1025).unwrap();
    let min = near.phi.iter().cloned().fold(f64::MAX, f64::min);
    assert!(min < 1e-4);
    let xr = support_half_width(&ModelParams::compacton(4.0, 0.0, 1.0)).unwrap();
    assert!((near.period - 2.0 * xr).abs() < 1e-12);
}

#[test]
fn general_p_periodic_profile() {
    let params = ModelParams::compacton(3.0, -0.05, 1.0);
    let per = build_periodic(&params, 513).unwrap();
    assert!(!per.closed_form);
    assert!(per.phi.iter().all(|&v| v > 0.0));
    assert!(per.first_integral_residual() < 1e-8);
    assert!(build_periodic(&ModelParams::compacton(3.0, 0.25, 1.0), 513).is_err());
}

#[test]
fn edge_expansions_track_the_profiles() {
    for params in [
        ModelParams::compacton(3.0, 0.25, 1.0),
        ModelParams::compacton(4.0, 0.0, 1.0),
        ModelParams::new(3.0, 1.0, 0.0, 1.0),
        ModelParams::new(4.0, 0.3, 0.25, 1.0),
    ] {
        let shape = CompactonShape::new(&params).unwrap();
        let e1 = edge_expansion(&params, 1).unwrap();
        let e2 = edge_expansion(&params, 2).unwrap();
        let xr = shape.half_width();
        for d in [1e-3, 1e-4] {
            let v = shape.value(-xr + d);
            let err1 = (v - e1.eval(d)).abs();
            let err2 = (v - e2.eval(d)).abs();
            assert!(err2 <= err1 + 1e-12, "{params:?} at d = {d}: {err2} > {err1}");
            assert!(err2 < 0.05 * v, "{params:?} at d = {d}");
        }
    }
}

#[test]
fn weak_defect_for_nonzero_a() {
    let params = ModelParams::new(4.0, 0.3, 0.25, 1.0);
    let shape = CompactonShape::new(&params).unwrap();
    let xr = shape.half_width();
    let k = PI / (2.0 * xr);
    // ψ = (1 − sin(kx))/2: ψ(−x_r) = 1, ψ(x_r) = 0.
    let psi = |x: f64| [(1.0 - (k * x).sin()) / 2.0, -k * (k * x).cos() / 2.0, k * k * (k * x).sin() / 2.0];
    assert!((weak_residual(&shape, psi) - 0.3).abs() < 1e-8);
    let a = ModelParams::new(3.0, -0.2, 0.5, 0.5);
    let shape = CompactonShape::new(&a).unwrap();
    let xr = shape.half_width();
    let psi = |x: f64| {
        let e = (0.7 * x).exp();
        [e, 0.7 * e, 0.49 * e]
    };
    let expected = -0.2 * ((-0.7 * xr).exp() - (0.7 * xr).exp());
    assert!((weak_residual(&shape, psi) - expected).abs() < 1e-8);
}

#[test]
fn multi_compacton_mass_is_additive() {
    let comp = |a: f64| Component { sign: 1.0, shift: a, params: ModelParams::compacton(4.0, 0.0, 1.0) };
    let spec = MultiCompacton { components: vec![comp(-10.0), comp(10.0)] };
    let n = 40_001;
    let dx = 40.0 / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| -20.0 + dx * i as f64).collect();
    let u = assemble_multi(&spec, &grid).unwrap();
    let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    let mass = simpson(&sq, dx).unwrap();
    assert!((mass - 2.0 * SQRT_2 * PI).abs() < 1e-8, "{mass}");
}

#[test]
fn nls_phase_properties() {
    for (b, c, v) in [(0.25, 1.0, 1.0), (0.25, -1.0, 2.0), (0.0, 1.0, 1.0)] {
        let q = build_nls_compacton(&ModelParams::compacton(4.0, b, c), v, 2049).unwrap();
        let n = q.theta.len();
        assert_eq!(q.theta[n / 2], 0.0);
        for i in 0..n {
            assert_eq!(q.theta[i], -q.theta[n - 1 - i]);
            let modulus = q.re[i].hypot(q.im[i]);
            assert!((modulus - q.base.phi[i]).abs() <= 1e-15 * q.base.phi[i].max(1.0));
        }
        // θ'·2Φ² = −1 from centred differences away from the edges.
        let h = q.base.dx();
        for i in (n / 8)..(7 * n / 8) {
            let d = (-q.theta[i + 2] + 8.0 * q.theta[i + 1] - 8.0 * q.theta[i - 1] + q.theta[i - 2]) / (12.0 * h);
            let d2 = d * 2.0 * q.base.phi[i].powi(2);
            assert!((d2 + 1.0).abs() < 1e-7, "B = {b}, c = {c}, i = {i}: {d2}");
        }
    }
}

#[test]
fn phase_blows_up_at_the_stated_rate() {
    let q = build_nls_compacton(&ModelParams::compacton(4.0, 0.0, 1.0), 1.0, 1 << 14).unwrap();
    let PhaseAsymptotics::Pole { coefficient } = q.asymptotics else { panic!() };
    assert!((coefficient + 0.5).abs() < 1e-15);
    let n = q.theta.len();
    let s = q.base.half_width - q.base.xs[n - 2];
    assert!((q.theta[n - 2] * s - coefficient).abs() < 1e-3);

    let q = build_nls_compacton(&ModelParams::compacton(4.0, 0.25, 1.0), 1.0, 1 << 14).unwrap();
    let PhaseAsymptotics::Log { coefficient } = q.asymptotics else { panic!() };
    assert!((coefficient - 1.0 / (4.0 * 0.5f64.sqrt())).abs() < 1e-15);
    // slope of θ against log s between two near-edge samples.
    let n = q.theta.len();
    let xr = q.base.half_width;
    let (s1, s2) = (xr - q.base.xs[n - 2], xr - q.base.xs[n - 65]);
    let slope = (q.theta[n - 2] - q.theta[n - 65]) / (s1.ln() - s2.ln());
    assert!((slope - coefficient).abs() < 1e-2, "{slope}");
}

#[test]
fn scaled_amplitude() {
    let params = ModelParams::compacton(4.0, 0.25, 1.0);
    let scaled = scale_params(&params, 2.0);
    let prof = build_compacton(&scaled, 1025).unwrap();
    assert!((prof.phi[512] - 2.0 * (1.0 + SQRT_2).sqrt()).abs() < 1e-13);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_identity_quartic(lambda in 0.5f64..2.0, b in 0.0f64..1.0, c in 0.1f64..2.0, t in -0.99f64..0.99) {
        let params = ModelParams::compacton(4.0, b, c);
        let base = CompactonShape::new(&params).unwrap();
        let scaled = CompactonShape::new(&scale_params(&params, lambda)).unwrap();
        let x = t * scaled.half_width();
        let lhs = lambda * base.value(x);
        prop_assert!((lhs - scaled.value(x)).abs() < 1e-8);
    }

    #[test]
    fn scaling_identity_quadrature(lambda in 0.5f64..2.0, t in -0.99f64..0.99) {
        let params = ModelParams::compacton(3.0, 0.25, 1.0);
        let base = CompactonShape::new(&params).unwrap();
        let scaled = CompactonShape::new(&scale_params(&params, lambda)).unwrap();
        let x = t * scaled.half_width();
        let lhs = lambda * base.value(lambda.powf(3.0 / 2.0 - 2.0) * x);
        prop_assert!((lhs - scaled.value(x)).abs() < 1e-6);
    }
}
