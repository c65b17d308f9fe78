//! Fourier multipliers on a periodic grid.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::PeriodicGrid;

/// The regularized derivative `D_ν` with symbol `ik/(1 + νk⁴)`, optionally
/// restricted to `|k| ≤ (2/3)k_max`. The Nyquist mode is dropped.
pub(crate) struct Fourier {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    symbol: Vec<Complex64>,
}

impl Fourier {
    pub(crate) fn new(grid: &PeriodicGrid, nu: f64, dealias: bool) -> Self {
        let n = grid.n;
        let mut planner = FftPlanner::new();
        let cutoff = n as f64 / 3.0;
        let symbol = grid
            .wavenumbers
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let index = if j <= n / 2 { j as f64 } else { (n - j) as f64 };
                if j == n / 2 || (dealias && index > cutoff) {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, k / (1.0 + nu * k.powi(4)))
                }
            })
            .collect();
        Self { n, fwd: planner.plan_fft_forward(n), inv: planner.plan_fft_inverse(n), symbol }
    }

    /// Apply the multiplier `g(D_ν)` to real samples.
    pub(crate) fn apply<G: Fn(Complex64) -> Complex64>(&self, u: &[f64], g: G) -> Vec<f64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().zip(&self.symbol).for_each(|(b, &m)| *b *= g(m) * scale);
        self.inv.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    pub(crate) fn d(&self, u: &[f64]) -> Vec<f64> {
        self.apply(u, |m| m)
    }

    /// Shift by `a`: `u(x) ↦ u(x − a)`.
    pub(crate) fn translate(&self, u: &[f64], grid: &PeriodicGrid, a: f64) -> Vec<f64> {
        let mut buf: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fwd.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        for (j, b) in buf.iter_mut().enumerate() {
            let k = if j == self.n / 2 { 0.0 } else { grid.wavenumbers[j] };
            *b *= Complex64::from_polar(scale, -k * a);
        }
        self.inv.process(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }
}
