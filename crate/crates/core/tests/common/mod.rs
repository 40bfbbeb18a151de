#![allow(dead_code)]

use std::f64::consts::PI;

use nmlkit::models::{DataBox, ExponentialFamily, Interval};
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ChiSquared, Continuous};

/// Normal distribution with unknown mean and variance, `T(x) = (x, x²)`,
/// `μ = (m, m² + v)`.
///
/// The expectation domain is `s > m²`, not a box; callers keep windows
/// inside it.
#[derive(Debug)]
pub struct FullNormal;

impl FullNormal {
    /// Exact density of `μ̂ = (x̄, mean of x²)` at the true `μ`: `x̄` and
    /// `Σ(x − x̄)²` are independent normal and scaled chi-squared.
    pub fn exact_g_diag(mu: &[f64], n: usize) -> f64 {
        let nf = n as f64;
        let v = mu[1] - mu[0] * mu[0];
        let chi = ChiSquared::new(nf - 1.0).unwrap();
        nf * (nf / (2.0 * PI * v)).sqrt() * chi.pdf(nf) / v
    }

    /// `√det I(μ) = 1 / (√2 v^{3/2})`.
    pub fn exact_root_det_fisher(mu: &[f64]) -> f64 {
        let v = mu[1] - mu[0] * mu[0];
        1.0 / (2f64.sqrt() * v.powf(1.5))
    }
}

impl ExponentialFamily for FullNormal {
    fn id(&self) -> &str {
        "full-normal"
    }
    fn param_dim(&self) -> usize {
        2
    }
    fn canonical_domain(&self) -> Vec<Interval> {
        vec![Interval::REAL_LINE, Interval::NEGATIVE]
    }
    fn expectation_domain(&self) -> Vec<Interval> {
        vec![Interval::REAL_LINE, Interval::POSITIVE]
    }
    fn data_support(&self) -> Interval {
        Interval::REAL_LINE
    }
    fn log_partition(&self, eta: &[Complex64]) -> Complex64 {
        let (a, b) = (eta[0], eta[1]);
        -a * a / (4.0 * b) + 0.5 * (Complex64::from(PI) / -b).ln()
    }
    fn sufficient_stat(&self, x: f64, out: &mut [f64]) {
        out[0] = x;
        out[1] = x * x;
    }
    fn log_base_measure(&self, _x: f64) -> f64 {
        0.0
    }
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64> {
        let v = mu[1] - mu[0] * mu[0];
        vec![mu[0] / v, -0.5 / v]
    }
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64> {
        let v = -0.5 / eta[1];
        let m = eta[0] * v;
        vec![m, m * m + v]
    }
    fn char_decay_exponent(&self) -> f64 {
        0.5
    }
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        mu[0] + (mu[1] - mu[0] * mu[0]).sqrt() * z
    }
    fn data_bounds(&self, window: &[(f64, f64)], _n: usize, tail: f64) -> DataBox {
        let z = (-2.0 * tail.ln()).sqrt();
        let s = window[1].1.sqrt();
        DataBox {
            lo: window[0].0 - z * s,
            hi: window[0].1 + z * s,
            tail_mass: tail,
        }
    }
}

/// Composite Simpson rule on `[a, b]` with `panels` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let inner: f64 = (1..panels)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64))
        .sum();
    (f(a) + inner + f(b)) * h / 3.0
}
