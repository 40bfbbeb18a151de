//! The six exponential families with closed-form partition functions.
//!
//! Each family carries the constant parts of its normalizer in `log Z` so
//! that `h(x) exp(ηT(x)) / Z(η)` is a normalized density.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use super::{DataBox, ExponentialFamily, Interval};
use crate::closed_form::ClosedFormFamily;
use crate::specialfn::{digamma, inverse_digamma, ln_gamma, log_gamma_complex};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn re(eta: &[Complex64]) -> Complex64 {
    eta[0]
}

/// Normal distribution with known variance σ²; `T(x) = x`, `η = μ/σ²`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalKnownVariance {
    pub sigma2: f64,
}

impl ExponentialFamily for NormalKnownVariance {
    fn id(&self) -> &str {
        "normal-known-variance"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn canonical_domain(&self) -> Vec<Interval> {
        vec![Interval::REAL_LINE]
    }
    fn expectation_domain(&self) -> Vec<Interval> {
        vec![Interval::REAL_LINE]
    }
    fn data_support(&self) -> Interval {
        Interval::REAL_LINE
    }
    fn log_partition(&self, eta: &[Complex64]) -> Complex64 {
        let e = re(eta);
        0.5 * self.sigma2 * e * e + 0.5 * (LN_2PI + self.sigma2.ln())
    }
    fn sufficient_stat(&self, x: f64, out: &mut [f64]) {
        out[0] = x;
    }
    fn log_base_measure(&self, x: f64) -> f64 {
        -0.5 * x * x / self.sigma2
    }
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64> {
        vec![mu[0] / self.sigma2]
    }
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64> {
        vec![self.sigma2 * eta[0]]
    }
    fn char_decay_exponent(&self) -> f64 {
        f64::INFINITY
    }
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        mu[0] + self.sigma2.sqrt() * z
    }
    fn closed_form(&self) -> Option<ClosedFormFamily> {
        Some(ClosedFormFamily::FixedVariance { d: self.sigma2 })
    }
    fn statistic_preimage(&self, lo: f64, hi: f64) -> Option<Vec<(f64, f64)>> {
        Some(if lo <= hi { vec![(lo, hi)] } else { vec![] })
    }
    fn data_bounds(&self, window: &[(f64, f64)], _n: usize, tail: f64) -> DataBox {
        let z = normal_quantile_bound(tail);
        let s = self.sigma2.sqrt();
        DataBox {
            lo: window[0].0 - z * s,
            hi: window[0].1 + z * s,
            tail_mass: tail,
        }
    }
}

/// Normal distribution with known mean; the parameter is the variance.
/// `T(x) = (x − mean)²`, `η = −1/(2σ²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalKnownMean {
    pub mean: f64,
}

impl ExponentialFamily for NormalKnownMean {
    fn id(&self) -> &str {
        "normal-known-mean"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn canonical_domain(&self) -> Vec<Interval> {
        vec![Interval::NEGATIVE]
    }
    fn expectation_domain(&self) -> Vec<Interval> {
        vec![Interval::POSITIVE]
    }
    fn data_support(&self) -> Interval {
        Interval::REAL_LINE
    }
    fn log_partition(&self, eta: &[Complex64]) -> Complex64 {
        0.5 * PI.ln() - 0.5 * (-re(eta)).ln()
    }
    fn sufficient_stat(&self, x: f64, out: &mut [f64]) {
        let d = x - self.mean;
        out[0] = d * d;
    }
    fn log_base_measure(&self, _x: f64) -> f64 {
        0.0
    }
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64> {
        vec![-0.5 / mu[0]]
    }
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64> {
        vec![-0.5 / eta[0]]
    }
    fn char_decay_exponent(&self) -> f64 {
        0.5
    }
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.mean + mu[0].sqrt() * z
    }
    fn closed_form(&self) -> Option<ClosedFormFamily> {
        Some(ClosedFormFamily::ExponentialType { c: 0.5, m: 0.5 })
    }
    fn statistic_preimage(&self, lo: f64, hi: f64) -> Option<Vec<(f64, f64)>> {
        Some(symmetric_preimage(self.mean, lo.max(0.0).sqrt(), hi.max(0.0).sqrt(), hi >= 0.0))
    }
    fn data_bounds(&self, window: &[(f64, f64)], n: usize, _tail: f64) -> DataBox {
        // Σ T(xᵢ) ≤ n·μ_max bounds every datum exactly.
        let r = (n as f64 * window[0].1).sqrt();
        DataBox {
            lo: self.mean - r,
            hi: self.mean + r,
            tail_mass: 0.0,
        }
    }
}

/// Laplace distribution with known mean; the parameter is the scale b.
/// `T(x) = |x − mean|`, `η = −1/b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceKnownMean {
    pub mean: f64,
}

impl ExponentialFamily for LaplaceKnownMean {
    fn id(&self) -> &str {
        "laplace-known-mean"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn canonical_domain(&self) -> Vec<Interval> {
        vec![Interval::NEGATIVE]
    }
    fn expectation_domain(&self) -> Vec<Interval> {
        vec![Interval::POSITIVE]
    }
    fn data_support(&self) -> Interval {
        Interval::REAL_LINE
    }
    fn log_partition(&self, eta: &[Complex64]) -> Complex64 {
        2f64.ln() - (-re(eta)).ln()
    }
    fn sufficient_stat(&self, x: f64, out: &mut [f64]) {
        out[0] = (x - self.mean).abs();
    }
    fn log_base_measure(&self, _x: f64) -> f64 {
        0.0
    }
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64> {
        vec![-1.0 / mu[0]]
    }
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64> {
        vec![-1.0 / eta[0]]
    }
    fn char_decay_exponent(&self) -> f64 {
        1.0
    }
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64 {
        let e: f64 = Exp1.sample(rng);
        let sign = if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 };
        self.mean + sign * mu[0] * e
    }
    fn closed_form(&self) -> Option<ClosedFormFamily> {
        Some(ClosedFormFamily::ExponentialType { c: 1.0, m: 1.0 })
    }
    fn statistic_preimage(&self, lo: f64, hi: f64) -> Option<Vec<(f64, f64)>> {
        Some(symmetric_preimage(self.mean, lo.max(0.0), hi, hi >= 0.0))
    }
    fn data_bounds(&self, window: &[(f64, f64)], n: usize, _tail: f64) -> DataBox {
        let r = n as f64 * window[0].1;
        DataBox {
            lo: self.mean - r,
            hi: self.mean + r,
            tail_mass: 0.0,
        }
    }
}

/// Gamma distribution with known shape κ, parameterized by its mean;
/// `T(x) = x`, `η = −κ/μ`. κ = 1 is the exponential distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaKnownShape {
    pub kappa: f64,
}

impl ExponentialFamily for GammaKnownShape {
    fn id(&self) -> &str {
        "gamma-known-shape"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn canonical_domain(&self) -> Vec<Interval> {
        vec![Interval::NEGATIVE]
    }
    fn expectation_domain(&self) -> Vec<Interval> {
        vec![Interval::POSITIVE]
    }
    fn data_support(&self) -> Interval {
        Interval::POSITIVE
    }
    fn log_partition(&self, eta: &[Complex64]) -> Complex64 {
        ln_gamma(self.kappa) - self.kappa * (-re(eta)).ln()
    }
    fn sufficient_stat(&self, x: f64, out: &mut [f64]) {
        out[0] = x;
    }
    fn log_base_measure(&self, x: f64) -> f64 {
        if self.kappa == 1.0 {
            0.0
        } else {
            (self.kappa - 1.0) * x.ln()
        }
    }
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64> {
        vec![-self.kappa / mu[0]]
    }
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64> {
        vec![-self.kappa / eta[0]]
    }
    fn char_decay_exponent(&self) -> f64 {
        self.kappa
    }
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64 {
        Gamma::new(self.kappa, mu[0] / self.kappa)
            .expect("validated shape and positive mean")
            .sample(rng)
    }
    fn closed_form(&self) -> Option<ClosedFormFamily> {
        Some(ClosedFormFamily::ExponentialType {
            c: self.kappa,
            m: self.kappa,
        })
    }
    fn statistic_preimage(&self, lo: f64, hi: f64) -> Option<Vec<(f64, f64)>> {
        let lo = lo.max(0.0);
        Some(if lo <= hi && hi > 0.0 { vec![(lo, hi)] } else { vec![] })
    }
    fn data_bounds(&self, window: &[(f64, f64)], n: usize, _tail: f64) -> DataBox {
        DataBox {
            lo: 0.0,
            hi: n as f64 * window[0].1,
            tail_mass: 0.0,
        }
    }
}

/// Weibull distribution with known shape k, parameterized by `μ = E[x^k]`;
/// `T(x) = x^k`, `η = −1/μ`, `h(x) = k x^{k−1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeibullKnownShape {
    pub shape: f64,
}

impl ExponentialFamily for WeibullKnownShape {
    fn id(&self) -> &str {
        "weibull-known-shape"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn canonical_domain(&self) -> Vec<Interval> {
        vec![Interval::NEGATIVE]
    }
    fn expectation_domain(&self) -> Vec<Interval> {
        vec![Interval::POSITIVE]
    }
    fn data_support(&self) -> Interval {
        Interval::POSITIVE
    }
    fn log_partition(&self, eta: &[Complex64]) -> Complex64 {
        -(-re(eta)).ln()
    }
    fn sufficient_stat(&self, x: f64, out: &mut [f64]) {
        out[0] = x.powf(self.shape);
    }
    fn log_base_measure(&self, x: f64) -> f64 {
        self.shape.ln() + (self.shape - 1.0) * x.ln()
    }
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64> {
        vec![-1.0 / mu[0]]
    }
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64> {
        vec![-1.0 / eta[0]]
    }
    fn char_decay_exponent(&self) -> f64 {
        1.0
    }
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64 {
        let e: f64 = Exp1.sample(rng);
        (mu[0] * e).powf(1.0 / self.shape)
    }
    fn closed_form(&self) -> Option<ClosedFormFamily> {
        Some(ClosedFormFamily::ExponentialType { c: 1.0, m: 1.0 })
    }
    fn statistic_preimage(&self, lo: f64, hi: f64) -> Option<Vec<(f64, f64)>> {
        let lo = lo.max(0.0);
        let k = 1.0 / self.shape;
        Some(if lo <= hi && hi > 0.0 { vec![(lo.powf(k), hi.powf(k))] } else { vec![] })
    }
    fn data_bounds(&self, window: &[(f64, f64)], n: usize, _tail: f64) -> DataBox {
        DataBox {
            lo: 0.0,
            hi: (n as f64 * window[0].1).powf(1.0 / self.shape),
            tail_mass: 0.0,
        }
    }
}

/// Gamma distribution with known scale β; the free parameter is the shape.
/// `T(x) = log x`, `η = shape − 1`, `μ = E[log x] = ψ(η + 1) + log β`.
/// β = 2 gives the chi-squared family.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaKnownScale {
    pub beta: f64,
}

impl GammaKnownScale {
    /// Shape `η + 1` for expectation parameter `mu`.
    pub fn shape_of_mu(&self, mu: f64) -> f64 {
        inverse_digamma(mu - self.beta.ln()).unwrap_or(f64::NAN)
    }
}

impl ExponentialFamily for GammaKnownScale {
    fn id(&self) -> &str {
        "gamma-known-scale"
    }
    fn param_dim(&self) -> usize {
        1
    }
    fn canonical_domain(&self) -> Vec<Interval> {
        vec![Interval::new(-1.0, f64::INFINITY)]
    }
    fn expectation_domain(&self) -> Vec<Interval> {
        vec![Interval::REAL_LINE]
    }
    fn data_support(&self) -> Interval {
        Interval::POSITIVE
    }
    fn log_partition(&self, eta: &[Complex64]) -> Complex64 {
        let shape = re(eta) + 1.0;
        let lg = log_gamma_complex(shape).unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        lg + shape * self.beta.ln()
    }
    fn sufficient_stat(&self, x: f64, out: &mut [f64]) {
        out[0] = x.ln();
    }
    fn log_base_measure(&self, x: f64) -> f64 {
        -x / self.beta
    }
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64> {
        vec![self.shape_of_mu(mu[0]) - 1.0]
    }
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64> {
        vec![digamma(eta[0] + 1.0).unwrap_or(f64::NAN) + self.beta.ln()]
    }
    fn char_decay_exponent(&self) -> f64 {
        // |Γ(a + iy)| decays like e^{−π|y|/2}.
        f64::INFINITY
    }
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64 {
        Gamma::new(self.shape_of_mu(mu[0]), self.beta)
            .expect("shape from a finite expectation parameter")
            .sample(rng)
    }
    fn closed_form(&self) -> Option<ClosedFormFamily> {
        Some(ClosedFormFamily::ChiSquaredType { beta: self.beta })
    }
    fn statistic_preimage(&self, lo: f64, hi: f64) -> Option<Vec<(f64, f64)>> {
        Some(if lo <= hi { vec![(lo.exp(), hi.exp())] } else { vec![] })
    }
    fn data_bounds(&self, window: &[(f64, f64)], _n: usize, tail: f64) -> DataBox {
        let lo_shape = self.shape_of_mu(window[0].0);
        let hi_shape = self.shape_of_mu(window[0].1);
        let budget = (1.0 / (0.5 * tail)).ln();
        // Chernoff: P(X ≤ rpβ), P(X ≥ rpβ) ≤ exp(−p (r − 1 − ln r)).
        let rate = |r: f64| r - 1.0 - r.ln();
        let lo_ratio = bisect(|r| lo_shape * rate(r) - budget, 1e-300, 1.0);
        let hi_ratio = bisect(|r| budget - hi_shape * rate(r), 1.0, 1e6);
        DataBox {
            lo: lo_ratio * lo_shape * self.beta,
            hi: hi_ratio * hi_shape * self.beta,
            tail_mass: tail,
        }
    }
}

/// `{x : r_lo ≤ |x − centre| ≤ r_hi}` as two intervals.
fn symmetric_preimage(centre: f64, r_lo: f64, r_hi: f64, nonempty: bool) -> Vec<(f64, f64)> {
    if !nonempty || r_lo > r_hi {
        return vec![];
    }
    vec![(centre - r_hi, centre - r_lo), (centre + r_lo, centre + r_hi)]
}

/// Root of a function that changes sign from positive at `lo` to negative
/// at `hi` (or vice versa); returns the end nearest to the root if none.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    if f_lo.signum() == f(hi).signum() {
        return if f_lo.abs() < f(hi).abs() { lo } else { hi };
    }
    for _ in 0..2000 {
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if f(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest z on a 1e-3 grid with `P(|Z| > z) ≤ tail` via the Mills bound
/// `P(Z > z) ≤ φ(z)/z`.
fn normal_quantile_bound(tail: f64) -> f64 {
    let mut z = 1.0f64;
    while (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * z) > 0.5 * tail {
        z += 1e-3;
    }
    z
}
