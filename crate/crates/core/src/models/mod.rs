//! Exponential families in mean-value parameterization.
//!
//! A model is a density `p(x; μ) = h(x) exp(η(μ)·T(x)) / Z(η(μ))` with a
//! complex-analytic `log Z`, so characteristic functions of sums of
//! sufficient statistics come for free:
//! `E exp(iω·ΣT) = (Z(η + iω) / Z(η))^n`.

mod families;
mod luckiness;
mod registry;

use std::fmt::Debug;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::closed_form::ClosedFormFamily;
use crate::error::{Error, Result};
use crate::quadrature::stream_rng;

pub use families::{
    GammaKnownScale, GammaKnownShape, LaplaceKnownMean, NormalKnownMean, NormalKnownVariance,
    WeibullKnownShape,
};
pub use luckiness::Luckiness;
pub use registry::{build, default_window, model_ids, parse_window, registry, ModelInfo, ModelSpec, ParamInfo};

/// An open interval, possibly unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };
    pub const NEGATIVE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: 0.0,
    };

    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

/// Per-datum integration range for a brute-force sum over datasets.
///
/// `tail_mass` bounds the probability that one datum falls outside
/// `[lo, hi]`, uniformly over the parameters of interest; zero when the box
/// is exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DataBox {
    pub lo: f64,
    pub hi: f64,
    pub tail_mass: f64,
}

/// An exponential family with scalar observations.
pub trait ExponentialFamily: Send + Sync + Debug {
    fn id(&self) -> &str;
    /// Dimension d of the parameter.
    fn param_dim(&self) -> usize;
    /// Dimension of one observation.
    fn data_dim(&self) -> usize {
        1
    }
    /// Open box of valid canonical parameters, one interval per coordinate.
    fn canonical_domain(&self) -> Vec<Interval>;
    /// Open box of valid expectation parameters.
    fn expectation_domain(&self) -> Vec<Interval>;
    fn data_support(&self) -> Interval;
    /// `log Z(η)`, analytic in a strip around the real canonical domain.
    fn log_partition(&self, eta: &[Complex64]) -> Complex64;
    fn sufficient_stat(&self, x: f64, out: &mut [f64]);
    /// `log h(x)`.
    fn log_base_measure(&self, x: f64) -> f64;
    fn eta_of_mu(&self, mu: &[f64]) -> Vec<f64>;
    /// `μ(η) = ∇ log Z(η)`.
    fn mu_of_eta(&self, eta: &[f64]) -> Vec<f64>;
    /// α with `|Z(η + iω)/Z(η)| = O(|ω|^−α)` as `|ω| → ∞`.
    fn char_decay_exponent(&self) -> f64;
    fn draw(&self, mu: &[f64], rng: &mut dyn RngCore) -> f64;
    fn closed_form(&self) -> Option<ClosedFormFamily> {
        None
    }
    /// Intervals of `x` with `lo ≤ T(x) ≤ hi`, for scalar statistics.
    fn statistic_preimage(&self, _lo: f64, _hi: f64) -> Option<Vec<(f64, f64)>> {
        None
    }
    /// Range of a single datum when the sample has size `n` and the maximum
    /// likelihood estimate must land in `window`.
    fn data_bounds(&self, window: &[(f64, f64)], n: usize, tail: f64) -> DataBox;
}

/// Maximum likelihood estimate in expectation coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mle {
    pub mu: Vec<f64>,
    /// The estimate sits on the boundary of the expectation domain and is
    /// not a valid parameter.
    pub boundary: bool,
}

/// Checks that `mu` lies in the open expectation domain of `model`.
pub fn check_mu(model: &dyn ExponentialFamily, mu: &[f64]) -> Result<()> {
    let dom = model.expectation_domain();
    if mu.len() != dom.len() {
        return Err(Error::Domain(format!(
            "{} expects a {}-dimensional parameter, got {}",
            model.id(),
            dom.len(),
            mu.len()
        )));
    }
    for (k, (m, iv)) in mu.iter().zip(&dom).enumerate() {
        if !iv.contains(*m) {
            return Err(Error::Domain(format!(
                "{}: mu[{k}] = {m} outside ({}, {})",
                model.id(),
                iv.lo,
                iv.hi
            )));
        }
    }
    Ok(())
}

fn check_datum(model: &dyn ExponentialFamily, index: usize, x: f64) -> Result<()> {
    let s = model.data_support();
    if !x.is_finite() || !s.contains(x) {
        return Err(Error::Data {
            index,
            reason: format!("{x} outside the support ({}, {}) of {}", s.lo, s.hi, model.id()),
        });
    }
    Ok(())
}

fn real_log_partition(model: &dyn ExponentialFamily, eta: &[f64]) -> f64 {
    let z: Vec<Complex64> = eta.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    model.log_partition(&z).re
}

/// `log p(x; μ)`.
pub fn log_density(model: &dyn ExponentialFamily, x: f64, mu: &[f64]) -> Result<f64> {
    check_mu(model, mu)?;
    let s = model.data_support();
    if !x.is_finite() || !s.contains(x) {
        return Err(Error::Domain(format!(
            "x = {x} outside the support ({}, {}) of {}",
            s.lo,
            s.hi,
            model.id()
        )));
    }
    let eta = model.eta_of_mu(mu);
    let mut t = vec![0.0; eta.len()];
    model.sufficient_stat(x, &mut t);
    let dot: f64 = eta.iter().zip(&t).map(|(e, t)| e * t).sum();
    Ok(model.log_base_measure(x) + dot - real_log_partition(model, &eta))
}

/// Summary of a sample through the sufficient statistic.
#[derive(Clone, Debug, PartialEq)]
pub struct Sufficient {
    pub n: usize,
    /// `Σ T(xᵢ)`.
    pub total: Vec<f64>,
    /// `Σ log h(xᵢ)`.
    pub log_base: f64,
}

pub fn sufficient(model: &dyn ExponentialFamily, data: &[f64]) -> Result<Sufficient> {
    if data.is_empty() {
        return Err(Error::Config("empty dataset".into()));
    }
    let d = model.param_dim();
    let mut total = vec![0.0; d];
    let mut t = vec![0.0; d];
    let mut log_base = 0.0;
    for (i, &x) in data.iter().enumerate() {
        check_datum(model, i, x)?;
        model.sufficient_stat(x, &mut t);
        for (acc, v) in total.iter_mut().zip(&t) {
            *acc += v;
        }
        log_base += model.log_base_measure(x);
    }
    Ok(Sufficient {
        n: data.len(),
        total,
        log_base,
    })
}

/// `Σ log p(xᵢ; μ)` from sufficient statistics.
pub fn log_likelihood_suff(model: &dyn ExponentialFamily, s: &Sufficient, mu: &[f64]) -> Result<f64> {
    check_mu(model, mu)?;
    let eta = model.eta_of_mu(mu);
    let dot: f64 = eta.iter().zip(&s.total).map(|(e, t)| e * t).sum();
    Ok(s.log_base + dot - s.n as f64 * real_log_partition(model, &eta))
}

pub fn log_likelihood(model: &dyn ExponentialFamily, data: &[f64], mu: &[f64]) -> Result<f64> {
    log_likelihood_suff(model, &sufficient(model, data)?, mu)
}

/// The MLE of an exponential family is the mean of the sufficient statistic.
pub fn mle(model: &dyn ExponentialFamily, data: &[f64]) -> Result<Mle> {
    let s = sufficient(model, data)?;
    Ok(mle_suff(model, &s))
}

pub fn mle_suff(model: &dyn ExponentialFamily, s: &Sufficient) -> Mle {
    let mu: Vec<f64> = s.total.iter().map(|t| t / s.n as f64).collect();
    let boundary = check_mu(model, &mu).is_err();
    Mle { mu, boundary }
}

/// Fisher information in expectation coordinates, `I(μ) = Cov(T)⁻¹`.
///
/// The covariance `∂μ/∂η` comes from central differences of the gradient
/// map with one Richardson step, which keeps roundoff near `1e-12`
/// relative.
pub fn fisher_info(model: &dyn ExponentialFamily, mu: &[f64]) -> Result<DMatrix<f64>> {
    check_mu(model, mu)?;
    let d = model.param_dim();
    let eta = model.eta_of_mu(mu);
    let dom = model.canonical_domain();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for k in 0..d {
        let room = (eta[k] - dom[k].lo).min(dom[k].hi - eta[k]);
        let h = (1e-4 * (1.0 + eta[k].abs())).min(0.25 * room);
        let coarse = central_difference(model, &eta, k, h);
        let fine = central_difference(model, &eta, k, 0.5 * h);
        for j in 0..d {
            // Richardson step removes the O(h²) term.
            cov[(j, k)] = (4.0 * fine[j] - coarse[j]) / 3.0;
        }
    }
    let cov = 0.5 * (&cov + cov.transpose());
    if cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!("non-finite covariance at mu = {mu:?}")));
    }
    let chol = cov.cholesky().ok_or_else(|| {
        Error::Numerical(format!("covariance of the sufficient statistic is not positive definite at mu = {mu:?}"))
    })?;
    Ok(chol.inverse())
}

fn central_difference(model: &dyn ExponentialFamily, eta: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut up = eta.to_vec();
    let mut down = eta.to_vec();
    up[k] += h;
    down[k] -= h;
    let mu_up = model.mu_of_eta(&up);
    let mu_down = model.mu_of_eta(&down);
    mu_up.iter().zip(&mu_down).map(|(a, b)| (a - b) / (2.0 * h)).collect()
}

/// `count` independent draws from `p(·; μ)`, reproducible from `seed`.
pub fn sample(model: &dyn ExponentialFamily, mu: &[f64], count: usize, seed: u64) -> Result<Vec<f64>> {
    check_mu(model, mu)?;
    let mut rng = stream_rng(seed, 0);
    Ok((0..count).map(|_| model.draw(mu, &mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_1d, QuadConfig};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn all_models() -> Vec<(Arc<dyn ExponentialFamily>, f64)> {
        vec![
            (Arc::new(NormalKnownVariance { sigma2: 2.0 }), 0.3),
            (Arc::new(NormalKnownMean { mean: 1.0 }), 1.7),
            (Arc::new(LaplaceKnownMean { mean: -0.5 }), 1.3),
            (Arc::new(GammaKnownShape { kappa: 2.5 }), 1.9),
            (Arc::new(WeibullKnownShape { shape: 1.7 }), 2.2),
            (Arc::new(GammaKnownScale { beta: 2.0 }), 1.1),
        ]
    }

    #[test]
    fn densities_integrate_to_one() {
        let cfg = QuadConfig::default();
        for (m, mu) in all_models() {
            let s = m.data_support();
            let r = integrate_1d(|x| log_density(m.as_ref(), x, &[mu]).unwrap().exp(), s.lo, s.hi, &cfg).unwrap();
            assert_relative_eq!(r.value, 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn mean_of_statistic_is_mu() {
        let cfg = QuadConfig::default();
        for (m, mu) in all_models() {
            let s = m.data_support();
            let r = integrate_1d(
                |x| {
                    let mut t = [0.0];
                    m.sufficient_stat(x, &mut t);
                    t[0] * log_density(m.as_ref(), x, &[mu]).unwrap().exp()
                },
                s.lo,
                s.hi,
                &cfg,
            )
            .unwrap();
            assert_relative_eq!(r.value, mu, epsilon = 1e-7);
        }
    }

    #[test]
    fn fisher_information_reference_values() {
        // Gaussian with known variance: I = 1/σ².
        let i = fisher_info(&NormalKnownVariance { sigma2: 2.0 }, &[0.3]).unwrap();
        assert_relative_eq!(i[(0, 0)], 0.5, epsilon = 1e-10);
        // Exponential: I(μ) = 1/μ².
        let i = fisher_info(&GammaKnownShape { kappa: 1.0 }, &[2.0]).unwrap();
        assert_relative_eq!(i[(0, 0)], 0.25, max_relative = 1e-7);
        // Gaussian variance: I(σ²) = 1/(2σ⁴).
        let i = fisher_info(&NormalKnownMean { mean: 0.0 }, &[3.0]).unwrap();
        assert_relative_eq!(i[(0, 0)], 1.0 / 18.0, max_relative = 1e-7);
    }

    #[test]
    fn fisher_information_for_gamma_known_scale() {
        // Var(log X) = ψ'(shape).
        let m = GammaKnownScale { beta: 2.0 };
        let shape = m.shape_of_mu(0.4);
        let i = fisher_info(&m, &[0.4]).unwrap();
        let expected = 1.0 / crate::specialfn::trigamma(shape).unwrap();
        assert_relative_eq!(i[(0, 0)], expected, max_relative = 1e-7);
    }

    #[test]
    fn out_of_domain_parameters_are_rejected() {
        let m = GammaKnownShape { kappa: 1.0 };
        assert!(matches!(log_density(&m, 1.0, &[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(log_density(&m, -1.0, &[1.0]), Err(Error::Domain(_))));
        assert!(matches!(fisher_info(&m, &[0.0]), Err(Error::Domain(_))));
        assert!(matches!(mle(&m, &[1.0, -2.0]), Err(Error::Data { index: 1, .. })));
        assert!(matches!(mle(&m, &[]), Err(Error::Config(_))));
    }

    #[test]
    fn boundary_mle_is_flagged() {
        let m = NormalKnownMean { mean: 0.0 };
        let r = mle(&m, &[0.0, 0.0]).unwrap();
        assert!(r.boundary);
        assert_eq!(r.mu, vec![0.0]);
    }

    #[test]
    fn sampling_matches_the_mean() {
        for (m, mu) in all_models() {
            let xs = sample(m.as_ref(), &[mu], 200_000, 11).unwrap();
            let fit = mle(m.as_ref(), &xs).unwrap();
            let sd = fisher_info(m.as_ref(), &[mu]).unwrap()[(0, 0)].recip().sqrt();
            assert!(
                (fit.mu[0] - mu).abs() < 5.0 * sd / (xs.len() as f64).sqrt(),
                "{} {:?}",
                m.id(),
                fit
            );
        }
    }

    proptest! {
        #[test]
        fn mle_maximizes_the_likelihood(
            xs in proptest::collection::vec(0.05f64..20.0, 1..12),
            bump in -0.5f64..0.5,
        ) {
            for (m, _) in all_models() {
                let fit = mle(m.as_ref(), &xs).unwrap();
                if fit.boundary {
                    continue;
                }
                let best = log_likelihood(m.as_ref(), &xs, &fit.mu).unwrap();
                let other = [fit.mu[0] * (1.0 + bump)];
                if let Ok(v) = log_likelihood(m.as_ref(), &xs, &other) {
                    prop_assert!(v <= best + 1e-9 * best.abs().max(1.0));
                }
            }
        }

        #[test]
        fn gradient_map_inverts_the_parameterization(mu in 0.01f64..50.0) {
            for (m, _) in all_models() {
                let back = m.mu_of_eta(&m.eta_of_mu(&[mu]));
                prop_assert!((back[0] - mu).abs() <= 1e-9 * mu.max(1.0));
            }
        }
    }
}
