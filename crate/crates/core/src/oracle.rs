//! Brute-force luckiness parametric complexity straight from its
//! definition, `∫ p(xⁿ; μ̂(xⁿ)) w(μ̂(xⁿ)) dxⁿ`, used to validate the
//! formula-based paths.
//!
//! Two estimators are provided: iterated adaptive quadrature over the data
//! box for `n ≤ 3`, and importance sampling for any `n`.

use std::cell::{Cell, RefCell};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::closed_form::log_lpc_table1;
use crate::error::{Error, Result};
use crate::fourier_engine::{lpc_fourier, Diagnostics, Method, PCResult};
use crate::models::{check_mu, ExponentialFamily, Luckiness};
use crate::quadrature::{integrate_1d, integrate_1d_with_breaks, monte_carlo_multi, IntegralResult, QuadConfig};

/// Importance-sampling effective sample size below this fraction of the
/// sample count is flagged.
const MIN_ESS_FRACTION: f64 = 0.01;

/// Tolerance factor applied per level of nested quadrature.
const INNER_TIGHTENING: f64 = 0.3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    #[default]
    Quadrature,
    ImportanceSampling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub method: OracleMethod,
    /// Single proposal parameter for importance sampling. When unset, the
    /// proposal is an equal mixture of `proposal_components` members spread
    /// over the luckiness support.
    pub reference_mu: Option<Vec<f64>>,
    pub proposal_components: usize,
    /// Per-datum probability allowed outside the data box.
    pub tail_mass: f64,
    pub quad: QuadConfig,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            method: OracleMethod::Quadrature,
            reference_mu: None,
            proposal_components: 8,
            tail_mass: 1e-8,
            quad: QuadConfig::default(),
        }
    }
}

/// Maximized-likelihood integrand from running sums of `T` and `log h`.
struct Integrand<'a> {
    model: &'a dyn ExponentialFamily,
    w: &'a Luckiness,
    n: usize,
}

impl Integrand<'_> {
    /// `p(xⁿ; μ̂) w(μ̂)` given `Σ T(xᵢ)` and `Σ log h(xᵢ)`.
    fn value(&self, total: &[f64], log_base: f64) -> f64 {
        let nf = self.n as f64;
        let mu: Vec<f64> = total.iter().map(|t| t / nf).collect();
        if check_mu(self.model, &mu).is_err() {
            return 0.0;
        }
        let weight = self.w.weight(&mu);
        if weight == 0.0 {
            return 0.0;
        }
        let log_lik = self.log_tilt(&mu, total);
        weight * (log_base + log_lik).exp()
    }

    /// `η(θ)·ΣT − n log Z(η(θ))`.
    fn log_tilt(&self, theta: &[f64], total: &[f64]) -> f64 {
        let eta = self.model.eta_of_mu(theta);
        let z: Vec<Complex64> = eta.iter().map(|&e| Complex64::new(e, 0.0)).collect();
        let dot: f64 = eta.iter().zip(total).map(|(e, t)| e * t).sum();
        dot - self.n as f64 * self.model.log_partition(&z).re
    }
}

fn check_common(model: &dyn ExponentialFamily, w: &Luckiness, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    w.validate_for(model)?;
    if model.param_dim() != 1 {
        return Err(Error::UnsupportedDimension(model.param_dim()));
    }
    Ok(())
}

/// Iterated adaptive quadrature over the data box.
///
/// The innermost axis is restricted exactly to the data values that put the
/// MLE inside an indicator window; outer axes integrate the resulting
/// kinked but continuous function.
pub fn lpc_oracle_quadrature(
    model: &dyn ExponentialFamily,
    w: &Luckiness,
    n: usize,
    ocfg: &OracleConfig,
) -> Result<PCResult> {
    check_common(model, w, n)?;
    let dims = n * model.data_dim();
    if dims > 3 {
        return Err(Error::UnsupportedDimension(dims));
    }
    ocfg.quad.validate()?;
    let support = model.data_support();
    let (bx_lo, bx_hi, tail) = match w.window() {
        Some(window) => {
            let b = model.data_bounds(window, n, ocfg.tail_mass);
            (b.lo.max(support.lo), b.hi.min(support.hi), b.tail_mass)
        }
        None => {
            let bx = w.support_box(model);
            if bx[0].0.is_finite() && bx[0].1.is_finite() {
                let b = model.data_bounds(&bx, n, ocfg.tail_mass);
                (b.lo.max(support.lo), b.hi.min(support.hi), b.tail_mass)
            } else {
                (support.lo, support.hi, 0.0)
            }
        }
    };
    let integrand = Integrand { model, w, n };
    let state = Quad {
        integrand: &integrand,
        lo: bx_lo,
        hi: bx_hi,
        evaluations: Cell::new(0),
        worst_abs: vec![Cell::new(0.0); n],
        t_min: statistic_minimum(model, bx_lo, bx_hi),
        failure: RefCell::new(None),
    };
    let r = state.level(0, 0.0, 0.0, &ocfg.quad)?;
    if let Some(e) = state.failure.into_inner() {
        return Err(e);
    }
    let truncation = n as f64 * tail * r.value.abs();
    // An inner error of at most `e` at depth k moves the total by at most
    // e times the box volume of the k + 1 outer axes.
    let width = bx_hi - bx_lo;
    let nested: f64 = state
        .worst_abs
        .iter()
        .enumerate()
        .map(|(k, e)| e.get() * width.powi(k as i32 + 1))
        .sum();
    let error = r.error_estimate + nested + truncation;
    let diagnostics = Diagnostics {
        evaluations: r.evaluations + state.evaluations.get(),
        truncation_bound: truncation,
        ..Diagnostics::default()
    };
    Ok(PCResult::from_linear(r.value, error, Method::OracleQuad, n, diagnostics))
}

/// Minimum of `T` over `[lo, hi]` on a fine grid that includes both ends
/// and the midpoint.
fn statistic_minimum(model: &dyn ExponentialFamily, lo: f64, hi: f64) -> f64 {
    const POINTS: usize = 257;
    let mut t = [0.0];
    (0..POINTS)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / (POINTS - 1) as f64;
            model.sufficient_stat(x, &mut t);
            t[0]
        })
        .fold(f64::INFINITY, f64::min)
}

struct Quad<'a> {
    integrand: &'a Integrand<'a>,
    lo: f64,
    hi: f64,
    evaluations: Cell<usize>,
    /// Largest error estimate of an inner integral returned to level k.
    worst_abs: Vec<Cell<f64>>,
    /// Smallest sufficient statistic over the box.
    t_min: f64,
    failure: RefCell<Option<Error>>,
}

impl Quad<'_> {
    /// Integral over data coordinates `k..n` given running sums of the
    /// first `k`.
    fn level(&self, k: usize, total: f64, log_base: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
        let model = self.integrand.model;
        let stat = |x: f64| {
            let mut t = [0.0];
            model.sufficient_stat(x, &mut t);
            t[0]
        };
        if k + 1 == self.integrand.n {
            let mut out = IntegralResult::exact(0.0);
            for (a, b) in self.last_axis_pieces(total) {
                let r = integrate_1d(
                    |x| self.integrand.value(&[total + stat(x)], log_base + model.log_base_measure(x)),
                    a,
                    b,
                    cfg,
                )?;
                out.value += r.value;
                out.error_estimate += r.error_estimate;
                out.evaluations += r.evaluations;
            }
            return Ok(out);
        }
        let inner_cfg = cfg.tightened(INNER_TIGHTENING);
        let breaks = self.kinks(k, total);
        integrate_1d_with_breaks(
            |x| match self.level(k + 1, total + stat(x), log_base + model.log_base_measure(x), &inner_cfg) {
                Ok(r) => {
                    self.evaluations.set(self.evaluations.get() + r.evaluations);
                    let worst = &self.worst_abs[k];
                    worst.set(worst.get().max(r.error_estimate));
                    r.value
                }
                Err(e) => {
                    self.failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            },
            &breaks,
            cfg,
        )
    }

    /// Breakpoints for axis `k`: values where the remaining axes can just
    /// reach or just leave an indicator window, so the inner integral has a
    /// kink there.
    fn kinks(&self, k: usize, total: f64) -> Vec<f64> {
        let mut points = vec![self.lo, self.hi];
        if let Some(window) = self.integrand.w.window() {
            let nf = self.integrand.n as f64;
            let rest = (self.integrand.n - k - 1) as f64;
            let (a, b) = window[0];
            let shift = rest * self.t_min;
            if let Some(pre) = self.integrand.model.statistic_preimage(nf * a - total - shift, nf * b - total - shift) {
                for (p, q) in pre {
                    points.extend([p, q].into_iter().filter(|x| *x > self.lo && *x < self.hi));
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        points
    }

    /// Ranges of the last datum, clipped to the data box.
    fn last_axis_pieces(&self, total: f64) -> Vec<(f64, f64)> {
        let model = self.integrand.model;
        let nf = self.integrand.n as f64;
        let whole = vec![(self.lo, self.hi)];
        let Some(window) = self.integrand.w.window() else {
            return whole;
        };
        let (a, b) = window[0];
        let Some(pre) = model.statistic_preimage(nf * a - total, nf * b - total) else {
            return whole;
        };
        pre.into_iter()
            .map(|(p, q)| (p.max(self.lo), q.min(self.hi)))
            .filter(|(p, q)| p < q)
            .collect()
    }
}

/// Proposal parameters: the configured reference, or a mixture spread over
/// the luckiness support (geometrically on positive axes).
fn proposal(model: &dyn ExponentialFamily, w: &Luckiness, ocfg: &OracleConfig) -> Result<Vec<f64>> {
    if let Some(r) = &ocfg.reference_mu {
        check_mu(model, r)?;
        return Ok(vec![r[0]]);
    }
    let (a, b) = w.support_box(model)[0];
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(
            "importance sampling needs a bounded luckiness support or reference_mu".into(),
        ));
    }
    let k = ocfg.proposal_components.max(1);
    let geometric = a > 0.0;
    Ok((0..k)
        .map(|i| {
            let f = (i as f64 + 0.5) / k as f64;
            if geometric {
                a * (b / a).powf(f)
            } else {
                a + (b - a) * f
            }
        })
        .collect())
}

/// Importance sampling of the definition under a proposal built from the
/// model itself, so that weights only involve sufficient statistics.
pub fn lpc_oracle_mc(model: &dyn ExponentialFamily, w: &Luckiness, n: usize, ocfg: &OracleConfig) -> Result<PCResult> {
    check_common(model, w, n)?;
    ocfg.quad.validate()?;
    let thetas = proposal(model, w, ocfg)?;
    let integrand = Integrand { model, w, n };
    let log_k = (thetas.len() as f64).ln();
    let [est, second] = monte_carlo_multi(
        |total: &f64| {
            // p(x; μ̂) w(μ̂) / q(x); the base measure cancels.
            let target = integrand.value(&[*total], 0.0);
            if target == 0.0 {
                return [0.0, 0.0];
            }
            let logs: Vec<f64> = thetas.iter().map(|th| integrand.log_tilt(&[*th], &[*total])).collect();
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_q = top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln() - log_k;
            let ratio = (target.ln() - log_q).exp();
            [ratio, ratio * ratio]
        },
        |rng| {
            let theta = [thetas[rng.random_range(0..thetas.len())]];
            let mut t = [0.0];
            let mut total = 0.0;
            for _ in 0..n {
                let x = model.draw(&theta, rng);
                model.sufficient_stat(x, &mut t);
                total += t[0];
            }
            total
        },
        ocfg.quad.mc_samples,
        ocfg.quad.seed,
    );
    let ess = if second.mean > 0.0 {
        est.samples as f64 * est.mean * est.mean / second.mean
    } else {
        0.0
    };
    let mut diagnostics = Diagnostics {
        evaluations: est.samples * n,
        samples: Some(est.samples),
        effective_sample_size: Some(ess),
        ..Diagnostics::default()
    };
    if est.mean > 0.0 && ess < MIN_ESS_FRACTION * est.samples as f64 {
        diagnostics.warnings.push(format!(
            "importance weights are degenerate: effective sample size {ess:.0} of {}",
            est.samples
        ));
    }
    Ok(PCResult::from_linear(est.mean, est.stderr, Method::OracleMc, n, diagnostics))
}

/// Definition-level LPC by the configured oracle method.
pub fn lpc_oracle(model: &dyn ExponentialFamily, w: &Luckiness, n: usize, ocfg: &OracleConfig) -> Result<PCResult> {
    match ocfg.method {
        OracleMethod::Quadrature => lpc_oracle_quadrature(model, w, n, ocfg),
        OracleMethod::ImportanceSampling => lpc_oracle_mc(model, w, n, ocfg),
    }
}

/// Total mass of the luckiness-NML density `p(xⁿ; μ̂) w(μ̂) / LPC`, with the
/// LPC from the closed form when there is one and from Fourier inversion
/// otherwise.
pub fn nml_normalization_check(
    model: &dyn ExponentialFamily,
    w: &Luckiness,
    n: usize,
    ocfg: &OracleConfig,
) -> Result<f64> {
    let log_lpc = match log_lpc_table1(model, w, n) {
        Ok(r) => r.log_value,
        Err(Error::NoClosedForm(_)) => lpc_fourier(model, w, n, &ocfg.quad)?.log_value,
        Err(e) => return Err(e),
    };
    nml_normalization_check_with_lpc(model, w, n, log_lpc, ocfg)
}

/// As [`nml_normalization_check`] with a caller-supplied `log LPC`.
pub fn nml_normalization_check_with_lpc(
    model: &dyn ExponentialFamily,
    w: &Luckiness,
    n: usize,
    log_lpc: f64,
    ocfg: &OracleConfig,
) -> Result<f64> {
    let mass = lpc_oracle(model, w, n, ocfg)?;
    Ok((mass.log_value - log_lpc).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{GammaKnownShape, NormalKnownVariance};
    use approx::assert_relative_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn quadrature_single_exponential_datum() {
        let r = lpc_oracle_quadrature(
            &GammaKnownShape { kappa: 1.0 },
            &Luckiness::interval(1.0, E),
            1,
            &OracleConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value(), (-1.0f64).exp(), max_relative = 1e-8);
    }

    #[test]
    fn quadrature_two_gaussian_data() {
        let r = lpc_oracle_quadrature(
            &NormalKnownVariance { sigma2: 1.0 },
            &Luckiness::interval(0.0, 1.0),
            2,
            &OracleConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value(), (2.0 / (2.0 * PI)).sqrt(), max_relative = 1e-6);
    }

    #[test]
    fn zero_weight_gives_zero() {
        let r = lpc_oracle_quadrature(
            &GammaKnownShape { kappa: 1.0 },
            &Luckiness::smooth(|_| 0.0, Some(vec![(1.0, 2.0)])),
            2,
            &OracleConfig::default(),
        )
        .unwrap();
        assert!(r.divergent);
        let ocfg = OracleConfig {
            quad: QuadConfig {
                mc_samples: 1000,
                ..QuadConfig::default()
            },
            ..OracleConfig::default()
        };
        let r = lpc_oracle_mc(
            &GammaKnownShape { kappa: 1.0 },
            &Luckiness::smooth(|_| 0.0, Some(vec![(1.0, 2.0)])),
            2,
            &ocfg,
        )
        .unwrap();
        assert!(r.divergent);
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn importance_sampling_exponential() {
        let ocfg = OracleConfig {
            reference_mu: Some(vec![1.7]),
            quad: QuadConfig {
                mc_samples: 200_000,
                ..QuadConfig::default()
            },
            ..OracleConfig::default()
        };
        let r = lpc_oracle_mc(&GammaKnownShape { kappa: 1.0 }, &Luckiness::interval(1.0, E), 3, &ocfg).unwrap();
        let exact = 27.0 * (-3.0f64).exp() / 2.0;
        assert!((r.value() - exact).abs() <= 3.0 * r.error_estimate * r.value(), "{r:?}");
        assert!(r.diagnostics.warnings.is_empty());
    }

    #[test]
    fn normalization_self_test() {
        let m = GammaKnownShape { kappa: 1.0 };
        let w = Luckiness::interval(1.0, E);
        let ocfg = OracleConfig::default();
        let mass = nml_normalization_check(&m, &w, 1, &ocfg).unwrap();
        assert_relative_eq!(mass, 1.0, epsilon = 1e-6);
        let doubled = nml_normalization_check_with_lpc(&m, &w, 1, -1.0 + 2f64.ln(), &ocfg).unwrap();
        assert_relative_eq!(doubled, 0.5, epsilon = 1e-6);
    }

    fn mc(samples: usize, reference: Option<f64>) -> OracleConfig {
        OracleConfig {
            method: OracleMethod::ImportanceSampling,
            reference_mu: reference.map(|r| vec![r]),
            quad: QuadConfig {
                mc_samples: samples,
                ..QuadConfig::default()
            },
            ..OracleConfig::default()
        }
    }

    #[test]
    fn importance_sampling_gaussian_fifty() {
        let r = lpc_oracle(&NormalKnownVariance { sigma2: 1.0 }, &Luckiness::interval(0.0, 1.0), 50, &mc(200_000, None))
            .unwrap();
        let exact = (50.0 / (2.0 * PI)).sqrt();
        assert!((r.value() - exact).abs() <= 3.0 * r.error_estimate * r.value(), "{r:?}");
    }

    #[test]
    fn proposal_invariance() {
        let m = GammaKnownShape { kappa: 2.0 };
        let w = Luckiness::interval(1.0, 2.0);
        let a = lpc_oracle_mc(&m, &w, 5, &mc(100_000, Some(1.2))).unwrap();
        let b = lpc_oracle_mc(&m, &w, 5, &mc(100_000, Some(1.8))).unwrap();
        let combined = (a.error_estimate.powi(2) + b.error_estimate.powi(2)).sqrt();
        assert!((a.log_value - b.log_value).abs() <= 3.0 * combined, "{a:?} {b:?}");
    }

    #[test]
    fn enlarging_the_window_never_decreases() {
        let m = NormalKnownVariance { sigma2: 2.0 };
        let ocfg = OracleConfig::default();
        let mut last = 0.0;
        for b in [0.5, 1.0, 2.0, 4.0] {
            let v = lpc_oracle_quadrature(&m, &Luckiness::interval(0.0, b), 2, &ocfg).unwrap().value();
            assert!(v >= last, "{v} < {last}");
            last = v;
        }
    }

    #[test]
    fn rejects_large_dimension() {
        let e = lpc_oracle_quadrature(&GammaKnownShape { kappa: 1.0 }, &Luckiness::interval(1.0, E), 4, &OracleConfig::default());
        assert!(matches!(e, Err(Error::UnsupportedDimension(4))));
    }
}
