//! Closed-form luckiness parametric complexities and the large-n
//! asymptotic formula.
//!
//! Three families cover the registry:
//!
//! * fixed variance, `log Z(η) = Dη²/2 + const`, where the MLE is exactly
//!   Gaussian and `LPC = √(n/2πD) ∫w(μ)dμ`;
//! * exponential type, `η = −C/μ` and `Z ∝ (−η)^−m`, where the MLE is
//!   gamma distributed and `LPC = (Cn)^{mn} e^{−Cn}/Γ(mn) ∫w(μ)/μ dμ`;
//! * chi-squared type (gamma with known scale), which has no closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier_engine::{Diagnostics, Method, PCResult};
use crate::models::{fisher_info, ExponentialFamily, Luckiness};
use crate::quadrature::{integrate_1d, integrate_box, QuadConfig};
use crate::specialfn::ln_gamma;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ClosedFormFamily {
    FixedVariance { d: f64 },
    ExponentialType { c: f64, m: f64 },
    ChiSquaredType { beta: f64 },
}

/// `∫ w(μ) dμ` for a one-dimensional weight.
fn weight_mass(w: &Luckiness, cfg: &QuadConfig) -> Result<(f64, f64)> {
    match w {
        Luckiness::Indicator(window) => {
            check_window(window)?;
            Ok((window[0].1 - window[0].0, 0.0))
        }
        Luckiness::Smooth { weight, support } => {
            let (a, b) = match support {
                Some(s) if s.len() == 1 => s[0],
                Some(s) => return Err(Error::UnsupportedDimension(s.len())),
                None => (f64::NEG_INFINITY, f64::INFINITY),
            };
            let r = integrate_1d(|m| weight(&[m]), a, b, cfg)?;
            if !r.value.is_finite() {
                return Err(Error::Domain("luckiness weight is not integrable".into()));
            }
            Ok((r.value, r.total_error()))
        }
    }
}

/// `∫ w(μ)/μ dμ` over `(0, ∞)`, in log coordinates.
fn weight_log_mass(w: &Luckiness, cfg: &QuadConfig) -> Result<(f64, f64)> {
    match w {
        Luckiness::Indicator(window) => {
            check_window(window)?;
            let (a, b) = window[0];
            if !(a > 0.0) {
                return Err(Error::Domain(format!("window [{a}, {b}] must lie in (0, inf)")));
            }
            Ok(((b / a).ln(), 0.0))
        }
        Luckiness::Smooth { weight, support } => {
            let (a, b) = match support {
                Some(s) if s.len() == 1 => s[0],
                Some(s) => return Err(Error::UnsupportedDimension(s.len())),
                None => (0.0, f64::INFINITY),
            };
            if a < 0.0 {
                return Err(Error::Domain(format!("luckiness support starts at {a} < 0")));
            }
            let r = integrate_1d(|u| weight(&[u.exp()]), a.ln(), b.ln(), cfg)?;
            if !r.value.is_finite() {
                return Err(Error::Domain("w(mu)/mu is not integrable".into()));
            }
            Ok((r.value, r.total_error()))
        }
    }
}

fn check_window(window: &[(f64, f64)]) -> Result<()> {
    if window.len() != 1 {
        return Err(Error::UnsupportedDimension(window.len()));
    }
    let (a, b) = window[0];
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(format!("window [{a}, {b}] must satisfy a < b")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    Ok(())
}

/// `log LPC` of a fixed-variance family: `log ∫w + ½ log(n / 2πσ²)`.
pub fn log_lpc_fixed_variance(sigma2: f64, w: &Luckiness, n: usize) -> Result<f64> {
    check_n(n)?;
    if !(sigma2 > 0.0) {
        return Err(Error::Config(format!("sigma2 must be positive, got {sigma2}")));
    }
    let (mass, _) = weight_mass(w, &QuadConfig::default())?;
    Ok(mass.ln() + 0.5 * (n as f64 / (2.0 * std::f64::consts::PI * sigma2)).ln())
}

/// Log of the exponential-type coefficient `(Cn)^{mn} e^{−Cn} / Γ(mn)`.
pub fn log_exponential_coefficient(c: f64, m: f64, n: usize) -> f64 {
    let n = n as f64;
    m * n * (c * n).ln() - c * n - ln_gamma(m * n)
}

/// `log LPC` of an exponential-type family.
pub fn log_lpc_exponential_type(c: f64, m: f64, w: &Luckiness, n: usize) -> Result<f64> {
    check_n(n)?;
    if !(c > 0.0 && m > 0.0) {
        return Err(Error::Config(format!("C and m must be positive, got C = {c}, m = {m}")));
    }
    let (mass, _) = weight_log_mass(w, &QuadConfig::default())?;
    Ok(log_exponential_coefficient(c, m, n) + mass.ln())
}

/// Closed-form `log LPC` for a registry model that has one.
pub fn log_lpc_table1(model: &dyn ExponentialFamily, w: &Luckiness, n: usize) -> Result<PCResult> {
    let family = model
        .closed_form()
        .ok_or_else(|| Error::NoClosedForm(model.id().to_string()))?;
    w.validate_for(model)?;
    let log_value = match family {
        ClosedFormFamily::FixedVariance { d } => log_lpc_fixed_variance(d, w, n)?,
        ClosedFormFamily::ExponentialType { c, m } => log_lpc_exponential_type(c, m, w, n)?,
        ClosedFormFamily::ChiSquaredType { .. } => {
            return Err(Error::NoClosedForm(format!(
                "{}: use the gamma-known-scale Fourier path",
                model.id()
            )))
        }
    };
    Ok(PCResult::from_log(log_value, 0.0, Method::ClosedForm, n, Diagnostics::default()))
}

/// `(d/2) log(n/2π) + log ∫ w(μ) √det I(μ) dμ`.
///
/// Coordinates whose integration range lies in `(0, ∞)` are integrated in
/// `log μ`.
pub fn log_lpc_asymptotic(
    model: &dyn ExponentialFamily,
    w: &Luckiness,
    n: usize,
    cfg: &QuadConfig,
) -> Result<PCResult> {
    check_n(n)?;
    w.validate_for(model)?;
    let d = model.param_dim();
    let bx = w.support_box(model);
    let logs: Vec<bool> = bx.iter().map(|&(a, _)| a >= 0.0).collect();
    let limits: Vec<(f64, f64)> = bx
        .iter()
        .zip(&logs)
        .map(|(&(a, b), &l)| if l { (a.ln(), b.ln()) } else { (a, b) })
        .collect();
    let failure = std::cell::RefCell::new(None);
    let integrand = |u: &[f64]| {
        let mut jac = 1.0;
        let mu: Vec<f64> = u
            .iter()
            .zip(&logs)
            .map(|(&v, &l)| {
                if l {
                    let m = v.exp();
                    jac *= m;
                    m
                } else {
                    v
                }
            })
            .collect();
        let weight = w.weight(&mu);
        if weight == 0.0 || !mu.iter().all(|m| m.is_finite()) || jac == 0.0 {
            return 0.0;
        }
        match fisher_info(model, &mu) {
            Ok(info) => weight * info.determinant().sqrt() * jac,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let r = if d == 1 {
        integrate_1d(|u| integrand(&[u]), limits[0].0, limits[0].1, cfg)?
    } else {
        integrate_box(integrand, &limits, cfg)?
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let log_value = 0.5 * d as f64 * (n as f64 / (2.0 * std::f64::consts::PI)).ln() + r.value.ln();
    let diagnostics = Diagnostics {
        evaluations: r.evaluations,
        ..Diagnostics::default()
    };
    Ok(PCResult::from_log(
        log_value,
        r.total_error() / r.value.abs(),
        Method::Asymptotic,
        n,
        diagnostics,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build, GammaKnownShape, LaplaceKnownMean, NormalKnownVariance, WeibullKnownShape};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    #[test]
    fn fixed_variance_values() {
        let w = Luckiness::interval(0.0, 1.0);
        assert_relative_eq!(log_lpc_fixed_variance(1.0, &w, 4).unwrap(), -0.225_791_352_644_727_4, epsilon = 1e-12);
        let w = Luckiness::interval(0.0, 2.0);
        // log(2 / √(8π)).
        assert_relative_eq!(log_lpc_fixed_variance(4.0, &w, 1).unwrap(), -0.918_938_533_204_672_7, epsilon = 1e-12);
    }

    #[test]
    fn exponential_type_values() {
        let e = std::f64::consts::E;
        let w = Luckiness::interval(1.0, e);
        let expected = 3.0 * 3f64.ln() - 3.0 - 2f64.ln();
        assert_relative_eq!(log_lpc_exponential_type(1.0, 1.0, &w, 3).unwrap(), expected, epsilon = 1e-12);
        assert_relative_eq!(expected, -0.397_310_3, epsilon = 1e-7);
        assert_relative_eq!(log_lpc_exponential_type(1.0, 1.0, &w, 1).unwrap(), -1.0, epsilon = 1e-12);
        assert_relative_eq!(
            log_lpc_exponential_type(0.5, 0.5, &w, 4).unwrap(),
            2.0 * 2f64.ln() - 2.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            log_lpc_exponential_type(1.0, 1.0, &Luckiness::interval(2.0, 1.0), 3),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn smooth_weights_are_integrated() {
        let w = Luckiness::smooth(|m| (-0.5 * m[0] * m[0]).exp(), None);
        let v = log_lpc_fixed_variance(1.0, &w, 1).unwrap();
        assert_relative_eq!(v, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn rows_sharing_a_coefficient_coincide() {
        let w = Luckiness::interval(1.0, 3.0);
        for n in [1, 2, 7, 40] {
            let a = log_lpc_table1(&LaplaceKnownMean { mean: 0.0 }, &w, n).unwrap().log_value;
            let b = log_lpc_table1(&WeibullKnownShape { shape: 2.3 }, &w, n).unwrap().log_value;
            let c = log_lpc_table1(&GammaKnownShape { kappa: 1.0 }, &w, n).unwrap().log_value;
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn gamma_known_scale_has_no_closed_form() {
        let m = build("gamma-known-scale", &BTreeMap::new()).unwrap();
        assert!(matches!(
            log_lpc_table1(m.as_ref(), &Luckiness::interval(0.0, 1.0), 3),
            Err(Error::NoClosedForm(_))
        ));
    }

    #[test]
    fn asymptotic_formula_values() {
        let cfg = QuadConfig::default();
        let w = Luckiness::interval(0.0, 1.0);
        let r = log_lpc_asymptotic(&NormalKnownVariance { sigma2: 1.0 }, &w, 4, &cfg).unwrap();
        assert_relative_eq!(r.log_value, -0.225_791_352_644_727_4, epsilon = 1e-10);
        let w = Luckiness::interval(1.0, std::f64::consts::E);
        let r = log_lpc_asymptotic(&GammaKnownShape { kappa: 1.0 }, &w, 100, &cfg).unwrap();
        assert_relative_eq!(r.log_value, 0.5 * (100.0 / (2.0 * std::f64::consts::PI)).ln(), epsilon = 1e-9);
        assert_relative_eq!(r.log_value, 1.383_646_5, epsilon = 1e-7);
    }

    #[test]
    fn zero_weight_diverges() {
        let cfg = QuadConfig::default();
        let r = log_lpc_asymptotic(&NormalKnownVariance { sigma2: 1.0 }, &Luckiness::zero(), 4, &cfg).unwrap();
        assert!(r.divergent);
        assert_eq!(r.log_value, f64::NEG_INFINITY);
    }

    #[test]
    fn constants_match_the_partition_functions() {
        // Re-derive (C, m) from log Z: η(μ) = −C/μ and d log Z/d(−η) = −m/(−η).
        let models: Vec<std::sync::Arc<dyn ExponentialFamily>> = ["normal-known-mean", "laplace-known-mean", "gamma-known-shape", "weibull-known-shape"]
            .iter()
            .map(|id| {
                let mut p = BTreeMap::new();
                if *id == "gamma-known-shape" {
                    p.insert("kappa".to_string(), 2.5);
                }
                build(id, &p).unwrap()
            })
            .collect();
        for m in models {
            let Some(ClosedFormFamily::ExponentialType { c, m: power }) = m.closed_form() else {
                panic!("{} should be exponential type", m.id());
            };
            let mu = 1.7;
            let eta = m.eta_of_mu(&[mu])[0];
            assert_relative_eq!(-eta * mu, c, epsilon = 1e-12);
            let z = |e: f64| m.log_partition(&[num_complex::Complex64::new(e, 0.0)]).re;
            let h = 1e-5;
            let slope = (z(eta * (1.0 + h)) - z(eta * (1.0 - h))) / (2.0 * h * eta.abs());
            assert_relative_eq!(slope * eta, power, max_relative = 1e-8);
        }
        let nkv = build("normal-known-variance", &BTreeMap::from([("sigma2".to_string(), 3.0)])).unwrap();
        assert_eq!(nkv.closed_form(), Some(ClosedFormFamily::FixedVariance { d: 3.0 }));
    }

    proptest! {
        #[test]
        fn exponential_type_depends_only_on_the_ratio(a in 0.01f64..10.0, r in 1.01f64..50.0, s in 0.001f64..1000.0, n in 1usize..300) {
            let v1 = log_lpc_exponential_type(1.0, 1.0, &Luckiness::interval(a, a * r), n).unwrap();
            let v2 = log_lpc_exponential_type(1.0, 1.0, &Luckiness::interval(a * s, a * r * s), n).unwrap();
            prop_assert!((v1 - v2).abs() <= 1e-12 * v1.abs().max(1.0));
        }

        #[test]
        fn gaussian_asymptotics_are_exact(n in 1usize..1000, sigma2 in 0.1f64..10.0, lo in -5.0f64..5.0, width in 0.1f64..5.0) {
            let m = NormalKnownVariance { sigma2 };
            let w = Luckiness::interval(lo, lo + width);
            let exact = log_lpc_table1(&m, &w, n).unwrap().log_value;
            let asym = log_lpc_asymptotic(&m, &w, n, &QuadConfig::default()).unwrap().log_value;
            prop_assert!((exact - asym).abs() <= 1e-10);
        }
    }
}
