//! Luckiness parametric complexity through Fourier inversion.
//!
//! For an exponential family the MLE in expectation coordinates is the mean
//! of the sufficient statistic, whose characteristic function at `μ` is
//! `(Z(η(μ) + iω/n) / Z(η(μ)))^n`. Inverting it at the point `μ` itself
//! gives the density `g(μ; μ)` of the MLE at the true parameter, and
//! `LPC = ∫ w(μ) g(μ; μ) dμ`.

use std::cell::{Cell, RefCell};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{check_mu, fisher_info, ExponentialFamily, Luckiness};
use crate::quadrature::{
    fourier_inverse, gauss_legendre, integrate_1d, integrate_box, monte_carlo_multi, IntegralResult, QuadConfig,
};
use crate::specialfn::{inverse_digamma, log_gamma_complex};

/// Decay exponents below this get a warning: the inversion converges slowly.
const SLOW_DECAY: f64 = 2.0;
/// Nodes of the fixed outer rule of the Monte Carlo path.
const MC_OUTER_NODES: usize = 16;
/// Frequency cutoff of the Monte Carlo path, in MLE standard deviations.
const MC_CUTOFF_SDS: f64 = 12.0;
/// Relative standard error above which a Monte Carlo result is flagged.
const MC_FLAG_REL_STDERR: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Fourier,
    ClosedForm,
    Asymptotic,
    OracleQuad,
    OracleMc,
    Theorem1Mc,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Fourier => "fourier",
            Method::ClosedForm => "closed_form",
            Method::Asymptotic => "asymptotic",
            Method::OracleQuad => "oracle_quad",
            Method::OracleMc => "oracle_mc",
            Method::Theorem1Mc => "theorem1_mc",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub evaluations: usize,
    /// Bound on mass discarded by truncating frequency or data ranges.
    pub truncation_bound: f64,
    /// Monte Carlo sample count, when sampling was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Effective sample size of importance weights.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_sample_size: Option<f64>,
    pub warnings: Vec<String>,
}

/// A parametric complexity in natural-log domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PCResult {
    pub log_value: f64,
    pub method: Method,
    /// Error estimate on `log_value`.
    pub error_estimate: f64,
    pub n: usize,
    /// The complexity is zero (log −∞) or infinite.
    pub divergent: bool,
    pub diagnostics: Diagnostics,
}

impl PCResult {
    pub fn from_log(log_value: f64, error_estimate: f64, method: Method, n: usize, diagnostics: Diagnostics) -> Self {
        PCResult {
            log_value,
            method,
            error_estimate: if log_value.is_finite() { error_estimate.abs() } else { 0.0 },
            n,
            divergent: !log_value.is_finite(),
            diagnostics,
        }
    }

    /// From a linear-domain value and its absolute error.
    pub fn from_linear(value: f64, error: f64, method: Method, n: usize, mut diagnostics: Diagnostics) -> Self {
        if value <= 0.0 {
            if value < 0.0 {
                diagnostics
                    .warnings
                    .push(format!("integral came out negative ({value:e}); reported as zero"));
            }
            return Self::from_log(f64::NEG_INFINITY, 0.0, method, n, diagnostics);
        }
        Self::from_log(value.ln(), error / value, method, n, diagnostics)
    }

    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// `(Z(η(μ) + iω/n) / Z(η(μ)))^n`, evaluated in log domain.
pub fn char_ratio(model: &dyn ExponentialFamily, mu: &[f64], omega: &[f64], n: usize) -> Result<Complex64> {
    check_mu(model, mu)?;
    if omega.len() != mu.len() {
        return Err(Error::Domain(format!(
            "frequency has {} coordinates, parameter has {}",
            omega.len(),
            mu.len()
        )));
    }
    let eta = model.eta_of_mu(mu);
    Ok(ratio_at(model, &eta, omega, n))
}

fn ratio_at(model: &dyn ExponentialFamily, eta: &[f64], omega: &[f64], n: usize) -> Complex64 {
    let nf = n as f64;
    let base: Vec<Complex64> = eta.iter().map(|&e| Complex64::new(e, 0.0)).collect();
    let shifted: Vec<Complex64> = eta
        .iter()
        .zip(omega)
        .map(|(&e, &w)| Complex64::new(e, w / nf))
        .collect();
    let log_ratio = model.log_partition(&shifted) - model.log_partition(&base);
    (nf * log_ratio).exp()
}

fn integrability(model: &dyn ExponentialFamily, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    let decay = model.char_decay_exponent() * n as f64;
    if decay.is_nan() || decay <= 1.0 {
        return Err(Error::Integrability { decay_exponent: decay });
    }
    Ok(decay)
}

/// Density of the MLE at the true parameter, `g(μ; μ)`.
pub fn g_diag(model: &dyn ExponentialFamily, mu: &[f64], n: usize, cfg: &QuadConfig) -> Result<IntegralResult> {
    let decay = integrability(model, n)?;
    check_mu(model, mu)?;
    let eta = model.eta_of_mu(mu);
    match mu.len() {
        1 => fourier_inverse(|w| ratio_at(model, &eta, &[w], n), mu[0], decay, cfg),
        2 | 3 => g_diag_box(model, &eta, mu, n, decay, cfg),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

/// Multivariate inversion by iterated adaptive quadrature over a frequency
/// box, folded onto `ω₁ ≥ 0`.
fn g_diag_box(
    model: &dyn ExponentialFamily,
    eta: &[f64],
    mu: &[f64],
    n: usize,
    decay: f64,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    let d = mu.len();
    let target = 0.1 * cfg.abs_tol.max(cfg.rel_tol * 1e-2);
    let tail_factor = |m: f64, w: f64| {
        if decay.is_finite() {
            w / (decay - 1.0)
        } else {
            w / (-m.ln()).max(1.0)
        }
    };
    // Start from the cutoffs along each axis, then widen any axis whose
    // outer face still carries mass, since the decay need not be
    // axis-aligned. The mass beyond a face is estimated from its mean `|φ|`
    // times its area, extrapolated with the decay exponent.
    let mut limits = Vec::with_capacity(d);
    for k in 0..d {
        let along = |w: f64| {
            let mut om = vec![0.0; d];
            om[k] = w;
            ratio_at(model, eta, &om, n).norm()
        };
        limits.push(widen(|w| {
            let m = along(w);
            m * tail_factor(m, w) > target || m > 0.5
        }, 1.0, k)?);
    }
    let mut steps = 0;
    loop {
        let faces: Vec<f64> = (0..d).map(|k| face_mean(model, eta, n, &limits, k)).collect();
        let volume: f64 = limits.iter().map(|o| 2.0 * o).product();
        let Some(k) = (0..d).find(|&k| {
            let m = faces[k];
            m * tail_factor(m, limits[k]) * volume / (2.0 * limits[k]) > target * (2.0 * PI).powi(d as i32)
        }) else {
            break;
        };
        limits[k] *= 2.0;
        steps += 1;
        if steps > 60 {
            return Err(Error::NonConvergence {
                message: format!("frequency box along axis {k} did not settle"),
                value: f64::NAN,
                error: f64::INFINITY,
            });
        }
    }
    let bounds: Vec<(f64, f64)> = limits
        .iter()
        .enumerate()
        .map(|(k, &o)| if k == 0 { (0.0, o) } else { (-o, o) })
        .collect();
    let integrand = |w: &[f64]| {
        let phase: f64 = w.iter().zip(mu).map(|(a, b)| a * b).sum();
        (ratio_at(model, eta, w, n) * Complex64::from_polar(1.0, -phase)).re
    };
    let scale = 2.0 / (2.0 * PI).powi(d as i32);
    // A coarse tensor rule fixes the magnitude, so inner integrals over
    // far-out frequency slices stop at an absolute tolerance.
    let magnitude = coarse_tensor(&integrand, &bounds).abs();
    let box_cfg = QuadConfig {
        rel_tol: 0.1 * cfg.rel_tol,
        abs_tol: (0.1 * cfg.abs_tol / scale).max(0.1 * cfg.rel_tol * magnitude),
        ..cfg.clone()
    };
    let r = integrate_box(integrand, &bounds, &box_cfg)?;
    let volume: f64 = limits.iter().map(|o| 2.0 * o).product();
    let edge = (0..d).map(|k| face_mean(model, eta, n, &limits, k)).fold(0.0, f64::max);
    Ok(IntegralResult {
        value: scale * r.value,
        error_estimate: scale * r.error_estimate,
        evaluations: r.evaluations,
        truncation_bound: edge * volume / (2.0 * PI).powi(d as i32),
    })
}

/// 48-point Gauss–Legendre tensor rule over `bounds`.
fn coarse_tensor(f: &impl Fn(&[f64]) -> f64, bounds: &[(f64, f64)]) -> f64 {
    const NODES: usize = 48;
    let (x, w) = gauss_legendre(NODES);
    let d = bounds.len();
    let mut point = vec![0.0; d];
    let mut total = 0.0;
    for idx in 0..NODES.pow(d as u32) {
        let mut rest = idx;
        let mut weight = 1.0;
        for (k, &(a, b)) in bounds.iter().enumerate() {
            let j = rest % NODES;
            rest /= NODES;
            let h = 0.5 * (b - a);
            point[k] = 0.5 * (a + b) + h * x[j];
            weight *= h * w[j];
        }
        total += weight * f(&point);
    }
    total
}

/// Doubles `omega` from `start` while `too_small` holds.
fn widen(too_small: impl Fn(f64) -> bool, start: f64, axis: usize) -> Result<f64> {
    let mut omega = start;
    for _ in 0..60 {
        if !too_small(omega) {
            return Ok(omega);
        }
        omega *= 2.0;
    }
    Err(Error::NonConvergence {
        message: format!("frequency cutoff along axis {axis} did not settle"),
        value: f64::NAN,
        error: f64::INFINITY,
    })
}

/// Mean of `|φ|` sampled on the faces `ω_k = ±Ω_k` of the frequency box.
fn face_mean(model: &dyn ExponentialFamily, eta: &[f64], n: usize, limits: &[f64], k: usize) -> f64 {
    const SIDE: usize = 33;
    let d = limits.len();
    let others: Vec<usize> = (0..d).filter(|&j| j != k).collect();
    let count = SIDE.pow(others.len() as u32);
    let mut sum = 0.0;
    let mut om = vec![0.0; d];
    for idx in 0..count {
        let mut rest = idx;
        for &j in &others {
            let t = (rest % SIDE) as f64 / (SIDE - 1) as f64;
            rest /= SIDE;
            om[j] = limits[j] * (2.0 * t - 1.0);
        }
        for sign in [1.0, -1.0] {
            om[k] = sign * limits[k];
            sum += ratio_at(model, eta, &om, n).norm();
        }
    }
    sum / (2 * count) as f64
}

/// Outer integration coordinates: log scale on axes inside `(0, ∞)`.
pub(crate) struct Outer {
    pub limits: Vec<(f64, f64)>,
    pub logs: Vec<bool>,
}

impl Outer {
    pub fn new(model: &dyn ExponentialFamily, w: &Luckiness) -> Self {
        let dom = model.expectation_domain();
        let bx = w.support_box(model);
        let logs: Vec<bool> = bx.iter().zip(&dom).map(|(&(a, _), iv)| a >= 0.0 && iv.lo >= 0.0).collect();
        let limits = bx
            .iter()
            .zip(&logs)
            .map(|(&(a, b), &l)| if l { (a.ln(), b.ln()) } else { (a, b) })
            .collect();
        Outer { limits, logs }
    }

    /// Parameter and Jacobian at outer coordinates `u`.
    pub fn point(&self, u: &[f64]) -> (Vec<f64>, f64) {
        let mut jac = 1.0;
        let mu = u
            .iter()
            .zip(&self.logs)
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
        (mu, jac)
    }
}

/// Accumulates inner-integral diagnostics across outer nodes.
#[derive(Default)]
struct Inner {
    evaluations: Cell<usize>,
    worst_rel: Cell<f64>,
    worst_trunc_rel: Cell<f64>,
    failure: RefCell<Option<Error>>,
}

impl Inner {
    fn record(&self, r: &IntegralResult) {
        self.evaluations.set(self.evaluations.get() + r.evaluations);
        if r.value > 0.0 {
            self.worst_rel.set(self.worst_rel.get().max(r.error_estimate / r.value));
            self.worst_trunc_rel
                .set(self.worst_trunc_rel.get().max(r.truncation_bound / r.value));
        }
    }

    fn fail(&self, e: Error) {
        self.failure.borrow_mut().get_or_insert(e);
    }
}

fn outer_integral(
    outer: &Outer,
    f: impl Fn(&[f64]) -> f64,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    if outer.limits.len() == 1 {
        let (a, b) = outer.limits[0];
        integrate_1d(|u| f(&[u]), a, b, cfg)
    } else {
        integrate_box(f, &outer.limits, cfg)
    }
}

fn finish(outer: IntegralResult, inner: Inner, method: Method, n: usize, mut diagnostics: Diagnostics) -> Result<PCResult> {
    if let Some(e) = inner.failure.into_inner() {
        return Err(e);
    }
    let value = outer.value;
    let truncation = inner.worst_trunc_rel.get() * value.abs();
    let error = outer.error_estimate + inner.worst_rel.get() * value.abs() + truncation;
    diagnostics.evaluations += outer.evaluations + inner.evaluations.get();
    diagnostics.truncation_bound = truncation;
    Ok(PCResult::from_linear(value, error, method, n, diagnostics))
}

/// `log ∫ w(μ) g(μ; μ) dμ` with `g` from Fourier inversion.
pub fn lpc_fourier(model: &dyn ExponentialFamily, w: &Luckiness, n: usize, cfg: &QuadConfig) -> Result<PCResult> {
    let decay = integrability(model, n)?;
    cfg.validate()?;
    w.validate_for(model)?;
    let mut diagnostics = Diagnostics::default();
    if decay < SLOW_DECAY {
        diagnostics.warnings.push(format!(
            "characteristic function decays like |w|^-{decay}; frequency cutoff widened"
        ));
    }
    let outer = Outer::new(model, w);
    let inner = Inner::default();
    let inner_cfg = cfg.tightened(0.1);
    let r = outer_integral(
        &outer,
        |u| {
            let (mu, jac) = outer.point(u);
            let weight = w.weight(&mu);
            if weight == 0.0 || jac == 0.0 || !jac.is_finite() {
                return 0.0;
            }
            match g_diag(model, &mu, n, &inner_cfg) {
                Ok(g) => {
                    inner.record(&g);
                    weight * g.value * jac
                }
                Err(e) => {
                    inner.fail(e);
                    0.0
                }
            }
        },
        cfg,
    )?;
    finish(r, inner, Method::Fourier, n, diagnostics)
}

/// LPC of the gamma family with known scale `beta` through the substitution
/// `s = log β − ν`, where `ν = E[log x]`. At `s` the shape is `ψ⁻¹(−s)`, and
/// the MLE of `−log(x/β)` averaged over n draws has characteristic function
/// `(Γ(p − iω/n) / Γ(p))^n`, inverted at its mean `s`.
pub fn lpc_gamma_known_scale(beta: f64, w: &Luckiness, n: usize, cfg: &QuadConfig) -> Result<PCResult> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Config(format!("beta must be positive, got {beta}")));
    }
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    cfg.validate()?;
    let (a, b) = match w {
        Luckiness::Indicator(win) if win.len() == 1 => win[0],
        Luckiness::Smooth { support: Some(s), .. } if s.len() == 1 => s[0],
        Luckiness::Smooth { support: None, .. } => (f64::NEG_INFINITY, f64::INFINITY),
        Luckiness::Indicator(win) => return Err(Error::UnsupportedDimension(win.len())),
        Luckiness::Smooth { support: Some(s), .. } => return Err(Error::UnsupportedDimension(s.len())),
    };
    if !(a <= b) {
        return Err(Error::Config(format!("window [{a}, {b}] is empty")));
    }
    let log_beta = beta.ln();
    let nf = n as f64;
    let inner = Inner::default();
    let inner_cfg = cfg.tightened(0.1);
    let r = integrate_1d(
        |s| {
            let weight = w.weight(&[log_beta - s]);
            if weight == 0.0 {
                return 0.0;
            }
            let shape = match inverse_digamma(-s) {
                Ok(p) => p,
                Err(e) => {
                    inner.fail(e);
                    return 0.0;
                }
            };
            let Ok(base) = log_gamma_complex(Complex64::new(shape, 0.0)) else {
                inner.fail(Error::Numerical(format!("log-gamma failed at shape {shape}")));
                return 0.0;
            };
            let phi = |om: f64| match log_gamma_complex(Complex64::new(shape, -om / nf)) {
                Ok(lg) => (nf * (lg - base)).exp(),
                Err(_) => Complex64::new(f64::NAN, f64::NAN),
            };
            match fourier_inverse(phi, s, f64::INFINITY, &inner_cfg) {
                Ok(g) => {
                    inner.record(&g);
                    weight * g.value
                }
                Err(e) => {
                    inner.fail(e);
                    0.0
                }
            }
        },
        log_beta - b,
        log_beta - a,
        cfg,
    )?;
    finish(r, inner, Method::Fourier, n, Diagnostics::default())
}

/// Monte Carlo estimate of a characteristic function with the standard
/// errors of its real and imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharFnEstimate {
    pub re: f64,
    pub im: f64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub samples: usize,
}

impl CharFnEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn draw_mle(model: &dyn ExponentialFamily, mu: &[f64], n: usize, rng: &mut dyn rand::RngCore, t: &mut [f64]) -> Vec<f64> {
    let mut acc = vec![0.0; mu.len()];
    for _ in 0..n {
        let x = model.draw(mu, rng);
        model.sufficient_stat(x, t);
        for (a, v) in acc.iter_mut().zip(t.iter()) {
            *a += v;
        }
    }
    acc.iter().map(|s| s / n as f64).collect()
}

/// `E exp(iω·(μ̂ − μ))` over samples of size n drawn at `μ`.
pub fn mle_char_fn_mc(
    model: &dyn ExponentialFamily,
    mu: &[f64],
    omega: &[f64],
    n: usize,
    cfg: &QuadConfig,
) -> Result<CharFnEstimate> {
    check_mu(model, mu)?;
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Config("sample size n must be at least 1".into()));
    }
    if omega.len() != mu.len() {
        return Err(Error::Domain("frequency and parameter dimensions differ".into()));
    }
    let [re, im] = monte_carlo_multi(
        |hat: &Vec<f64>| {
            let phase: f64 = omega.iter().zip(hat.iter().zip(mu)).map(|(w, (h, m))| w * (h - m)).sum();
            [phase.cos(), phase.sin()]
        },
        |rng| {
            let mut t = vec![0.0; mu.len()];
            draw_mle(model, mu, n, rng, &mut t)
        },
        cfg.mc_samples,
        cfg.seed,
    );
    Ok(CharFnEstimate {
        re: re.mean,
        im: im.mean,
        stderr_re: re.stderr,
        stderr_im: im.stderr,
        samples: re.samples,
    })
}

/// Seed of the `node`-th outer node's stream family.
fn node_seed(seed: u64, node: usize) -> u64 {
    seed ^ (node as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// LPC by Monte Carlo over the MLE distribution.
///
/// At each of a fixed set of Gauss–Legendre nodes `μ` the empirical
/// characteristic function of `μ̂ − μ` is inverted at zero with a frequency
/// cutoff Ω of twelve MLE standard deviations, which integrates in closed
/// form to `(1/π) mean(sin(Ω dₖ)/dₖ)`. Samples are split evenly across
/// nodes; the error estimate is the combined standard error.
pub fn lpc_theorem1_mc(model: &dyn ExponentialFamily, w: &Luckiness, n: usize, cfg: &QuadConfig) -> Result<PCResult> {
    integrability(model, n)?;
    cfg.validate()?;
    w.validate_for(model)?;
    if model.param_dim() != 1 {
        return Err(Error::UnsupportedDimension(model.param_dim()));
    }
    let outer = Outer::new(model, w);
    let (a, b) = outer.limits[0];
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::Config(
            "the Monte Carlo path needs a bounded luckiness support".into(),
        ));
    }
    let (nodes, weights) = gauss_legendre(MC_OUTER_NODES);
    let per_node = (cfg.mc_samples / MC_OUTER_NODES).max(2);
    let half = 0.5 * (b - a);
    let centre = 0.5 * (a + b);
    let mut value = 0.0;
    let mut variance = 0.0;
    let mut samples = 0;
    for (j, (x, gw)) in nodes.iter().zip(&weights).enumerate() {
        let (mu, jac) = outer.point(&[centre + half * x]);
        let weight = w.weight(&mu);
        if weight == 0.0 {
            continue;
        }
        let info = fisher_info(model, &mu)?[(0, 0)];
        let sd = 1.0 / (n as f64 * info).sqrt();
        let cutoff = MC_CUTOFF_SDS / sd;
        let [est] = monte_carlo_multi(
            |hat: &Vec<f64>| {
                let d = hat[0] - mu[0];
                let k = if d == 0.0 { cutoff } else { (cutoff * d).sin() / d };
                [k / PI]
            },
            |rng| {
                let mut t = [0.0];
                draw_mle(model, &mu, n, rng, &mut t)
            },
            per_node,
            node_seed(cfg.seed, j),
        );
        let scale = gw * half * weight * jac;
        value += scale * est.mean;
        variance += (scale * est.stderr).powi(2);
        samples += est.samples;
    }
    let stderr = variance.sqrt();
    let mut diagnostics = Diagnostics {
        samples: Some(samples),
        evaluations: samples * n,
        ..Diagnostics::default()
    };
    if value > 0.0 && stderr / value > MC_FLAG_REL_STDERR {
        diagnostics.warnings.push(format!(
            "relative standard error {:.3} exceeds {MC_FLAG_REL_STDERR}",
            stderr / value
        ));
    }
    Ok(PCResult::from_linear(value, stderr, Method::Theorem1Mc, n, diagnostics))
}
