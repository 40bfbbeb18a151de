//! Log-gamma on the complex plane, digamma, trigamma and inverse digamma.
//!
//! `log_gamma_complex` is the analytic log-gamma function (branch cut along
//! the non-positive real axis), not the principal logarithm of `Γ(z)`: its
//! imaginary part grows without bound along vertical lines. Identities that
//! involve it hold modulo `2πi`, which is all that `exp(n · lnΓ)` with integer
//! `n` needs.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` for complex `z`.
///
/// Uses the Lanczos form for `Re z >= 0.5` and the reflection formula
/// otherwise. Non-positive real integers are poles.
pub fn log_gamma_complex(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log-gamma of non-finite argument {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.re < 0.5 {
        let reflected = lanczos_log_gamma(Complex64::new(1.0, 0.0) - z);
        Ok(Complex64::new(PI.ln(), 0.0) - log_sin_pi(z) - reflected)
    } else {
        Ok(lanczos_log_gamma(z))
    }
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // ln Γ(x) = ln π − ln sin(πx) − ln Γ(1 − x), all terms real here.
        PI.ln() - (PI * x).sin().ln() - lanczos_log_gamma(Complex64::new(1.0 - x, 0.0)).re
    } else {
        lanczos_log_gamma(Complex64::new(x, 0.0)).re
    }
}

fn lanczos_log_gamma(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS[0], 0.0);
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (z + 0.5) * t.ln() - t + LN_SQRT_2PI + series.ln()
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
fn log_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return (z * PI).sin().ln();
    }
    if z.im < 0.0 {
        return log_sin_pi(z.conj()).conj();
    }
    // sin(πz) = e^{−iπz} (e^{2iπz} − 1) / (2i); |e^{2iπz}| < e^{−40π}.
    let i = Complex64::i();
    let small = (i * 2.0 * PI * z).exp();
    -i * PI * z + (small - 1.0).ln() - (i * 2.0).ln()
}

/// Digamma `ψ(x)` for real `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // −Σ B_2k / (2k x^2k), through x^-14.
    let tail = inv2
        * (-1.0 / 12.0
            + inv2
                * (1.0 / 120.0
                    + inv2
                        * (-1.0 / 252.0
                            + inv2
                                * (1.0 / 240.0
                                    + inv2
                                        * (-1.0 / 132.0
                                            + inv2 * (691.0 / 32_760.0 + inv2 * (-1.0 / 12.0)))))));
    Ok(acc + x.ln() - 0.5 * inv + tail)
}

/// Trigamma `ψ'(x)` for real `x > 0`. Only used by the Newton step of
/// [`inverse_digamma`].
pub fn trigamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("trigamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let tail = inv
        + 0.5 * inv2
        + inv
            * inv2
            * (1.0 / 6.0
                + inv2
                    * (-1.0 / 30.0
                        + inv2
                            * (1.0 / 42.0
                                + inv2
                                    * (-1.0 / 30.0
                                        + inv2
                                            * (5.0 / 66.0
                                                + inv2 * (-691.0 / 2_730.0 + inv2 * (7.0 / 6.0)))))));
    Ok(acc + tail)
}

const INVERSE_DIGAMMA_MAX_ITER: usize = 50;

/// Inverse digamma: the unique `x > 0` with `ψ(x) = y`.
///
/// Newton iteration from `exp(y) + 1/2` (for `y >= -2.22`) or `-1/(y + γ)`.
pub fn inverse_digamma(y: f64) -> Result<f64> {
    if !y.is_finite() {
        return Err(Error::Domain(format!("inverse digamma of {y}")));
    }
    let mut x = if y >= -2.22 {
        y.exp() + 0.5
    } else {
        -1.0 / (y + EULER_GAMMA)
    };
    if !x.is_finite() {
        return Err(Error::Numerical(format!("inverse digamma overflows at y = {y}")));
    }
    let scale = y.abs().max(1.0);
    for _ in 0..INVERSE_DIGAMMA_MAX_ITER {
        let residual = digamma(x)? - y;
        if residual.abs() <= 1e-14 * scale {
            return Ok(x);
        }
        let mut next = x - residual / trigamma(x)?;
        if next <= 0.0 {
            // Newton overshot past the pole at zero.
            next = 0.5 * x;
        }
        let converged = (next - x).abs() <= 4.0 * f64::EPSILON * x;
        x = next;
        if converged {
            break;
        }
    }
    let residual = digamma(x)? - y;
    if residual.abs() <= 1e-10 {
        Ok(x)
    } else {
        Err(Error::Numerical(format!(
            "inverse digamma did not converge at y = {y} (residual {residual:e})"
        )))
    }
}
