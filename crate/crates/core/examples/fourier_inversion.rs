//! Recovers the density of the maximum likelihood estimate from its
//! characteristic function and compares it with the exact gamma density.

use nmlkit::fourier_engine::{char_ratio, g_diag};
use nmlkit::models::GammaKnownShape;
use nmlkit::quadrature::{fourier_inverse, QuadConfig};
use nmlkit::specialfn::ln_gamma;

fn main() -> nmlkit::Result<()> {
    let model = GammaKnownShape { kappa: 1.0 };
    let (mu, n) = (1.0, 3);
    let cfg = QuadConfig::default();
    // The mean of three unit exponentials is gamma(3, rate 3).
    let exact = |t: f64| (3.0 * 3f64.ln() + 2.0 * t.ln() - 3.0 * t - ln_gamma(3.0)).exp();
    println!("{:>6} {:>16} {:>16}", "t", "inverted", "exact");
    for t in [0.25, 0.5, 1.0, 1.5, 2.5] {
        let r = fourier_inverse(|w| char_ratio(&model, &[mu], &[w], n).unwrap(), t, n as f64, &cfg)?;
        println!("{t:>6} {:>16.12} {:>16.12}", r.value, exact(t));
    }
    let g = g_diag(&model, &[mu], n, &cfg)?;
    println!("g(mu; mu) = {:.12} (error estimate {:.1e})", g.value, g.error_estimate);
    Ok(())
}
