//! Sampling estimates of the MLE characteristic function and of the
//! complexity through its inversion.

use nmlkit::fourier_engine::{char_ratio, lpc_fourier, lpc_theorem1_mc, mle_char_fn_mc};
use nmlkit::models::{GammaKnownShape, Luckiness};
use nmlkit::quadrature::QuadConfig;
use num_complex::Complex64;

fn main() -> nmlkit::Result<()> {
    let model = GammaKnownShape { kappa: 2.0 };
    let cfg = QuadConfig {
        mc_samples: 200_000,
        ..QuadConfig::default()
    };
    let (mu, n) = (1.5, 4);
    for omega in [0.5, 1.0, 3.0] {
        let est = mle_char_fn_mc(&model, &[mu], &[omega], n, &cfg)?;
        // Centred at the true parameter.
        let exact = char_ratio(&model, &[mu], &[omega], n)? * Complex64::from_polar(1.0, -omega * mu);
        println!("omega={omega}: sampled {:.4} exact {:.4}", est.value(), exact);
    }
    let w = Luckiness::interval(1.0, 2.0);
    let mc = lpc_theorem1_mc(&model, &w, n, &cfg)?;
    let f = lpc_fourier(&model, &w, n, &QuadConfig::default())?;
    println!("LPC sampled {:.5} +- {:.5}, Fourier {:.5}", mc.value(), mc.error_estimate * mc.value(), f.value());
    Ok(())
}
