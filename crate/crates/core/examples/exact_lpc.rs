//! Closed-form parametric complexities against the Fourier engine.

use std::f64::consts::E;

use nmlkit::closed_form::log_lpc_table1;
use nmlkit::fourier_engine::lpc_fourier;
use nmlkit::models::{GammaKnownShape, LaplaceKnownMean, Luckiness, NormalKnownMean, NormalKnownVariance};
use nmlkit::models::ExponentialFamily;
use nmlkit::quadrature::QuadConfig;

fn main() -> nmlkit::Result<()> {
    let cfg = QuadConfig::default();
    let cases: Vec<(Box<dyn ExponentialFamily>, Luckiness)> = vec![
        (Box::new(NormalKnownVariance { sigma2: 1.0 }), Luckiness::interval(0.0, 1.0)),
        (Box::new(NormalKnownMean { mean: 0.0 }), Luckiness::interval(1.0, E)),
        (Box::new(LaplaceKnownMean { mean: 0.0 }), Luckiness::interval(1.0, E)),
        (Box::new(GammaKnownShape { kappa: 2.0 }), Luckiness::interval(1.0, E)),
    ];
    for (model, w) in &cases {
        for n in [3, 10, 50] {
            let closed = log_lpc_table1(model.as_ref(), w, n)?;
            let fourier = lpc_fourier(model.as_ref(), w, n, &cfg)?;
            println!(
                "{:<22} n={n:<3} closed {:>13.10} fourier {:>13.10} diff {:.1e}",
                model.id(),
                closed.log_value,
                fourier.log_value,
                (closed.log_value - fourier.log_value).abs()
            );
        }
    }
    Ok(())
}
