//! The gamma family with known scale has no closed form; its complexity
//! comes from two independent Fourier paths.

use nmlkit::fourier_engine::{lpc_fourier, lpc_gamma_known_scale};
use nmlkit::models::{GammaKnownScale, Luckiness};
use nmlkit::quadrature::QuadConfig;

fn main() -> nmlkit::Result<()> {
    let beta = 2.0;
    let model = GammaKnownScale { beta };
    let centre = beta.ln();
    let w = Luckiness::interval(centre - 0.5, centre + 0.5);
    let cfg = QuadConfig::default();
    for n in [1, 2, 5, 20, 100] {
        let shape_path = lpc_gamma_known_scale(beta, &w, n, &cfg)?;
        let generic = lpc_fourier(&model, &w, n, &cfg)?;
        println!(
            "n={n:<4} shape path {:.10}  generic {:.10}  diff {:.1e}",
            shape_path.log_value,
            generic.log_value,
            (shape_path.log_value - generic.log_value).abs()
        );
    }
    Ok(())
}
