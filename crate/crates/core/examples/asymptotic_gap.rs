//! Exact against asymptotic complexity over sample sizes.

use std::f64::consts::E;

use nmlkit::cli::sweep_asymptotic;
use nmlkit::models::{Luckiness, ModelSpec};
use nmlkit::quadrature::QuadConfig;

fn main() -> nmlkit::Result<()> {
    let cfg = QuadConfig::default();
    let specs = [
        ModelSpec::new("gamma-known-shape", &[("kappa", 1.0)], Luckiness::interval(1.0, E)),
        ModelSpec::new("normal-known-variance", &[("sigma2", 1.0)], Luckiness::interval(0.0, 1.0)),
        ModelSpec::new("gamma-known-scale", &[("beta", 2.0)], Luckiness::interval(0.0, 1.0)),
    ];
    for spec in &specs {
        println!("{}", spec.label());
        for row in sweep_asymptotic(spec, &[10, 100, 1000, 10_000], &cfg)? {
            println!(
                "  n={:<6} exact {:>12.8} asymptotic {:>12.8} gap {:.2e} (1/(12n) = {:.2e})",
                row.n,
                row.exact_log_lpc,
                row.asymptotic_log_lpc,
                row.gap,
                1.0 / (12.0 * row.n as f64)
            );
        }
    }
    Ok(())
}
