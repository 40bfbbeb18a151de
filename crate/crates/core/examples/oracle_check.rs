//! Brute-force complexity from the data-space integral, by quadrature and
//! by importance sampling, with a normalization check.

use std::f64::consts::E;

use nmlkit::closed_form::log_lpc_table1;
use nmlkit::models::{GammaKnownShape, Luckiness};
use nmlkit::oracle::{lpc_oracle_mc, lpc_oracle_quadrature, nml_normalization_check, OracleConfig};
use nmlkit::quadrature::QuadConfig;

fn main() -> nmlkit::Result<()> {
    let model = GammaKnownShape { kappa: 1.0 };
    let w = Luckiness::interval(1.0, E);
    let ocfg = OracleConfig::default();
    for n in [1, 2, 3] {
        let q = lpc_oracle_quadrature(&model, &w, n, &ocfg)?;
        let c = log_lpc_table1(&model, &w, n)?;
        println!("n={n} quadrature {:.10} closed form {:.10}", q.log_value, c.log_value);
    }
    let sampling = OracleConfig {
        reference_mu: Some(vec![1.7]),
        quad: QuadConfig {
            mc_samples: 1_000_000,
            ..QuadConfig::default()
        },
        ..OracleConfig::default()
    };
    let s = lpc_oracle_mc(&model, &w, 3, &sampling)?;
    println!(
        "n=3 importance sampling {:.5} +- {:.5} (ESS {:.0})",
        s.value(),
        s.error_estimate * s.value(),
        s.diagnostics.effective_sample_size.unwrap_or(0.0)
    );
    println!("NML density mass at n=1: {:.8}", nml_normalization_check(&model, &w, 1, &ocfg)?);
    Ok(())
}
