//! Ranks an exponential and a Gaussian candidate on simulated exponential
//! data by luckiness-NML code length.

use nmlkit::cli::{select_model, Dataset, LpcMethod};
use nmlkit::models::{sample, GammaKnownShape, ModelSpec};
use nmlkit::quadrature::QuadConfig;

fn main() -> nmlkit::Result<()> {
    let values = sample(&GammaKnownShape { kappa: 1.0 }, &[2.0], 100, 7)?;
    let data = Dataset::new(values)?;
    let candidates: Vec<ModelSpec> = [
        "gamma-known-shape:kappa=1:window=0.5,8",
        "normal-known-variance:sigma2=4:window=-8,8",
        "gamma-known-scale:beta=2:window=-2,3",
    ]
    .iter()
    .map(|s| s.parse())
    .collect::<nmlkit::Result<_>>()?;
    let report = select_model(&candidates, &data, LpcMethod::Auto, &QuadConfig::default())?;
    let mut ranked: Vec<_> = report.candidates.iter().collect();
    ranked.sort_by_key(|c| c.rank);
    for c in ranked {
        println!(
            "rank {} {:<45} -log p {:>9.4} log LPC {:>7.4} code length {:>9.4} nats",
            c.rank, c.label, -c.code.log_max_likelihood, c.code.log_lpc, c.code.nml_code_length
        );
    }
    println!("selected: {}", report.best().label);
    Ok(())
}
