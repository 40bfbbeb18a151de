//! Lists the model registry and evaluates each model's density, Fisher
//! information and parametric complexity at its default window.

use std::collections::BTreeMap;

use nmlkit::closed_form::log_lpc_table1;
use nmlkit::fourier_engine::lpc_fourier;
use nmlkit::models::{build, default_window, fisher_info, log_density, registry, Luckiness};
use nmlkit::quadrature::QuadConfig;

fn main() -> nmlkit::Result<()> {
    let cfg = QuadConfig::default();
    let n = 10;
    println!("{:<24} {:>10} {:>12} {:>14} {:>14}", "model", "mu", "I(mu)", "closed form", "fourier");
    for row in registry() {
        let model = build(row.id, &BTreeMap::new())?;
        let window = default_window(model.as_ref());
        let mu = [0.5 * (window[0].0 + window[0].1)];
        let info = fisher_info(model.as_ref(), &mu)?[(0, 0)];
        let w = Luckiness::Indicator(window);
        let closed = match log_lpc_table1(model.as_ref(), &w, n) {
            Ok(r) => format!("{:.8}", r.log_value),
            Err(_) => "-".to_string(),
        };
        let fourier = lpc_fourier(model.as_ref(), &w, n, &cfg)?;
        println!(
            "{:<24} {:>10.4} {:>12.6} {:>14} {:>14.8}",
            row.id, mu[0], info, closed, fourier.log_value
        );
        let x = if model.data_support().lo >= 0.0 { 1.0 } else { 0.3 };
        println!("    {}; log p({x}; mu) = {:.6}", row.title, log_density(model.as_ref(), x, &mu)?);
    }
    Ok(())
}
