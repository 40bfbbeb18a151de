//! Complex log-gamma, digamma, trigamma and the inverse digamma.

use nmlkit::specialfn::{digamma, inverse_digamma, ln_gamma, log_gamma_complex, trigamma};
use num_complex::Complex64;

fn main() -> nmlkit::Result<()> {
    for z in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 1.0), Complex64::new(-2.5, 3.0)] {
        let lg = log_gamma_complex(z)?;
        println!("log Gamma({z}) = {lg:.12}");
    }
    println!("ln Gamma(100) = {:.12}", ln_gamma(100.0));
    for x in [0.1, 1.0, 10.0] {
        println!("psi({x}) = {:.12}, psi'({x}) = {:.12}", digamma(x)?, trigamma(x)?);
    }
    for y in [-10.0, 0.0, 5.0] {
        let x = inverse_digamma(y)?;
        println!("psi^-1({y}) = {x:.12} (psi back: {:.3e} off)", digamma(x)? - y);
    }
    Ok(())
}
