pub mod cli;
pub mod closed_form;
pub mod error;
pub mod fourier_engine;
pub mod models;
pub mod oracle;
pub mod quadrature;
pub mod specialfn;

pub use error::{Error, Result};
