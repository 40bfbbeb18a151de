//! Numerical integration engines: adaptive Gauss–Kronrod on finite and
//! (semi-)infinite intervals, single-point Fourier inversion of
//! characteristic functions, tensor grids for low-dimensional boxes and
//! seeded Monte Carlo.

mod adaptive;
mod fourier;
mod grid;
mod monte_carlo;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adaptive::{integrate_1d, integrate_1d_with_breaks};
pub use fourier::fourier_inverse;
pub use grid::{gauss_legendre, integrate_box, integrate_nd};
pub use monte_carlo::{monte_carlo, monte_carlo_multi, stream_rng, McEstimate};

/// Tolerances, truncation and grid parameters shared by every integral.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Frequency cutoff Ω for Fourier inversion; `None` picks it from the
    /// tail bound.
    pub freq_truncation: Option<f64>,
    pub max_subdivisions: usize,
    /// Points per axis of the tensor grid; must be odd so the grid contains
    /// the centre.
    pub grid_points_per_dim: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            freq_truncation: None,
            max_subdivisions: 2000,
            grid_points_per_dim: 257,
            mc_samples: 1_000_000,
            seed: 0x5eed_2019,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Config(format!(
                "tolerances must be positive (rel_tol = {}, abs_tol = {})",
                self.rel_tol, self.abs_tol
            )));
        }
        if self.grid_points_per_dim < 5 || self.grid_points_per_dim % 2 == 0 {
            return Err(Error::Config(format!(
                "grid_points_per_dim must be odd and >= 5, got {}",
                self.grid_points_per_dim
            )));
        }
        if let Some(omega) = self.freq_truncation {
            if !(omega > 0.0 && omega.is_finite()) {
                return Err(Error::Config(format!("freq_truncation must be positive, got {omega}")));
            }
        }
        if self.mc_samples < 2 {
            return Err(Error::Config("mc_samples must be at least 2".into()));
        }
        Ok(())
    }

    /// Same config with both tolerances scaled by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..self.clone()
        }
    }

    pub(crate) fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    /// Estimated mass discarded by truncating an infinite range.
    pub truncation_bound: f64,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            evaluations: 0,
            truncation_bound: 0.0,
        }
    }

    /// Error estimate plus truncation bound.
    pub fn total_error(&self) -> f64 {
        self.error_estimate + self.truncation_bound
    }
}
