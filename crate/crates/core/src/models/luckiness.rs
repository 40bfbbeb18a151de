use std::fmt;
use std::sync::Arc;

use super::{ExponentialFamily, Interval};
use crate::error::{Error, Result};

type WeightFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Non-negative weight `w(μ)` over the expectation domain.
#[derive(Clone)]
pub enum Luckiness {
    /// 1 on a closed box of expectation parameters, 0 elsewhere.
    Indicator(Vec<(f64, f64)>),
    /// An arbitrary weight. `support`, when given, is a box outside of which
    /// the weight vanishes; otherwise the whole expectation domain is used.
    Smooth {
        weight: WeightFn,
        support: Option<Vec<(f64, f64)>>,
    },
}

impl fmt::Debug for Luckiness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Luckiness::Indicator(w) => f.debug_tuple("Indicator").field(w).finish(),
            Luckiness::Smooth { support, .. } => f
                .debug_struct("Smooth")
                .field("support", support)
                .finish_non_exhaustive(),
        }
    }
}

impl Luckiness {
    /// Indicator of `[a, b]` for one-dimensional models.
    pub fn interval(a: f64, b: f64) -> Self {
        Luckiness::Indicator(vec![(a, b)])
    }

    pub fn smooth(weight: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, support: Option<Vec<(f64, f64)>>) -> Self {
        Luckiness::Smooth {
            weight: Arc::new(weight),
            support,
        }
    }

    /// Identically zero weight.
    pub fn zero() -> Self {
        Luckiness::smooth(|_| 0.0, None)
    }

    pub fn weight(&self, mu: &[f64]) -> f64 {
        match self {
            Luckiness::Indicator(window) => {
                let inside = mu.iter().zip(window).all(|(m, &(a, b))| *m >= a && *m <= b);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            Luckiness::Smooth { weight, support } => {
                if let Some(s) = support {
                    if mu.iter().zip(s).any(|(m, &(a, b))| *m < a || *m > b) {
                        return 0.0;
                    }
                }
                weight(mu)
            }
        }
    }

    /// The window of an indicator weight.
    pub fn window(&self) -> Option<&[(f64, f64)]> {
        match self {
            Luckiness::Indicator(w) => Some(w),
            Luckiness::Smooth { .. } => None,
        }
    }

    /// Box to integrate over for `model`.
    pub fn support_box(&self, model: &dyn ExponentialFamily) -> Vec<(f64, f64)> {
        match self {
            Luckiness::Indicator(w) => w.clone(),
            Luckiness::Smooth { support: Some(s), .. } => s.clone(),
            Luckiness::Smooth { support: None, .. } => {
                model.expectation_domain().iter().map(|iv| (iv.lo, iv.hi)).collect()
            }
        }
    }

    /// Checks dimensions and that the integration box sits inside the
    /// expectation domain (strictly for an indicator).
    pub fn validate_for(&self, model: &dyn ExponentialFamily) -> Result<()> {
        let dom = model.expectation_domain();
        let bx = self.support_box(model);
        if bx.len() != dom.len() {
            return Err(Error::Config(format!(
                "luckiness box has {} coordinates, {} expects {}",
                bx.len(),
                model.id(),
                dom.len()
            )));
        }
        let strict = matches!(self, Luckiness::Indicator(_));
        for (k, (&(a, b), iv)) in bx.iter().zip(&dom).enumerate() {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::Config(format!("window coordinate {k} is empty: [{a}, {b}]")));
            }
            if strict && (!a.is_finite() || !b.is_finite()) {
                return Err(Error::Config(format!(
                    "window coordinate {k} must be bounded, got [{a}, {b}]"
                )));
            }
            let inside = if strict {
                iv.contains(a) && iv.contains(b)
            } else {
                a >= iv.lo && b <= iv.hi
            };
            if !inside {
                return Err(Error::Domain(format!(
                    "window [{a}, {b}] leaves the parameter domain ({}, {}) of {}",
                    iv.lo,
                    iv.hi,
                    model.id()
                )));
            }
        }
        Ok(())
    }

    /// Interval view of the box, coordinate by coordinate.
    pub fn intervals(&self, model: &dyn ExponentialFamily) -> Vec<Interval> {
        self.support_box(model)
            .into_iter()
            .map(|(a, b)| Interval::new(a, b))
            .collect()
    }
}
