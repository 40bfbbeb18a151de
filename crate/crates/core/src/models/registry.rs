use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::families::*;
use super::{ExponentialFamily, Luckiness};
use crate::error::{Error, Result};

/// A fixed (known) parameter of a registry row.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    /// Whether the parameter must be strictly positive.
    pub positive: bool,
    pub meaning: &'static str,
}

/// Metadata of one registry row.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ModelInfo {
    pub id: &'static str,
    pub title: &'static str,
    pub statistic: &'static str,
    pub canonical: &'static str,
    pub expectation: &'static str,
    pub partition: &'static str,
    pub complexity: &'static str,
    pub params: &'static [ParamInfo],
}

const POS: bool = true;

static REGISTRY: [ModelInfo; 6] = [
    ModelInfo {
        id: "normal-known-variance",
        title: "Normal dist. with known variance",
        statistic: "x",
        canonical: "eta = mu / sigma2",
        expectation: "mu in (-inf, inf)",
        partition: "sqrt(2 pi sigma2) exp(sigma2 eta^2 / 2)",
        complexity: "sqrt(n / (2 pi sigma2)) * int w(mu) dmu",
        params: &[ParamInfo {
            name: "sigma2",
            default: 1.0,
            positive: POS,
            meaning: "known variance",
        }],
    },
    ModelInfo {
        id: "normal-known-mean",
        title: "Normal dist. with known mean",
        statistic: "(x - mean)^2",
        canonical: "eta = -1 / (2 sigma2)",
        expectation: "sigma2 in (0, inf)",
        partition: "sqrt(pi) / sqrt(-eta)",
        complexity: "(n/2)^(n/2) e^(-n/2) / Gamma(n/2) * int w(mu)/mu dmu",
        params: &[ParamInfo {
            name: "mean",
            default: 0.0,
            positive: false,
            meaning: "known mean",
        }],
    },
    ModelInfo {
        id: "laplace-known-mean",
        title: "Laplace dist. with known mean",
        statistic: "|x - mean|",
        canonical: "eta = -1 / b",
        expectation: "b in (0, inf)",
        partition: "2 / (-eta)",
        complexity: "n^n e^(-n) / Gamma(n) * int w(mu)/mu dmu",
        params: &[ParamInfo {
            name: "mean",
            default: 0.0,
            positive: false,
            meaning: "known mean",
        }],
    },
    ModelInfo {
        id: "gamma-known-shape",
        title: "Gamma dist. with known shape",
        statistic: "x",
        canonical: "eta = -kappa / mu",
        expectation: "mu in (0, inf)",
        partition: "Gamma(kappa) / (-eta)^kappa",
        complexity: "(kappa n)^(kappa n) e^(-kappa n) / Gamma(kappa n) * int w(mu)/mu dmu",
        params: &[ParamInfo {
            name: "kappa",
            default: 1.0,
            positive: POS,
            meaning: "known shape (1 = exponential)",
        }],
    },
    ModelInfo {
        id: "weibull-known-shape",
        title: "Weibull dist. with known shape",
        statistic: "x^shape",
        canonical: "eta = -1 / mu",
        expectation: "mu in (0, inf)",
        partition: "1 / (-eta)",
        complexity: "n^n e^(-n) / Gamma(n) * int w(mu)/mu dmu",
        params: &[ParamInfo {
            name: "shape",
            default: 1.0,
            positive: POS,
            meaning: "known shape",
        }],
    },
    ModelInfo {
        id: "gamma-known-scale",
        title: "Gamma dist. with known scale",
        statistic: "log x",
        canonical: "eta = psi^-1(mu - log beta) - 1",
        expectation: "mu = psi(eta + 1) + log beta in (-inf, inf)",
        partition: "Gamma(eta + 1) beta^(eta + 1)",
        complexity: "no closed form (shape-parameter Fourier integral)",
        params: &[ParamInfo {
            name: "beta",
            default: 1.0,
            positive: POS,
            meaning: "known scale (2 = chi-squared)",
        }],
    },
];

pub fn registry() -> &'static [ModelInfo] {
    &REGISTRY
}

pub fn model_ids() -> Vec<&'static str> {
    REGISTRY.iter().map(|m| m.id).collect()
}

fn info(id: &str) -> Result<&'static ModelInfo> {
    REGISTRY.iter().find(|m| m.id == id).ok_or_else(|| {
        Error::Config(format!("unknown model '{id}'; valid ids: {}", model_ids().join(", ")))
    })
}

/// Builds the registry model `id`; unspecified parameters take their
/// defaults.
pub fn build(id: &str, params: &BTreeMap<String, f64>) -> Result<Arc<dyn ExponentialFamily>> {
    let row = info(id)?;
    for name in params.keys() {
        if !row.params.iter().any(|p| p.name == name) {
            let valid: Vec<&str> = row.params.iter().map(|p| p.name).collect();
            return Err(Error::Config(format!(
                "{id} has no parameter '{name}'; expected {}",
                valid.join(", ")
            )));
        }
    }
    let get = |name: &str| -> Result<f64> {
        let p = row.params.iter().find(|p| p.name == name).expect("declared parameter");
        let v = params.get(name).copied().unwrap_or(p.default);
        if !v.is_finite() || (p.positive && v <= 0.0) {
            return Err(Error::Config(format!("{id}: {name} must be {}, got {v}", if p.positive { "positive" } else { "finite" })));
        }
        Ok(v)
    };
    Ok(match id {
        "normal-known-variance" => Arc::new(NormalKnownVariance { sigma2: get("sigma2")? }),
        "normal-known-mean" => Arc::new(NormalKnownMean { mean: get("mean")? }),
        "laplace-known-mean" => Arc::new(LaplaceKnownMean { mean: get("mean")? }),
        "gamma-known-shape" => Arc::new(GammaKnownShape { kappa: get("kappa")? }),
        "weibull-known-shape" => Arc::new(WeibullKnownShape { shape: get("shape")? }),
        "gamma-known-scale" => Arc::new(GammaKnownScale { beta: get("beta")? }),
        _ => unreachable!("registry ids are matched above"),
    })
}

/// `[1, e]` for positive parameters, `[0, 1]` for real-valued ones.
pub fn default_window(model: &dyn ExponentialFamily) -> Vec<(f64, f64)> {
    model
        .expectation_domain()
        .iter()
        .map(|iv| if iv.lo >= 0.0 { (1.0, std::f64::consts::E) } else { (0.0, 1.0) })
        .collect()
}

/// A registry model with its fixed parameters and luckiness.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub model_id: String,
    pub fixed_params: BTreeMap<String, f64>,
    pub luckiness: Luckiness,
}

impl ModelSpec {
    pub fn new(model_id: &str, fixed_params: &[(&str, f64)], luckiness: Luckiness) -> Self {
        ModelSpec {
            model_id: model_id.to_string(),
            fixed_params: fixed_params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            luckiness,
        }
    }

    /// Builds the model and checks the luckiness against its domain.
    pub fn model(&self) -> Result<Arc<dyn ExponentialFamily>> {
        let m = build(&self.model_id, &self.fixed_params)?;
        self.luckiness.validate_for(m.as_ref())?;
        Ok(m)
    }

    /// `model[:key=value...]` followed by the window, e.g.
    /// `gamma-known-shape:kappa=2:window=1,2.5`.
    pub fn label(&self) -> String {
        let mut s = self.model_id.clone();
        for (k, v) in &self.fixed_params {
            s.push_str(&format!(":{k}={v}"));
        }
        if let Some(w) = self.luckiness.window() {
            let parts: Vec<String> = w.iter().map(|(a, b)| format!("{a},{b}")).collect();
            s.push_str(&format!(":window={}", parts.join(";")));
        }
        s
    }
}

/// Parses `a,b` into a window.
pub fn parse_window(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(Error::Config(format!("window must be 'a,b', got '{text}'")));
    };
    let parse = |v: &str| {
        v.parse::<f64>()
            .map_err(|_| Error::Config(format!("window bound '{v}' is not a number")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if !(a < b) {
        return Err(Error::Config(format!("window [{a}, {b}] is empty")));
    }
    Ok((a, b))
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;

    /// Inverse of [`ModelSpec::label`]; without `window=` the model's
    /// default window is used.
    fn from_str(text: &str) -> Result<Self> {
        let mut fields = text.split(':');
        let id = fields.next().unwrap_or_default().trim();
        info(id)?;
        let mut fixed_params = BTreeMap::new();
        let mut window = None;
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value in '{text}', got '{field}'")))?;
            let key = key.trim();
            if key == "window" {
                window = Some(parse_window(value)?);
            } else {
                let v = value
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("{key} = '{value}' is not a number")))?;
                fixed_params.insert(key.to_string(), v);
            }
        }
        let window = match window {
            Some(w) => vec![w],
            None => default_window(build(id, &fixed_params)?.as_ref()),
        };
        Ok(ModelSpec {
            model_id: id.to_string(),
            fixed_params,
            luckiness: Luckiness::Indicator(window),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::ClosedFormFamily;

    #[test]
    fn six_rows() {
        assert_eq!(registry().len(), 6);
        for row in registry() {
            let m = build(row.id, &BTreeMap::new()).unwrap();
            assert_eq!(m.id(), row.id);
        }
    }

    #[test]
    fn footnoted_special_cases() {
        let exp = build("gamma-known-shape", &BTreeMap::from([("kappa".into(), 1.0)])).unwrap();
        assert_eq!(exp.closed_form(), Some(ClosedFormFamily::ExponentialType { c: 1.0, m: 1.0 }));
        let chi = build("gamma-known-scale", &BTreeMap::from([("beta".into(), 2.0)])).unwrap();
        assert_eq!(chi.closed_form(), Some(ClosedFormFamily::ChiSquaredType { beta: 2.0 }));
    }

    #[test]
    fn bad_ids_and_params() {
        let e = build("poisson", &BTreeMap::new()).unwrap_err().to_string();
        assert!(e.contains("gamma-known-scale"), "{e}");
        assert!(build("gamma-known-shape", &BTreeMap::from([("kappa".into(), -1.0)])).is_err());
        assert!(build("gamma-known-shape", &BTreeMap::from([("beta".into(), 1.0)])).is_err());
    }

    #[test]
    fn default_windows() {
        let m = build("laplace-known-mean", &BTreeMap::new()).unwrap();
        assert_eq!(default_window(m.as_ref()), vec![(1.0, std::f64::consts::E)]);
        let m = build("gamma-known-scale", &BTreeMap::new()).unwrap();
        assert_eq!(default_window(m.as_ref()), vec![(0.0, 1.0)]);
    }

    #[test]
    fn spec_strings_round_trip() {
        let spec: ModelSpec = "gamma-known-shape:kappa=2:window=1,2.5".parse().unwrap();
        assert_eq!(spec.fixed_params["kappa"], 2.0);
        assert_eq!(spec.luckiness.window(), Some(&[(1.0, 2.5)][..]));
        assert_eq!(spec.label(), "gamma-known-shape:kappa=2:window=1,2.5");
        let again: ModelSpec = spec.label().parse().unwrap();
        assert_eq!(again.label(), spec.label());
        let bare: ModelSpec = "normal-known-variance".parse().unwrap();
        assert_eq!(bare.luckiness.window(), Some(&[(0.0, 1.0)][..]));
        assert!("gamma-known-shape:kappa".parse::<ModelSpec>().is_err());
        assert!("gamma-known-shape:window=2,1".parse::<ModelSpec>().is_err());
    }
}
