use std::f64::consts::PI;

use super::adaptive::{integrate_1d, neumaier_sum, Map};
use super::{IntegralResult, QuadConfig};
use crate::error::{Error, Result};

/// Tensor-product composite Simpson rule over a box of dimension ≤ 3, with a
/// Richardson estimate from the same grid at half resolution.
///
/// Infinite limits go through the same rational maps as [`integrate_1d`];
/// grid nodes that land at infinity contribute zero.
pub fn integrate_nd<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &[(f64, f64)],
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    let k = bounds.len();
    if k == 0 || k > 3 {
        return Err(Error::UnsupportedDimension(k));
    }
    cfg.validate()?;
    if bounds.iter().any(|&(a, b)| a.is_nan() || b.is_nan() || b < a) {
        return Err(Error::Config(format!("invalid integration box {bounds:?}")));
    }
    // Intervals per axis: a multiple of four so the coarse grid is Simpson too.
    let intervals = (cfg.grid_points_per_dim - 1).div_ceil(4) * 4;
    let nodes = intervals + 1;

    let axes: Vec<Vec<(f64, f64)>> = bounds
        .iter()
        .map(|&(a, b)| {
            let map = Map::new(a, b);
            let (ua, ub) = (map.to_unit(a), map.to_unit(b));
            let h = (ub - ua) / intervals as f64;
            (0..nodes)
                .map(|i| {
                    let s = ua + h * i as f64;
                    let (x, jac) = map.from_unit(s);
                    (x, jac * h)
                })
                .collect()
        })
        .collect();

    let simpson = |i: usize, stride: usize| -> f64 {
        let j = i / stride;
        let last = intervals / stride;
        let base = if j == 0 || j == last {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        base * stride as f64 / 3.0
    };

    let mut fine = Vec::with_capacity(nodes.pow(k as u32));
    let mut coarse = Vec::with_capacity(nodes.pow(k as u32) >> k);
    let mut evaluations = 0usize;
    let mut x = vec![0.0; k];
    let total = nodes.pow(k as u32);
    for flat in 0..total {
        let mut rem = flat;
        let mut jac = 1.0;
        let mut w_fine = 1.0;
        let mut w_coarse = 1.0;
        let mut on_coarse = true;
        let mut at_infinity = false;
        for axis in 0..k {
            let i = rem % nodes;
            rem /= nodes;
            let (xi, ji) = axes[axis][i];
            at_infinity |= !xi.is_finite() || !ji.is_finite();
            x[axis] = xi;
            jac *= ji;
            w_fine *= simpson(i, 1);
            if i % 2 == 0 {
                w_coarse *= simpson(i, 2);
            } else {
                on_coarse = false;
            }
        }
        if at_infinity {
            continue;
        }
        let v = f(&x) * jac;
        evaluations += 1;
        fine.push(w_fine * v);
        if on_coarse {
            coarse.push(w_coarse * v);
        }
    }
    let fine = neumaier_sum(fine.into_iter());
    let coarse = neumaier_sum(coarse.into_iter());
    let diff = fine - coarse;
    let value = fine + diff / 15.0;
    if !value.is_finite() {
        return Err(Error::Numerical("integrand produced a non-finite value".into()));
    }
    Ok(IntegralResult {
        value,
        error_estimate: diff.abs() / 15.0,
        evaluations,
        truncation_bound: 0.0,
    })
}

/// Iterated adaptive integration over a box: each axis is an
/// [`integrate_1d`] call whose integrand is the integral over the remaining
/// axes. Kinks and jumps are resolved as long as the adaptive sampling
/// sees them; a jump confined to a sliver narrower than the first Kronrod
/// node spacing can go unnoticed.
pub fn integrate_box<F: Fn(&[f64]) -> f64>(
    f: F,
    bounds: &[(f64, f64)],
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    if bounds.is_empty() || bounds.len() > 3 {
        return Err(Error::UnsupportedDimension(bounds.len()));
    }
    let mut x = vec![0.0; bounds.len()];
    iterate(&f, bounds, 0, &mut x, cfg)
}

fn iterate<F: Fn(&[f64]) -> f64>(
    f: &F,
    bounds: &[(f64, f64)],
    axis: usize,
    x: &mut Vec<f64>,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    let (a, b) = bounds[axis];
    if axis + 1 == bounds.len() {
        let cell = std::cell::RefCell::new(x.clone());
        return integrate_1d(
            |xi| {
                let mut p = cell.borrow_mut();
                p[axis] = xi;
                f(&p)
            },
            a,
            b,
            cfg,
        );
    }
    // An inner error of `e` everywhere moves this integral by `e (b − a)`.
    let width = b - a;
    let inner_cfg = QuadConfig {
        rel_tol: cfg.rel_tol * 0.1,
        abs_tol: if width.is_finite() && width > 0.0 {
            0.1 * cfg.abs_tol / width
        } else {
            0.1 * cfg.abs_tol
        },
        ..cfg.clone()
    };
    let prefix = std::cell::RefCell::new(x.clone());
    let worst_abs = std::cell::Cell::new(0.0f64);
    let evaluations = std::cell::Cell::new(0usize);
    let failure = std::cell::RefCell::new(None);
    let outer = integrate_1d(
        |xi| {
            let mut p = prefix.borrow().clone();
            p[axis] = xi;
            match iterate(f, bounds, axis + 1, &mut p, &inner_cfg) {
                Ok(r) => {
                    evaluations.set(evaluations.get() + r.evaluations);
                    worst_abs.set(worst_abs.get().max(r.error_estimate));
                    r.value
                }
                // A slice that stalls keeps its best estimate; its error
                // flows into the total.
                Err(Error::NonConvergence { value, error, .. }) if value.is_finite() && error.is_finite() => {
                    worst_abs.set(worst_abs.get().max(error));
                    value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        },
        a,
        b,
        cfg,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let inner_error = if width.is_finite() {
        worst_abs.get() * width
    } else {
        f64::INFINITY
    };
    Ok(IntegralResult {
        value: outer.value,
        error_estimate: outer.error_estimate + inner_error,
        evaluations: evaluations.get(),
        truncation_bound: 0.0,
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_on_unit_square() {
        let r = integrate_nd(|_| 1.0, &[(0.0, 1.0), (0.0, 1.0)], &QuadConfig::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn exponential_on_quadrant() {
        let r = integrate_nd(
            |x| (-x[0] - x[1]).exp(),
            &[(0.0, f64::INFINITY), (0.0, f64::INFINITY)],
            &QuadConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn maximum_on_unit_square() {
        let r = integrate_nd(|x| x[0].max(x[1]), &[(0.0, 1.0), (0.0, 1.0)], &QuadConfig::default()).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() <= 1e-5);
    }

    #[test]
    fn three_dimensional_product() {
        let cfg = QuadConfig {
            grid_points_per_dim: 33,
            ..QuadConfig::default()
        };
        let r = integrate_nd(|x| x[0] * x[1] * x[2], &[(0.0, 1.0), (0.0, 2.0), (0.0, 3.0)], &cfg).unwrap();
        assert_relative_eq!(r.value, 0.5 * 2.0 * 4.5, epsilon = 1e-12);
    }

    #[test]
    fn too_many_dimensions() {
        let b = [(0.0, 1.0); 4];
        assert!(matches!(
            integrate_nd(|_| 1.0, &b, &QuadConfig::default()),
            Err(Error::UnsupportedDimension(4))
        ));
        assert!(matches!(
            integrate_box(|_| 1.0, &b, &QuadConfig::default()),
            Err(Error::UnsupportedDimension(4))
        ));
    }

    #[test]
    fn iterated_box_with_a_kink() {
        // Pyramid max(0, 1 − x − y) over the unit square.
        let r = integrate_box(
            |x| (1.0 - x[0] - x[1]).max(0.0),
            &[(0.0, 1.0), (0.0, 1.0)],
            &QuadConfig::default(),
        )
        .unwrap();
        assert_relative_eq!(r.value, 1.0 / 6.0, epsilon = 1e-9);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert_relative_eq!(s, 2.0 / 15.0, epsilon = 1e-14);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        let (x, w) = gauss_legendre(5);
        assert_relative_eq!(x[2], 0.0, epsilon = 1e-15);
        assert_relative_eq!(w[2], 128.0 / 225.0, epsilon = 1e-14);
    }
}
