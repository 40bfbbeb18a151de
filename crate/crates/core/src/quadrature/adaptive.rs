use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{IntegralResult, QuadConfig};
use crate::error::{Error, Result};

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_875_138_811,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Initial panel count up to which every panel is bisected once.
const FORCED_SPLIT_PANELS: usize = 8;

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One 21-point Gauss–Kronrod panel with the QUADPACK error heuristic.
fn qk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[10];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(centre - dx);
        let f2 = f(centre + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Segment { a, b, value, error }
}

/// Global adaptive bisection over the panels delimited by `points` (sorted,
/// finite).
pub(crate) fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    let mut heap = BinaryHeap::with_capacity(points.len() + 2 * cfg.max_subdivisions);
    let mut frozen = Vec::new();
    let mut evaluations = 0usize;
    let mut value = 0.0;
    let mut error = 0.0;
    // With few initial panels each is bisected once, outside the subdivision
    // budget, so that the Kronrod estimate is cross-checked against the two
    // halves.
    let mut pending = Vec::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let seg = qk21(f, w[0], w[1]);
            evaluations += 21;
            value += seg.value;
            error += seg.error;
            pending.push(seg);
        }
    }
    if pending.len() > FORCED_SPLIT_PANELS {
        heap.extend(pending.drain(..));
    }
    let mut subdivisions = 0usize;
    loop {
        let (worst, forced) = match pending.pop() {
            Some(seg) => (seg, true),
            None if error > cfg.tolerance(value) => match heap.pop() {
                Some(seg) => (seg, false),
                None => break,
            },
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        let too_narrow =
            (worst.b - worst.a) <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(1e-300);
        if too_narrow || mid <= worst.a || mid >= worst.b {
            frozen.push(worst);
            continue;
        }
        if !forced {
            if subdivisions >= cfg.max_subdivisions {
                heap.push(worst);
                let (v, e) = totals(&heap, &frozen);
                return Err(Error::NonConvergence {
                    message: format!("adaptive quadrature exceeded {} subdivisions", cfg.max_subdivisions),
                    value: v,
                    error: e,
                });
            }
            subdivisions += 1;
        }
        let mut left = qk21(f, worst.a, mid);
        let mut right = qk21(f, mid, worst.b);
        evaluations += 42;
        let refinement = 0.5 * (left.value + right.value - worst.value).abs();
        left.error = left.error.max(refinement);
        right.error = right.error.max(refinement);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    let (value, error) = totals(&heap, &frozen);
    if !value.is_finite() {
        return Err(Error::Numerical("integrand produced a non-finite value".into()));
    }
    Ok(IntegralResult {
        value,
        error_estimate: error,
        evaluations,
        truncation_bound: 0.0,
    })
}

/// Sums in left-endpoint order so the result does not depend on heap layout.
fn totals(heap: &BinaryHeap<Segment>, frozen: &[Segment]) -> (f64, f64) {
    let mut segs: Vec<Segment> = heap.iter().chain(frozen.iter()).copied().collect();
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = neumaier_sum(segs.iter().map(|s| s.value));
    let error = segs.iter().map(|s| s.error).sum();
    (value, error)
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Adaptive integral of `f` over `[a, b]`; either end may be infinite.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<IntegralResult> {
    integrate_1d_with_breaks(f, &[a, b], cfg)
}

/// Like [`integrate_1d`] with interior breakpoints; `points` must be
/// increasing and only its ends may be infinite.
pub fn integrate_1d_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    if points.len() < 2 {
        return Err(Error::Config("need at least two integration limits".into()));
    }
    if points.iter().any(|p| p.is_nan()) || points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config(format!("integration limits must increase: {points:?}")));
    }
    let interior = &points[1..points.len() - 1];
    if interior.iter().any(|p| !p.is_finite()) {
        return Err(Error::Config("only the outer limits may be infinite".into()));
    }
    let a = points[0];
    let b = points[points.len() - 1];
    if a == b {
        return Ok(IntegralResult::exact(0.0));
    }
    let map = Map::new(a, b);
    let mut u: Vec<f64> = points.iter().map(|&p| map.to_unit(p)).collect();
    u.sort_by(f64::total_cmp);
    u.dedup();
    let g = |s: f64| {
        let (x, jac) = map.from_unit(s);
        if !x.is_finite() || jac == 0.0 {
            return 0.0;
        }
        let fx = f(x);
        if fx == 0.0 {
            0.0
        } else {
            fx * jac
        }
    };
    adaptive(&g, &u, cfg)
}

/// Monotone rational maps from a bounded parameter to (semi-)infinite ranges.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Map {
    Finite,
    /// `x = a + s / (1 − s)`, `s ∈ [0, 1)`.
    Upper(f64),
    /// `x = b − (1 − s) / s`, `s ∈ (0, 1]`.
    Lower(f64),
    /// `x = s / (1 − s²)`, `s ∈ (−1, 1)`.
    Both,
}

impl Map {
    pub(crate) fn new(a: f64, b: f64) -> Self {
        match (a.is_finite(), b.is_finite()) {
            (true, true) => Map::Finite,
            (true, false) => Map::Upper(a),
            (false, true) => Map::Lower(b),
            (false, false) => Map::Both,
        }
    }

    pub(crate) fn to_unit(&self, x: f64) -> f64 {
        match *self {
            Map::Finite => x,
            Map::Upper(a) => {
                if x == f64::INFINITY {
                    1.0
                } else {
                    let d = x - a;
                    d / (1.0 + d)
                }
            }
            Map::Lower(b) => {
                if x == f64::NEG_INFINITY {
                    0.0
                } else {
                    1.0 / (1.0 + (b - x))
                }
            }
            Map::Both => {
                if x == f64::INFINITY {
                    1.0
                } else if x == f64::NEG_INFINITY {
                    -1.0
                } else if x == 0.0 {
                    0.0
                } else {
                    (-1.0 + (1.0 + 4.0 * x * x).sqrt()) / (2.0 * x)
                }
            }
        }
    }

    /// Returns `(x, dx/ds)`.
    pub(crate) fn from_unit(&self, s: f64) -> (f64, f64) {
        match *self {
            Map::Finite => (s, 1.0),
            Map::Upper(a) => {
                let r = 1.0 - s;
                (a + s / r, 1.0 / (r * r))
            }
            Map::Lower(b) => (b - (1.0 - s) / s, 1.0 / (s * s)),
            Map::Both => {
                let r = 1.0 - s * s;
                (s / r, (1.0 + s * s) / (r * r))
            }
        }
    }
}
