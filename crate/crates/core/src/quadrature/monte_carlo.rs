use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{IntegralResult, QuadConfig};
use crate::error::Result;

/// Samples drawn from one ChaCha stream before moving to the next.
const CHUNK: usize = 1 << 14;

/// The `stream`-th independent ChaCha stream under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Clone, Copy, Default)]
struct Welford {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Welford) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n / n;
        self.m2 += other.m2 + d * d * self.n * other.n / n;
        self.n = n;
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        McEstimate {
            mean: self.mean,
            stderr: (var / self.n).sqrt(),
            samples: self.n as usize,
        }
    }
}

/// Sample means of `K` statistics of the same draws, with standard errors.
///
/// Draws are split into fixed-size chunks, each from its own stream of the
/// seed, and merged in chunk order, so the result depends only on
/// `(samples, seed)`.
pub fn monte_carlo_multi<S, const K: usize>(
    f: impl Fn(&S) -> [f64; K],
    sampler: impl Fn(&mut ChaCha8Rng) -> S,
    samples: usize,
    seed: u64,
) -> [McEstimate; K] {
    let mut total = [Welford::default(); K];
    let mut done = 0usize;
    let mut stream = 0u64;
    while done < samples {
        let count = CHUNK.min(samples - done);
        let mut rng = stream_rng(seed, stream);
        let mut chunk = [Welford::default(); K];
        for _ in 0..count {
            let s = sampler(&mut rng);
            let v = f(&s);
            for (acc, x) in chunk.iter_mut().zip(v) {
                acc.push(x);
            }
        }
        for (acc, c) in total.iter_mut().zip(&chunk) {
            acc.merge(c);
        }
        done += count;
        stream += 1;
    }
    total.map(|w| w.estimate())
}

/// Plain Monte Carlo mean of `f` under `sampler`; the error estimate is the
/// standard error.
pub fn monte_carlo<S>(
    f: impl Fn(&S) -> f64,
    sampler: impl Fn(&mut ChaCha8Rng) -> S,
    cfg: &QuadConfig,
) -> Result<IntegralResult> {
    cfg.validate()?;
    let [est] = monte_carlo_multi(|s| [f(s)], sampler, cfg.mc_samples, cfg.seed);
    Ok(IntegralResult {
        value: est.mean,
        error_estimate: est.stderr,
        evaluations: est.samples,
        truncation_bound: 0.0,
    })
}
