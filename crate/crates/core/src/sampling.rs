//! Reproducible parallel Monte Carlo.
//!
//! Samples are split into fixed batches of [`BATCH`]. Batch `b` draws its
//! per-sample seeds from ChaCha stream `b` of the master seed, and batch
//! statistics are merged in batch order, so the result depends only on
//! `(seed, n)` and not on the thread count or scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;

pub const BATCH: usize = 1024;

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }

    pub fn sample_variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.sample_variance() / self.n as f64).sqrt()
        }
    }
}

/// The seeds handed to samples `0..n` of batch `batch`.
pub fn batch_seeds(seed: u64, batch: usize, len: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch as u64);
    (0..len).map(|_| rng.next_u64()).collect()
}

/// Evaluates `f` on `n` derived sample seeds and returns the moments of the
/// values. The first error in batch order wins.
pub fn sample_moments<F>(n: usize, seed: u64, f: F) -> Result<Moments>
where
    F: Fn(u64) -> Result<f64> + Sync,
{
    let batches = n.div_ceil(BATCH);
    let parts: Vec<Result<Moments>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH.min(n - b * BATCH);
            let mut m = Moments::default();
            for s in batch_seeds(seed, b, len) {
                m.push(f(s)?);
            }
            Ok(m)
        })
        .collect();
    parts
        .into_iter()
        .try_fold(Moments::default(), |acc, part| Ok(acc.merge(part?)))
}

/// Sequential variant: every seed `sample_moments` would use, in order.
pub fn all_seeds(n: usize, seed: u64) -> Vec<u64> {
    (0..n.div_ceil(BATCH))
        .flat_map(|b| batch_seeds(seed, b, BATCH.min(n - b * BATCH)))
        .collect()
}
