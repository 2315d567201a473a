//! Bernoulli product measures ω_p on 2^ℕ and the action of 2^ℕ_fin on them by
//! symmetric difference.
//!
//! For `T ∈ 2^ℕ_fin` the pushforward is `T_*ω_p = ∏_{n∈T} B(1-p) ∏_{n∉T} B(p)`,
//! so the Radon–Nikodym derivative is a product over the coordinates in `T`
//! and every computation touches finitely many coordinates of a point.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::engine::NonsingularSystem;
use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::group::FinSetGroup;
use crate::measure::{expected_size_and_max, Measure};
use crate::sampling::{sample_moments, Moments};

/// A success probability strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BernoulliParam(f64);

impl BernoulliParam {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(BernoulliParam(p))
        } else {
            Err(Error::InvalidBernoulliParam(p))
        }
    }

    pub const fn half() -> Self {
        BernoulliParam(0.5)
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// `log(p / (1 - p))`.
    pub fn log_odds(self) -> f64 {
        (self.0 / (1.0 - self.0)).ln()
    }
}

/// `φ(p) = (2p - 1) log(p / (1 - p))`, the KL divergence between B(p) and
/// B(1-p), in nats.
pub fn phi(p: BernoulliParam) -> f64 {
    (2.0 * p.0 - 1.0) * p.log_odds()
}

/// A point of 2^ℕ whose coordinates are drawn on demand.
///
/// Coordinate `n` of the underlying sample is a pure function of
/// `(seed, n)`: ChaCha8 keyed by `seed`, stream `n`, compared against the
/// bias. Group actions only ever change finitely many coordinates, which are
/// kept as a flip set on top of the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LazyPoint {
    seed: u64,
    bias: f64,
    flips: FinSet,
}

impl LazyPoint {
    /// A point distributed as ω_p, determined by `seed`.
    pub fn sample(seed: u64, p: BernoulliParam) -> Self {
        LazyPoint {
            seed,
            bias: p.get(),
            flips: FinSet::empty(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Coordinates where this point differs from its underlying sample.
    pub fn flips(&self) -> &FinSet {
        &self.flips
    }

    fn sampled_bit(&self, n: u32) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(n as u64);
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        u < self.bias
    }

    /// `x_n` for `n ≥ 1`.
    pub fn coordinate(&self, n: u32) -> bool {
        assert!(n >= 1, "coordinates are indexed from 1");
        self.sampled_bit(n) ^ self.flips.contains(n)
    }

    /// The first `m` coordinates `x_1 … x_m`.
    pub fn prefix(&self, m: u32) -> Vec<bool> {
        (1..=m).map(|n| self.coordinate(n)).collect()
    }

    /// The point with the coordinates in `t` flipped.
    pub fn act(&self, t: &FinSet) -> LazyPoint {
        LazyPoint {
            seed: self.seed,
            bias: self.bias,
            flips: self.flips.symdiff(t),
        }
    }

    /// Whether two points agree on coordinates `1..=m`.
    pub fn agrees_with(&self, other: &LazyPoint, m: u32) -> bool {
        (1..=m).all(|n| self.coordinate(n) == other.coordinate(n))
    }
}

/// `log(dT_*ω_p / dω_p)(x) = Σ_{n∈T} (1 - 2x_n) log(p / (1 - p))`.
///
/// Since `T⁻¹ = T` this is also `log(dT⁻¹_*ω_p / dω_p)(x)`. Only the
/// coordinates in `T` are read.
pub fn log_rn(t: &FinSet, x: &LazyPoint, p: BernoulliParam) -> f64 {
    let balance: i64 = t.iter().map(|n| if x.coordinate(n) { -1 } else { 1 }).sum();
    balance as f64 * p.log_odds()
}

/// `φ(p) Σ_T μ(T)|T|`, the μ-entropy of (2^ℕ, ω_p).
pub fn exact_entropy_finset_action(mu: &Measure<FinSetGroup>, p: BernoulliParam) -> f64 {
    phi(p) * expected_size_and_max(mu).0
}

/// 2^ℕ_fin acting on (2^ℕ, ω_p) by symmetric difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BernoulliShift {
    pub p: BernoulliParam,
}

impl BernoulliShift {
    pub fn new(p: BernoulliParam) -> Self {
        BernoulliShift { p }
    }
}

impl NonsingularSystem for BernoulliShift {
    type Group = FinSetGroup;
    type State = LazyPoint;

    fn group(&self) -> &FinSetGroup {
        &FinSetGroup
    }

    fn sample_state(&self, seed: u64) -> LazyPoint {
        LazyPoint::sample(seed, self.p)
    }

    fn apply(&self, t: &FinSet, x: &LazyPoint) -> Result<LazyPoint> {
        Ok(x.act(t))
    }

    fn log_rn_inv(&self, t: &FinSet, x: &LazyPoint) -> Result<f64> {
        Ok(log_rn(t, x, self.p))
    }

    fn is_measure_preserving(&self) -> bool {
        self.p.get() == 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    EvidenceOfSingularity,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::EvidenceOfSingularity => "evidence-of-singularity",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub mean: f64,
    pub stderr: f64,
    pub upper_bound: f64,
    pub n_samples: usize,
    pub alpha: f64,
    pub p: f64,
    pub verdict: Verdict,
}

pub const MIN_SEPARATION_SAMPLES: usize = 30;

/// Statistical test that an unknown law ν on 2^ℕ is singular to ω_p.
///
/// Each sample contributes the frequency `S_n(x) = (1/n) Σ_k x_{i_k}` over
/// `indices`. Under ω_p these frequencies concentrate at `p`; if a one-sided
/// `1 - alpha` normal upper confidence bound on their mean falls below `p`,
/// ν puts its mass where ω_p does not. A failed test is never evidence of
/// absolute continuity.
pub fn separation_test<F>(
    sampler: F,
    indices: &[u32],
    p: BernoulliParam,
    n_samples: usize,
    alpha: f64,
    seed: u64,
) -> Result<SeparationReport>
where
    F: Fn(u64) -> LazyPoint + Sync,
{
    if p.get() <= 0.5 {
        return Err(Error::InvalidArgument(format!("separation test needs p > 1/2, got {}", p.get())));
    }
    if indices.is_empty() || indices.contains(&0) {
        return Err(Error::InvalidArgument("indices must be a nonempty list of naturals ≥ 1".into()));
    }
    if n_samples < MIN_SEPARATION_SAMPLES {
        return Err(Error::TooFewSamples {
            got: n_samples,
            min: MIN_SEPARATION_SAMPLES,
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let len = indices.len() as f64;
    let m: Moments = sample_moments(n_samples, seed, |s| {
        let x = sampler(s);
        let hits = indices.iter().filter(|&&i| x.coordinate(i)).count();
        Ok(hits as f64 / len)
    })?;
    let z = Normal::standard().inverse_cdf(1.0 - alpha);
    let stderr = m.stderr();
    let upper_bound = m.mean + z * stderr;
    let verdict = if upper_bound < p.get() {
        Verdict::EvidenceOfSingularity
    } else {
        Verdict::Inconclusive
    };
    Ok(SeparationReport {
        mean: m.mean,
        stderr,
        upper_bound,
        n_samples,
        alpha,
        p: p.get(),
        verdict,
    })
}
