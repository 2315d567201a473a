//! Furstenberg entropy of nonsingular group actions, computed.
//!
//! - [`finset`], [`group`], [`measure`]: the group 2^ℕ_fin of finite subsets
//!   of ℕ, other countable groups, and finitely supported measures with
//!   convolution and the geometric average `μ̄ = Σ 2^{-n-1} μⁿ`.
//! - [`bernoulli`]: Bernoulli measures ω_p on 2^ℕ with lazily sampled points,
//!   exact Radon–Nikodym derivatives and the closed-form entropy
//!   `φ(p) Σ μ(T)|T|`.
//! - [`engine`], [`finite`]: the nonsingular-system contract, Monte Carlo and
//!   exact μ-entropy.
//! - [`cocycle`]: the binary odometer, its carry cocycle and skew products.
//! - [`spectral`]: Koopman matrices, Markov operators and the entropy bounds
//!   they give.

pub mod bernoulli;
pub mod cocycle;
pub mod engine;
pub mod error;
pub mod finite;
pub mod finset;
pub mod group;
pub mod measure;
pub mod sampling;
pub mod spectral;

pub use bernoulli::{phi, BernoulliParam, BernoulliShift, LazyPoint};
pub use engine::{EntropyEstimate, NonsingularSystem};
pub use error::{Error, Result};
pub use finset::FinSet;
pub use group::{Cyclic, FinSetGroup, Group, GroupTag, Integers, TableGroup};
pub use measure::{geometric_bar, Measure};

/// Library version embedded in experiment outputs.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
