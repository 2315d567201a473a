//! The nonsingular-system contract and Furstenberg entropy
//! `h_μ(X, η) = Σ_g μ(g) ∫ -log(dg⁻¹_*η/dη) dη`.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::measure::{geometric_bar, Measure};
use crate::sampling::sample_moments;

type Elem<S> = <<S as NonsingularSystem>::Group as Group>::Elem;

/// A group acting nonsingularly on a probability space `(X, η)`.
///
/// Direction convention: [`NonsingularSystem::log_rn_inv`] returns
/// `log(dg⁻¹_*η/dη)(x)`, the integrand of the entropy. For an action on a
/// countable space this is `log(η(gx)/η(x))`, so it satisfies the cocycle
/// rule `r(gh, x) = r(g, hx) + r(h, x)`.
pub trait NonsingularSystem: Sync {
    type Group: Group;
    type State: Clone + Debug + PartialEq + Send + Sync;

    fn group(&self) -> &Self::Group;

    /// A state distributed as η, determined by `seed`.
    fn sample_state(&self, seed: u64) -> Self::State;

    fn apply(&self, g: &Elem<Self>, x: &Self::State) -> Result<Self::State>;

    fn log_rn_inv(&self, g: &Elem<Self>, x: &Self::State) -> Result<f64>;

    /// Whether η is known to be invariant.
    fn is_measure_preserving(&self) -> bool;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Nats.
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
    /// Mass dropped by a geometric-average truncation, 0 otherwise.
    pub truncation_tail: f64,
}

fn check_group<S: NonsingularSystem>(system: &S, mu: &Measure<S::Group>) -> Result<()> {
    if mu.group() != system.group() {
        return Err(Error::GroupMismatch {
            left: system.group().tag(),
            right: mu.group().tag(),
        });
    }
    Ok(())
}

/// `Σ_g μ(g) · (-log(dg⁻¹_*η/dη)(x))` at a single state.
pub fn entropy_integrand<S: NonsingularSystem>(
    system: &S,
    mu: &Measure<S::Group>,
    x: &S::State,
) -> Result<f64> {
    let mut acc = 0.0;
    for (g, w) in mu.atoms() {
        acc -= w * system.log_rn_inv(g, x)?;
    }
    Ok(acc)
}

/// Monte Carlo μ-entropy: the sum over atoms is exact, the integral over X
/// is averaged over `n_samples` states shared by all atoms.
pub fn mc_entropy<S: NonsingularSystem>(
    system: &S,
    mu: &Measure<S::Group>,
    n_samples: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    check_group(system, mu)?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let m = sample_moments(n_samples, seed, |s| {
        entropy_integrand(system, mu, &system.sample_state(s))
    })?;
    Ok(EntropyEstimate {
        mean: m.mean,
        stderr: m.stderr(),
        n_samples,
        seed,
        truncation_tail: 0.0,
    })
}

/// [`mc_entropy`] against the truncated geometric average `μ̄_N`.
pub fn entropy_of_bar<S: NonsingularSystem>(
    system: &S,
    mu: &Measure<S::Group>,
    truncation: usize,
    n_samples: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    let bar = geometric_bar(mu, truncation);
    let mut est = mc_entropy(system, &bar.measure, n_samples, seed)?;
    est.truncation_tail = bar.tail;
    Ok(est)
}

/// `|r(gh, x) - r(g, hx) - r(h, x)|` for `r = log_rn_inv`.
pub fn chain_rule_defect<S: NonsingularSystem>(
    system: &S,
    g: &Elem<S>,
    h: &Elem<S>,
    x: &S::State,
) -> Result<f64> {
    let gh = system.group().op(g, h);
    let hx = system.apply(h, x)?;
    let lhs = system.log_rn_inv(&gh, x)?;
    let rhs = system.log_rn_inv(g, &hx)? + system.log_rn_inv(h, x)?;
    Ok((lhs - rhs).abs())
}

/// Whether `(gh)x = g(hx)`.
pub fn respects_group_law<S: NonsingularSystem>(
    system: &S,
    g: &Elem<S>,
    h: &Elem<S>,
    x: &S::State,
) -> Result<bool> {
    let gh = system.group().op(g, h);
    Ok(system.apply(&gh, x)? == system.apply(g, &system.apply(h, x)?)?)
}
