//! Cocycles into 2^ℕ_fin, the binary odometer with its carry cocycle, and
//! skew products over a measure-preserving base.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bernoulli::{log_rn, phi, BernoulliParam, LazyPoint};
use crate::engine::{EntropyEstimate, NonsingularSystem};
use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::group::{Group, Integers};
use crate::measure::Measure;
use crate::sampling::sample_moments;

/// A cocycle `c: G × X → 2^ℕ_fin`, i.e. `c(gh, x) = c(g, hx) △ c(h, x)`.
pub trait Cocycle<G: Group, X>: Sync {
    fn evaluate(&self, g: &G::Elem, x: &X) -> Result<FinSet>;
}

/// `c ≡ ∅`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrivialCocycle;

impl<G: Group, X> Cocycle<G, X> for TrivialCocycle {
    fn evaluate(&self, _: &G::Elem, _: &X) -> Result<FinSet> {
        Ok(FinSet::empty())
    }
}

/// `c(k, x) = {k mod 5 + 1}`. Not a cocycle; it exists to exercise
/// [`cocycle_identity_check`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ResidueMap;

impl<X> Cocycle<Integers, X> for ResidueMap {
    fn evaluate(&self, k: &i64, _: &X) -> Result<FinSet> {
        FinSet::singleton(k.rem_euclid(5) as u32 + 1)
    }
}

/// Carry steps allowed past the last binary digit of `|k|`.
pub const ODOMETER_CARRY_CAP: usize = 1 << 10;

/// The coordinates changed by adding `k` to `x` as a little-endian 2-adic
/// integer (`x_1` is the units digit). Negative `k` subtracts with borrow.
///
/// Only the digits up to the last carry are read.
pub fn odometer_flips(k: i64, x: &LazyPoint) -> Result<FinSet> {
    let m = k.unsigned_abs();
    let digits = u64::BITS - m.leading_zeros();
    let mut flips = Vec::new();
    let mut carry = false;
    let mut i: u32 = 1;
    loop {
        let past = i > digits;
        if past && !carry {
            break;
        }
        if past && (i - digits) as usize > ODOMETER_CARRY_CAP {
            return Err(Error::CarryCap {
                k,
                seed: x.seed(),
                cap: ODOMETER_CARRY_CAP,
            });
        }
        let kb = !past && (m >> (i - 1)) & 1 == 1;
        let xb = x.coordinate(i);
        if kb ^ carry {
            flips.push(i);
        }
        carry = if k > 0 {
            (xb && kb) || (xb && carry) || (kb && carry)
        } else {
            (xb as i8) - (kb as i8) - (carry as i8) < 0
        };
        i += 1;
    }
    Ok(FinSet::new(flips).expect("flips are increasing and ≥ 1"))
}

/// `x + k` in the odometer.
pub fn odometer_add(k: i64, x: &LazyPoint) -> Result<LazyPoint> {
    Ok(x.act(&odometer_flips(k, x)?))
}

/// The carry cocycle `c(k, x) = {n : (x + k)_n ≠ x_n}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CarryCocycle;

impl Cocycle<Integers, LazyPoint> for CarryCocycle {
    fn evaluate(&self, k: &i64, x: &LazyPoint) -> Result<FinSet> {
        odometer_flips(*k, x)
    }
}

/// `E|c(k, ·)|` under the fair-coin measure, computed from the carry
/// distribution digit by digit; past the last digit of `|k|` a pending carry
/// survives each step with probability 1/2, contributing `2·P(carry)`.
/// Borrows are the complement image of carries, so `k` and `-k` agree.
pub fn odometer_expected_flips(k: i64) -> f64 {
    let m = k.unsigned_abs();
    let digits = u64::BITS - m.leading_zeros();
    let mut carry = 0.0;
    let mut expected = 0.0;
    for i in 0..digits {
        if (m >> i) & 1 == 1 {
            expected += 1.0 - carry;
            carry = (1.0 + carry) / 2.0;
        } else {
            expected += carry;
            carry /= 2.0;
        }
    }
    expected + 2.0 * carry
}

/// ℤ acting on (2^ℕ, ω_{1/2}) by the odometer. Measure preserving.
#[derive(Debug, Clone, Copy, Default)]
pub struct Odometer;

impl NonsingularSystem for Odometer {
    type Group = Integers;
    type State = LazyPoint;

    fn group(&self) -> &Integers {
        &Integers
    }

    fn sample_state(&self, seed: u64) -> LazyPoint {
        LazyPoint::sample(seed, BernoulliParam::half())
    }

    fn apply(&self, k: &i64, x: &LazyPoint) -> Result<LazyPoint> {
        odometer_add(*k, x)
    }

    fn log_rn_inv(&self, _: &i64, _: &LazyPoint) -> Result<f64> {
        Ok(0.0)
    }

    fn is_measure_preserving(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleWitness<E> {
    pub g: E,
    pub h: E,
    pub state_seed: u64,
    /// `c(gh, x)`
    pub lhs: FinSet,
    /// `c(g, hx) △ c(h, x)`
    pub rhs: FinSet,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CocycleReport<E> {
    pub trials: usize,
    pub seed: u64,
    pub witness: Option<CocycleWitness<E>>,
}

impl<E> CocycleReport<E> {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Samples `(g, h, x)` with `g, h` uniform over `elements` and `x ~ η`,
/// and checks `c(gh, x) = c(g, hx) △ c(h, x)` exactly. Stops at the first
/// counterexample.
pub fn cocycle_identity_check<S, C>(
    cocycle: &C,
    base: &S,
    elements: &[<S::Group as Group>::Elem],
    trials: usize,
    seed: u64,
) -> Result<CocycleReport<<S::Group as Group>::Elem>>
where
    S: NonsingularSystem,
    C: Cocycle<S::Group, S::State>,
{
    if trials == 0 || elements.is_empty() {
        return Err(Error::InvalidArgument("need at least one trial and one element".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for t in 0..trials {
        let g = &elements[rng.random_range(0..elements.len())];
        let h = &elements[rng.random_range(0..elements.len())];
        let state_seed = rng.next_u64();
        let x = base.sample_state(state_seed);
        let gh = base.group().op(g, h);
        let lhs = cocycle.evaluate(&gh, &x)?;
        let rhs = cocycle
            .evaluate(g, &base.apply(h, &x)?)?
            .symdiff(&cocycle.evaluate(h, &x)?);
        if lhs != rhs {
            return Ok(CocycleReport {
                trials: t + 1,
                seed,
                witness: Some(CocycleWitness {
                    g: g.clone(),
                    h: h.clone(),
                    state_seed,
                    lhs,
                    rhs,
                }),
            });
        }
    }
    Ok(CocycleReport {
        trials,
        seed,
        witness: None,
    })
}

/// The skew product `g(x, w) = (gx, c(g, x)w)` on `X × 2^ℕ` with `η × ω_p`.
#[derive(Debug, Clone)]
pub struct SkewSystem<B, C> {
    base: B,
    cocycle: C,
    p: BernoulliParam,
}

/// Assembles a skew product. The base must preserve its measure.
pub fn build_skew<B, C>(base: B, cocycle: C, p: BernoulliParam) -> Result<SkewSystem<B, C>>
where
    B: NonsingularSystem,
    C: Cocycle<B::Group, B::State>,
{
    if !base.is_measure_preserving() {
        return Err(Error::BaseNotMeasurePreserving);
    }
    Ok(SkewSystem { base, cocycle, p })
}

impl<B, C> SkewSystem<B, C> {
    pub fn base(&self) -> &B {
        &self.base
    }
    pub fn cocycle(&self) -> &C {
        &self.cocycle
    }
    pub fn fiber_param(&self) -> BernoulliParam {
        self.p
    }
}

impl<B, C> NonsingularSystem for SkewSystem<B, C>
where
    B: NonsingularSystem,
    C: Cocycle<B::Group, B::State>,
{
    type Group = B::Group;
    type State = (B::State, LazyPoint);

    fn group(&self) -> &B::Group {
        self.base.group()
    }

    fn sample_state(&self, seed: u64) -> Self::State {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = self.base.sample_state(rng.next_u64());
        (x, LazyPoint::sample(rng.next_u64(), self.p))
    }

    fn apply(&self, g: &<B::Group as Group>::Elem, (x, w): &Self::State) -> Result<Self::State> {
        let t = self.cocycle.evaluate(g, x)?;
        Ok((self.base.apply(g, x)?, w.act(&t)))
    }

    /// `d(g⁻¹)_*(η×ω_p)/d(η×ω_p)` at `(x, w)` is `η(gx)/η(x) · ω_p(c(g,x)w)/ω_p(w)`;
    /// the fiber factor is [`log_rn`] of `c(g, x)` since every set is its own inverse.
    fn log_rn_inv(&self, g: &<B::Group as Group>::Elem, (x, w): &Self::State) -> Result<f64> {
        let t = self.cocycle.evaluate(g, x)?;
        Ok(self.base.log_rn_inv(g, x)? + log_rn(&t, w, self.p))
    }

    fn is_measure_preserving(&self) -> bool {
        self.p.get() == 0.5
    }
}

/// The skew-product entropy `φ(p) Σ_g μ(g) E_x|c(g, x)|`, with the base
/// expectation estimated from `n_samples` base states shared by all atoms.
pub fn skew_entropy<B, C>(
    mu: &Measure<B::Group>,
    cocycle: &C,
    base: &B,
    p: BernoulliParam,
    n_samples: usize,
    seed: u64,
) -> Result<EntropyEstimate>
where
    B: NonsingularSystem,
    C: Cocycle<B::Group, B::State>,
{
    if !base.is_measure_preserving() {
        return Err(Error::BaseNotMeasurePreserving);
    }
    if mu.group() != base.group() {
        return Err(Error::GroupMismatch {
            left: base.group().tag(),
            right: mu.group().tag(),
        });
    }
    if n_samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let m = mean_cocycle_size(mu, cocycle, base, n_samples, seed)?;
    let scale = phi(p);
    Ok(EntropyEstimate {
        mean: scale * m.0,
        stderr: scale * m.1,
        n_samples,
        seed,
        truncation_tail: 0.0,
    })
}

/// Monte Carlo `(mean, stderr)` of `Σ_g μ(g)|c(g, x)|` over `x ~ η`.
pub fn mean_cocycle_size<B, C>(
    mu: &Measure<B::Group>,
    cocycle: &C,
    base: &B,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)>
where
    B: NonsingularSystem,
    C: Cocycle<B::Group, B::State>,
{
    let m = sample_moments(n_samples, seed, |s| {
        let x = base.sample_state(s);
        let mut acc = 0.0;
        for (g, w) in mu.atoms() {
            acc += w * cocycle.evaluate(g, &x)?.len() as f64;
        }
        Ok(acc)
    })?;
    Ok((m.mean, m.stderr()))
}

/// Monte Carlo `(mean, stderr)` of `max c(k, x)` for the carry cocycle.
pub fn mean_carry_max(k: i64, n_samples: usize, seed: u64) -> Result<(f64, f64)> {
    let m = sample_moments(n_samples, seed, |s| {
        Ok(odometer_flips(k, &Odometer.sample_state(s))?.max_elem() as f64)
    })?;
    Ok((m.mean, m.stderr()))
}

/// The odometer skew entropy from the exact carry series.
pub fn odometer_skew_entropy_exact(mu: &Measure<Integers>, p: BernoulliParam) -> f64 {
    phi(p)
        * mu
            .atoms()
            .iter()
            .map(|(k, w)| w * odometer_expected_flips(*k))
            .sum::<f64>()
}
