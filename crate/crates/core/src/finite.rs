//! Actions on finite sets with a strictly positive measure. Every entropy and
//! Koopman quantity is exactly computable here, which makes these systems the
//! reference for the Monte Carlo and spectral code.

use std::fmt::Debug;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::NonsingularSystem;
use crate::error::{Error, Result};
use crate::group::{Cyclic, Group, Integers, TableGroup};
use crate::measure::{geometric_bar, Measure};

/// Upper limit on the number of states; spectral work is dense.
pub const MAX_STATES: usize = 4096;

/// A homomorphism from a group into the permutations of `0..degree`.
pub trait PermutationAction: Clone + Debug + Send + Sync {
    type Group: Group;

    fn group(&self) -> &Self::Group;
    fn degree(&self) -> usize;
    /// The image `g·x`.
    fn image(&self, g: &<Self::Group as Group>::Elem, x: usize) -> usize;

    fn permutation(&self, g: &<Self::Group as Group>::Elem) -> Vec<usize> {
        (0..self.degree()).map(|x| self.image(g, x)).collect()
    }
}

/// Groups generated by a single element, acting through powers of it.
pub trait MonogenicGroup: Group {
    fn exponent(&self, g: &Self::Elem) -> i64;
    /// `Some(n)` if every action must satisfy `σⁿ = id`.
    fn order(&self) -> Option<u64>;
}

impl MonogenicGroup for Integers {
    fn exponent(&self, g: &i64) -> i64 {
        *g
    }
    fn order(&self) -> Option<u64> {
        None
    }
}

impl MonogenicGroup for Cyclic {
    fn exponent(&self, g: &u64) -> i64 {
        *g as i64
    }
    fn order(&self) -> Option<u64> {
        Some(Cyclic::order(self))
    }
}

fn check_permutation(sigma: &[usize]) -> Result<()> {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidSystem(format!("{sigma:?} is not a permutation")));
        }
    }
    Ok(())
}

/// `k ↦ σᵏ`, evaluated through the cycle decomposition of σ.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerAction<G> {
    group: G,
    sigma: Vec<usize>,
    cycles: Vec<Vec<usize>>,
    /// (cycle index, position within cycle) for each state
    place: Vec<(usize, usize)>,
}

impl<G: MonogenicGroup> PowerAction<G> {
    pub fn new(group: G, sigma: Vec<usize>) -> Result<Self> {
        check_permutation(&sigma)?;
        let mut place = vec![(usize::MAX, 0); sigma.len()];
        let mut cycles = Vec::new();
        for start in 0..sigma.len() {
            if place[start].0 != usize::MAX {
                continue;
            }
            let mut cycle = vec![start];
            let mut x = sigma[start];
            while x != start {
                cycle.push(x);
                x = sigma[x];
            }
            for (i, &y) in cycle.iter().enumerate() {
                place[y] = (cycles.len(), i);
            }
            cycles.push(cycle);
        }
        if let Some(n) = group.order() {
            if let Some(c) = cycles.iter().find(|c| n % c.len() as u64 != 0) {
                return Err(Error::InvalidSystem(format!(
                    "cycle of length {} does not divide the group order {n}",
                    c.len()
                )));
            }
        }
        Ok(PowerAction {
            group,
            sigma,
            cycles,
            place,
        })
    }

    pub fn generator(&self) -> &[usize] {
        &self.sigma
    }
}

impl<G: MonogenicGroup> PermutationAction for PowerAction<G> {
    type Group = G;

    fn group(&self) -> &G {
        &self.group
    }
    fn degree(&self) -> usize {
        self.sigma.len()
    }
    fn image(&self, g: &G::Elem, x: usize) -> usize {
        let (c, i) = self.place[x];
        let cycle = &self.cycles[c];
        let len = cycle.len() as i64;
        cycle[(i as i64 + self.group.exponent(g)).rem_euclid(len) as usize]
    }
}

/// A finite group acting through an explicit permutation per element.
#[derive(Debug, Clone, PartialEq)]
pub struct TableAction {
    group: TableGroup,
    perms: Vec<Vec<usize>>,
}

impl TableAction {
    /// Checks that `perms[g]` are permutations and that `g ↦ perms[g]` is a homomorphism.
    pub fn new(group: TableGroup, perms: Vec<Vec<usize>>) -> Result<Self> {
        if perms.len() != group.order() {
            return Err(Error::InvalidSystem("one permutation per group element required".into()));
        }
        let degree = perms[0].len();
        for p in &perms {
            if p.len() != degree {
                return Err(Error::InvalidSystem("permutations of different degrees".into()));
            }
            check_permutation(p)?;
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                let gh = group.op(&g, &h);
                if (0..degree).any(|x| perms[gh][x] != perms[g][perms[h][x]]) {
                    return Err(Error::InvalidSystem(format!("not a homomorphism at ({g}, {h})")));
                }
            }
        }
        Ok(TableAction { group, perms })
    }
}

impl PermutationAction for TableAction {
    type Group = TableGroup;

    fn group(&self) -> &TableGroup {
        &self.group
    }
    fn degree(&self) -> usize {
        self.perms[0].len()
    }
    fn image(&self, g: &usize, x: usize) -> usize {
        self.perms[*g][x]
    }
}

/// A permutation action together with a strictly positive probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteNonsingularSystem<A> {
    action: A,
    eta: Vec<f64>,
    log_eta: Vec<f64>,
    cdf: Vec<f64>,
}

impl<A: PermutationAction> FiniteNonsingularSystem<A> {
    /// `eta` must be strictly positive with total mass 1 (within 1e-12).
    pub fn new(action: A, eta: Vec<f64>) -> Result<Self> {
        let n = action.degree();
        if n == 0 || n > MAX_STATES {
            return Err(Error::InvalidSystem(format!("{n} states (allowed 1..={MAX_STATES})")));
        }
        if eta.len() != n {
            return Err(Error::InvalidSystem(format!("{} weights for {n} states", eta.len())));
        }
        if eta.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidSystem("η must be strictly positive".into()));
        }
        let total: f64 = eta.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidSystem(format!("η has total mass {total}")));
        }
        let log_eta = eta.iter().map(|w| w.ln()).collect();
        let cdf = eta
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(FiniteNonsingularSystem {
            action,
            eta,
            log_eta,
            cdf,
        })
    }

    pub fn action(&self) -> &A {
        &self.action
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// `∫ -log(dg⁻¹_*η/dη) dη = Σ_x η(x) log(η(x)/η(gx))`.
    pub fn element_entropy(&self, g: &<A::Group as Group>::Elem) -> f64 {
        (0..self.len())
            .map(|x| self.eta[x] * (self.log_eta[x] - self.log_eta[self.action.image(g, x)]))
            .sum()
    }

    /// Whether `η(gx) = η(x)` for all `x`, up to `tol`.
    pub fn preserves_eta(&self, g: &<A::Group as Group>::Elem, tol: f64) -> bool {
        (0..self.len()).all(|x| (self.eta[self.action.image(g, x)] - self.eta[x]).abs() <= tol)
    }
}

impl<A: PermutationAction> NonsingularSystem for FiniteNonsingularSystem<A> {
    type Group = A::Group;
    type State = usize;

    fn group(&self) -> &A::Group {
        self.action.group()
    }

    fn sample_state(&self, seed: u64) -> usize {
        let u: f64 = ChaCha8Rng::seed_from_u64(seed).random();
        self.cdf.partition_point(|&c| c <= u).min(self.len() - 1)
    }

    fn apply(&self, g: &<A::Group as Group>::Elem, x: &usize) -> Result<usize> {
        Ok(self.action.image(g, *x))
    }

    fn log_rn_inv(&self, g: &<A::Group as Group>::Elem, x: &usize) -> Result<f64> {
        Ok(self.log_eta[self.action.image(g, *x)] - self.log_eta[*x])
    }

    fn is_measure_preserving(&self) -> bool {
        let first = self.eta[0];
        self.eta.iter().all(|&w| w == first)
    }
}

/// The exact μ-entropy `Σ_g μ(g) Σ_x η(x) log(η(x)/η(gx))`.
pub fn exact_entropy_finite<A: PermutationAction>(
    system: &FiniteNonsingularSystem<A>,
    mu: &Measure<A::Group>,
) -> Result<f64> {
    if mu.group() != system.action().group() {
        return Err(Error::GroupMismatch {
            left: system.action().group().tag(),
            right: mu.group().tag(),
        });
    }
    Ok(mu.atoms().iter().map(|(g, w)| w * system.element_entropy(g)).sum())
}

/// [`exact_entropy_finite`] of the truncated geometric average, with its tail.
pub fn exact_entropy_of_bar_finite<A: PermutationAction>(
    system: &FiniteNonsingularSystem<A>,
    mu: &Measure<A::Group>,
    truncation: usize,
) -> Result<(f64, f64)> {
    let bar = geometric_bar(mu, truncation);
    Ok((exact_entropy_finite(system, &bar.measure)?, bar.tail))
}

pub type CyclicSystem = FiniteNonsingularSystem<PowerAction<Cyclic>>;
pub type IntegerSystem = FiniteNonsingularSystem<PowerAction<Integers>>;

/// ℤ/2 swapping two states of masses `(q, 1-q)`.
pub fn two_point_swap(q: f64) -> Result<CyclicSystem> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidSystem(format!("swap weight {q} outside (0, 1)")));
    }
    let action = PowerAction::new(Cyclic::new(2)?, vec![1, 0])?;
    FiniteNonsingularSystem::new(action, vec![q, 1.0 - q])
}

/// ℤ acting on ℤ/n by rotation `x ↦ x + 1`, with uniform η.
pub fn rotation(n: usize) -> Result<IntegerSystem> {
    if n == 0 {
        return Err(Error::InvalidSystem("rotation of an empty set".into()));
    }
    let action = PowerAction::new(Integers, (0..n).map(|x| (x + 1) % n).collect())?;
    FiniteNonsingularSystem::new(action, vec![1.0 / n as f64; n])
}

/// A random ℤ-system with 2..=`max_states` states, a random permutation as
/// generator and strictly positive η, together with a measure on
/// 1..=`max_support` distinct integers in `[-3, 3]`.
pub fn random_integer_system(
    seed: u64,
    max_states: usize,
    max_support: usize,
) -> Result<(IntegerSystem, Measure<Integers>)> {
    if max_states < 2 || max_support == 0 {
        return Err(Error::InvalidArgument("need at least 2 states and 1 atom".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_states);
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(&mut rng);
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut eta: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let drift: f64 = 1.0 - eta.iter().sum::<f64>();
    eta[0] += drift;

    let mut candidates: Vec<i64> = (-3..=3).collect();
    candidates.shuffle(&mut rng);
    let k = rng.random_range(1..=max_support.min(candidates.len()));
    let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let atoms = candidates[..k].iter().zip(&raw).map(|(&g, w)| (g, w / total)).collect();

    let system = FiniteNonsingularSystem::new(PowerAction::new(Integers, sigma)?, eta)?;
    Ok((system, Measure::new(Integers, atoms)?))
}
