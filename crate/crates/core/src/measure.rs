//! Finitely supported probability measures on countable groups.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::group::{FinSetGroup, Group};

/// Tolerance on total mass for measures built in-process.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability measure with finite support. Atoms are kept sorted by
/// element, pairwise distinct and with strictly positive weight.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<G: Group> {
    group: G,
    atoms: Vec<(G::Elem, f64)>,
}

impl<G: Group> Measure<G> {
    /// Validates weights (finite, ≥ 0, total 1 within [`MASS_TOLERANCE`])
    /// and distinctness of the elements. Zero-weight atoms are dropped.
    pub fn new(group: G, atoms: Vec<(G::Elem, f64)>) -> Result<Self> {
        Self::with_tolerance(group, atoms, MASS_TOLERANCE)
    }

    /// As [`Measure::new`] with a caller-chosen mass tolerance; the weights
    /// are rescaled to sum to exactly 1 afterwards.
    pub fn with_tolerance(group: G, atoms: Vec<(G::Elem, f64)>, tol: f64) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for (g, w) in &atoms {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidMeasure(format!("weight {w} on {g:?}")));
            }
            if !group.contains(g) {
                return Err(Error::NotInGroup(format!("{g:?}")));
            }
            if !seen.insert(g.clone()) {
                return Err(Error::InvalidMeasure(format!("duplicate atom {g:?}")));
            }
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidMeasure(format!("total mass {total} is not 1")));
        }
        let mut atoms: Vec<_> = atoms
            .into_iter()
            .filter(|(_, w)| *w > 0.0)
            .map(|(g, w)| (g, w / total))
            .collect();
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Measure { group, atoms })
    }

    pub fn dirac(group: G, g: G::Elem) -> Result<Self> {
        Self::new(group, vec![(g, 1.0)])
    }

    pub fn identity(group: G) -> Self {
        let e = group.identity();
        Measure {
            group,
            atoms: vec![(e, 1.0)],
        }
    }

    /// Equal weight on each of `elems`.
    pub fn uniform(group: G, elems: Vec<G::Elem>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::InvalidMeasure("uniform measure on no elements".into()));
        }
        let w = 1.0 / elems.len() as f64;
        Self::new(group, elems.into_iter().map(|g| (g, w)).collect())
    }

    fn from_merged(group: G, merged: BTreeMap<G::Elem, f64>) -> Self {
        Measure {
            group,
            atoms: merged.into_iter().filter(|(_, w)| *w > 0.0).collect(),
        }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn atoms(&self) -> &[(G::Elem, f64)] {
        &self.atoms
    }

    pub fn support(&self) -> Vec<G::Elem> {
        self.atoms.iter().map(|(g, _)| g.clone()).collect()
    }

    pub fn weight(&self, g: &G::Elem) -> f64 {
        self.atoms
            .binary_search_by(|(h, _)| h.cmp(g))
            .map_or(0.0, |i| self.atoms[i].1)
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.atoms.len() == 1 && self.atoms[0].0 == self.group.identity()
    }

    /// `μ * ν`: the pushforward of `μ × ν` under `(g, h) ↦ gh`.
    pub fn convolve(&self, other: &Measure<G>) -> Result<Measure<G>> {
        if self.group != other.group {
            return Err(Error::GroupMismatch {
                left: self.group.tag(),
                right: other.group.tag(),
            });
        }
        let mut merged = BTreeMap::new();
        for (g, a) in &self.atoms {
            for (h, b) in &other.atoms {
                *merged.entry(self.group.op(g, h)).or_insert(0.0) += a * b;
            }
        }
        Ok(Self::from_merged(self.group.clone(), merged))
    }

    /// The `n`-fold convolution power; `μ⁰ = δ_e`.
    pub fn power(&self, n: usize) -> Measure<G> {
        let mut acc = Measure::identity(self.group.clone());
        for _ in 0..n {
            acc = acc.convolve(self).expect("same group");
        }
        acc
    }
}

/// A truncated geometric average together with the mass it discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricBar<G: Group> {
    pub measure: Measure<G>,
    /// `2^{-N-1}`, the weight of the omitted terms `n > N` before renormalizing.
    pub tail: f64,
    pub terms: usize,
}

/// `Σ_{n=0}^{N} 2^{-n-1} μⁿ`, renormalized by `(1 - 2^{-N-1})^{-1}`.
pub fn geometric_bar<G: Group>(mu: &Measure<G>, truncation: usize) -> GeometricBar<G> {
    let group = mu.group().clone();
    let tail = 0.5f64.powi(truncation as i32 + 1);
    let norm = 1.0 - tail;
    let mut merged: BTreeMap<G::Elem, f64> = BTreeMap::new();
    let mut power = Measure::identity(group.clone());
    for n in 0..=truncation {
        let coeff = 0.5f64.powi(n as i32 + 1) / norm;
        for (g, w) in power.atoms() {
            *merged.entry(g.clone()).or_insert(0.0) += coeff * w;
        }
        if n < truncation {
            power = power.convolve(mu).expect("same group");
        }
    }
    GeometricBar {
        measure: Measure::from_merged(group, merged),
        tail,
        terms: truncation + 1,
    }
}

/// Bounded search for semigroup generation: collects all products of at most
/// `radius` support elements and checks that they cover `target` (or the
/// group's default target, see [`Group::generation_target`]).
///
/// `false` means "not detected within the radius", never a disproof.
pub fn check_generating<G: Group>(
    mu: &Measure<G>,
    radius: usize,
    target: Option<&[G::Elem]>,
) -> Result<bool> {
    if radius == 0 {
        return Err(Error::InvalidArgument("generation radius must be at least 1".into()));
    }
    let group = mu.group();
    let support = mu.support();
    let target = match target {
        Some(t) => t.to_vec(),
        None => group.generation_target(&support),
    };
    let mut reached: BTreeSet<G::Elem> = support.iter().cloned().collect();
    let mut frontier = reached.clone();
    for _ in 1..radius {
        let mut next = BTreeSet::new();
        for a in &frontier {
            for s in &support {
                let p = group.op(a, s);
                if !reached.contains(&p) {
                    next.insert(p);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        reached.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(target.iter().all(|t| reached.contains(t)))
}

/// `(Σ μ(T)|T|, Σ μ(T) max(T))`.
pub fn expected_size_and_max(mu: &Measure<FinSetGroup>) -> (f64, f64) {
    mu.atoms().iter().fold((0.0, 0.0), |(s, m), (t, w)| {
        (s + w * t.len() as f64, m + w * t.max_elem() as f64)
    })
}

/// Convenience constructor for the tests and CLI: `uniform on {{i} : i ∈ idx}`.
pub fn uniform_singletons(idx: &[u32]) -> Result<Measure<FinSetGroup>> {
    let elems = idx.iter().map(|&i| FinSet::singleton(i)).collect::<Result<Vec<_>>>()?;
    Measure::uniform(FinSetGroup, elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{Cyclic, Integers};
    use proptest::prelude::*;

    fn set(v: &[u32]) -> FinSet {
        FinSet::new(v.iter().copied()).unwrap()
    }

    fn assert_same_atoms<G: Group>(a: &Measure<G>, b: &Measure<G>, tol: f64) {
        assert_eq!(a.support(), b.support(), "{a:?} vs {b:?}");
        for ((_, x), (_, y)) in a.atoms().iter().zip(b.atoms()) {
            assert!((x - y).abs() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Measure::new(Integers, vec![(0, 0.5), (1, 0.4)]).is_err());
        assert!(Measure::new(Integers, vec![(0, 1.5), (1, -0.5)]).is_err());
        assert!(Measure::new(Integers, vec![(0, 0.5), (0, 0.5)]).is_err());
        assert!(Measure::new(Cyclic::new(3).unwrap(), vec![(3, 1.0)]).is_err());
    }

    #[test]
    fn convolve_examples() {
        let d1 = Measure::dirac(Integers, 1).unwrap();
        assert_eq!(d1.convolve(&d1).unwrap(), Measure::dirac(Integers, 2).unwrap());

        let s1 = Measure::dirac(FinSetGroup, set(&[1])).unwrap();
        assert!(s1.convolve(&s1).unwrap().is_identity());

        // pairs: {1}{1} = ∅, {1}{2} = {1,2}, {2}{1} = {1,2}, {2}{2} = ∅
        let half = uniform_singletons(&[1, 2]).unwrap();
        let sq = half.convolve(&half).unwrap();
        let expected =
            Measure::new(FinSetGroup, vec![(FinSet::empty(), 0.5), (set(&[1, 2]), 0.5)]).unwrap();
        assert_same_atoms(&sq, &expected, 1e-15);
    }

    #[test]
    fn convolve_rejects_group_mismatch() {
        let a = Measure::identity(Cyclic::new(3).unwrap());
        let b = Measure::identity(Cyclic::new(4).unwrap());
        assert!(matches!(a.convolve(&b), Err(Error::GroupMismatch { .. })));
    }

    #[test]
    fn geometric_bar_examples() {
        let mu = Measure::dirac(Integers, 1).unwrap();
        let bar0 = geometric_bar(&mu, 0);
        assert!(bar0.measure.is_identity());
        assert_eq!(bar0.tail, 0.5);

        // (1/2 δ0 + 1/4 δ1 + 1/8 δ2) / (7/8) = (4 δ0 + 2 δ1 + δ2) / 7
        let bar2 = geometric_bar(&mu, 2);
        let expected =
            Measure::new(Integers, vec![(0, 4.0 / 7.0), (1, 2.0 / 7.0), (2, 1.0 / 7.0)]).unwrap();
        assert_same_atoms(&bar2.measure, &expected, 1e-15);
        assert_eq!(bar2.tail, 0.125);
    }

    #[test]
    fn geometric_bar_mass_is_one_up_to_sixty_terms() {
        let mu = Measure::new(Integers, vec![(-1, 0.3), (1, 0.5), (2, 0.2)]).unwrap();
        for n in [0, 1, 5, 20, 40, 60] {
            let bar = geometric_bar(&mu, n);
            assert!((bar.measure.total_mass() - 1.0).abs() <= 1e-12, "N = {n}");
        }
    }

    #[test]
    fn check_generating_examples() {
        let d1 = Measure::dirac(Integers, 1).unwrap();
        assert!(!check_generating(&d1, 2, None).unwrap());
        let sym = Measure::new(Integers, vec![(-1, 0.5), (1, 0.5)]).unwrap();
        assert!(check_generating(&sym, 1, None).unwrap());

        // words of length ≤ 2 over {{1},{2}}: {1},{2},∅,{1,2}
        let fin = uniform_singletons(&[1, 2]).unwrap();
        let target = [FinSet::empty(), set(&[1]), set(&[2]), set(&[1, 2])];
        assert!(check_generating(&fin, 2, Some(&target)).unwrap());
        assert!(!check_generating(&fin, 1, Some(&target)).unwrap());
        assert!(check_generating(&fin, 2, None).unwrap());

        let z5 = Cyclic::new(5).unwrap();
        let two = Measure::dirac(z5, 2).unwrap();
        assert!(!check_generating(&two, 4, None).unwrap());
        assert!(check_generating(&two, 5, None).unwrap());
        assert!(check_generating(&two, 0, None).is_err());
    }

    #[test]
    fn expected_size_and_max_examples() {
        assert_eq!(expected_size_and_max(&Measure::identity(FinSetGroup)), (0.0, 0.0));
        let d2 = Measure::dirac(FinSetGroup, set(&[2])).unwrap();
        assert_eq!(expected_size_and_max(&d2), (1.0, 2.0));
        let mix = Measure::new(FinSetGroup, vec![(set(&[1]), 0.5), (set(&[1, 3]), 0.5)]).unwrap();
        assert_eq!(expected_size_and_max(&mix), (1.5, 2.0));
    }

    fn arb_finset_measure() -> impl Strategy<Value = Measure<FinSetGroup>> {
        prop::collection::btree_map(
            prop::collection::btree_set(1u32..20, 0..5),
            0.01f64..1.0,
            1..5,
        )
        .prop_map(|m| {
            let total: f64 = m.values().sum();
            let atoms = m
                .into_iter()
                .map(|(s, w)| (FinSet::new(s).unwrap(), w / total))
                .collect();
            Measure::new(FinSetGroup, atoms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn convolution_is_associative(
            a in arb_finset_measure(), b in arb_finset_measure(), c in arb_finset_measure()
        ) {
            let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            prop_assert_eq!(left.support(), right.support());
            for ((_, x), (_, y)) in left.atoms().iter().zip(right.atoms()) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
            prop_assert!((left.total_mass() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn expected_size_below_expected_max(mu in arb_finset_measure()) {
            let (size, max) = expected_size_and_max(&mu);
            prop_assert!(size <= max);
        }
    }
}
