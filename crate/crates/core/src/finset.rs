//! Finite subsets of ℕ = {1, 2, 3, …} under symmetric difference.
//!
//! Sets whose largest element is at most 64 live in a single `u64` (element
//! `i` is bit `i - 1`); larger sets fall back to a sorted slice. The
//! representation is canonical, so derived equality and hashing are exact.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

const MASK_BITS: u32 = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Mask(u64),
    Sorted(Box<[u32]>),
}

/// An element of the group of finite subsets of ℕ.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinSet {
    repr: Repr,
}

impl FinSet {
    pub const fn empty() -> Self {
        FinSet { repr: Repr::Mask(0) }
    }

    pub fn singleton(n: u32) -> Result<Self> {
        Self::checked_from_sorted(vec![n])
    }

    /// `{1, …, n}`; empty for `n = 0`.
    pub fn interval(n: u32) -> Self {
        Self::from_sorted((1..=n).collect())
    }

    /// Builds a set from elements in any order. Rejects 0 and duplicates.
    pub fn new<I: IntoIterator<Item = u32>>(elements: I) -> Result<Self> {
        let mut v: Vec<u32> = elements.into_iter().collect();
        v.sort_unstable();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateElement(w[0]));
            }
        }
        Self::checked_from_sorted(v)
    }

    fn checked_from_sorted(v: Vec<u32>) -> Result<Self> {
        if v.first() == Some(&0) {
            return Err(Error::ZeroElement);
        }
        Ok(Self::from_sorted(v))
    }

    /// `v` must be strictly increasing with all entries ≥ 1.
    fn from_sorted(v: Vec<u32>) -> Self {
        match v.last() {
            None => Self::empty(),
            Some(&m) if m <= MASK_BITS => {
                let mask = v.iter().fold(0u64, |acc, &i| acc | (1u64 << (i - 1)));
                FinSet { repr: Repr::Mask(mask) }
            }
            Some(_) => FinSet {
                repr: Repr::Sorted(v.into_boxed_slice()),
            },
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.repr, Repr::Mask(0))
    }

    /// Cardinality `|T|`.
    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Mask(m) => m.count_ones() as usize,
            Repr::Sorted(v) => v.len(),
        }
    }

    /// Largest element, with `max(∅) = 0`.
    pub fn max_elem(&self) -> u32 {
        match &self.repr {
            Repr::Mask(0) => 0,
            Repr::Mask(m) => MASK_BITS - m.leading_zeros(),
            Repr::Sorted(v) => *v.last().expect("sorted repr is never empty"),
        }
    }

    pub fn size_and_max(&self) -> (usize, u32) {
        (self.len(), self.max_elem())
    }

    pub fn contains(&self, n: u32) -> bool {
        match &self.repr {
            Repr::Mask(m) => (1..=MASK_BITS).contains(&n) && m & (1u64 << (n - 1)) != 0,
            Repr::Sorted(v) => v.binary_search(&n).is_ok(),
        }
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        match &self.repr {
            Repr::Mask(m) => Iter::Mask(*m),
            Repr::Sorted(v) => Iter::Sorted(v.iter()),
        }
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    /// The group operation `S △ T`.
    pub fn symdiff(&self, other: &FinSet) -> FinSet {
        if let (Repr::Mask(a), Repr::Mask(b)) = (&self.repr, &other.repr) {
            return FinSet {
                repr: Repr::Mask(a ^ b),
            };
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.iter().peekable(), other.iter().peekable());
        loop {
            match (a.peek().copied(), b.peek().copied()) {
                (Some(x), Some(y)) => match x.cmp(&y) {
                    Ordering::Less => {
                        out.push(x);
                        a.next();
                    }
                    Ordering::Greater => {
                        out.push(y);
                        b.next();
                    }
                    Ordering::Equal => {
                        a.next();
                        b.next();
                    }
                },
                (Some(x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        Self::from_sorted(out)
    }

    /// All subsets of `self`, in increasing binary order of membership.
    /// Intended for small sets only.
    pub fn subsets(&self) -> Vec<FinSet> {
        let elems = self.to_vec();
        assert!(elems.len() < 32, "subset enumeration of a set with {} elements", elems.len());
        (0u64..1 << elems.len())
            .map(|bits| {
                Self::from_sorted(
                    elems
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| bits & (1 << i) != 0)
                        .map(|(_, &e)| e)
                        .collect(),
                )
            })
            .collect()
    }
}

impl Default for FinSet {
    fn default() -> Self {
        Self::empty()
    }
}

impl Ord for FinSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for FinSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

pub enum Iter<'a> {
    Mask(u64),
    Sorted(std::slice::Iter<'a, u32>),
}

impl Iterator for Iter<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        match self {
            Iter::Mask(0) => None,
            Iter::Mask(m) => {
                let i = m.trailing_zeros();
                *m &= *m - 1;
                Some(i + 1)
            }
            Iter::Sorted(it) => it.next().copied(),
        }
    }
}
