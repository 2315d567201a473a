//! Countable groups that measures and actions live on.

use std::collections::BTreeSet;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::finset::FinSet;

/// Identifies which group a measure or action lives on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupTag {
    FinSet,
    Integer,
    Cyclic(u64),
    Table(usize),
}

impl Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTag::FinSet => write!(f, "finset"),
            GroupTag::Integer => write!(f, "integer"),
            GroupTag::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupTag::Table(n) => write!(f, "table(order {n})"),
        }
    }
}

pub trait Group: Clone + Debug + PartialEq + Send + Sync {
    type Elem: Clone + Ord + Hash + Debug + Send + Sync;

    fn tag(&self) -> GroupTag;
    fn identity(&self) -> Self::Elem;
    fn op(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inverse(&self, a: &Self::Elem) -> Self::Elem;
    fn contains(&self, a: &Self::Elem) -> bool;

    /// The finite set a semigroup-generation search tries to reach when the
    /// caller supplies none. See [`crate::measure::check_generating`].
    fn generation_target(&self, support: &[Self::Elem]) -> Vec<Self::Elem>;
}

/// The group 2^ℕ_fin of finite subsets of ℕ under symmetric difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FinSetGroup;

impl Group for FinSetGroup {
    type Elem = FinSet;

    fn tag(&self) -> GroupTag {
        GroupTag::FinSet
    }
    fn identity(&self) -> FinSet {
        FinSet::empty()
    }
    fn op(&self, a: &FinSet, b: &FinSet) -> FinSet {
        a.symdiff(b)
    }
    fn inverse(&self, a: &FinSet) -> FinSet {
        a.clone()
    }
    fn contains(&self, _: &FinSet) -> bool {
        true
    }

    /// Every subset of the union of the support, i.e. the finite subgroup the
    /// support could at best generate.
    fn generation_target(&self, support: &[FinSet]) -> Vec<FinSet> {
        let union = support.iter().fold(FinSet::empty(), |acc, t| {
            FinSet::new(acc.iter().chain(t.iter()).collect::<BTreeSet<_>>())
                .expect("union of valid sets")
        });
        union.subsets()
    }
}

/// The integers under addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Integers;

impl Group for Integers {
    type Elem = i64;

    fn tag(&self) -> GroupTag {
        GroupTag::Integer
    }
    fn identity(&self) -> i64 {
        0
    }
    fn op(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
    fn inverse(&self, a: &i64) -> i64 {
        -a
    }
    fn contains(&self, _: &i64) -> bool {
        true
    }

    /// A subsemigroup of ℤ is all of ℤ iff it contains both 1 and -1.
    fn generation_target(&self, _: &[i64]) -> Vec<i64> {
        vec![-1, 1]
    }
}

/// ℤ/nℤ with elements `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cyclic {
    n: u64,
}

impl Cyclic {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cyclic group order must be at least 1".into()));
        }
        Ok(Cyclic { n })
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    pub fn reduce(&self, k: i64) -> u64 {
        k.rem_euclid(self.n as i64) as u64
    }
}

impl Group for Cyclic {
    type Elem = u64;

    fn tag(&self) -> GroupTag {
        GroupTag::Cyclic(self.n)
    }
    fn identity(&self) -> u64 {
        0
    }
    fn op(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.n as u128) as u64
    }
    fn inverse(&self, a: &u64) -> u64 {
        (self.n - a % self.n) % self.n
    }
    fn contains(&self, a: &u64) -> bool {
        *a < self.n
    }
    fn generation_target(&self, _: &[u64]) -> Vec<u64> {
        (0..self.n).collect()
    }
}

/// A finite group given by its multiplication table over elements `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl TableGroup {
    /// Validates closure, the Latin-square property, an identity and associativity.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        let bad = |msg: &str| Err(Error::InvalidArgument(format!("group table: {msg}")));
        if n == 0 {
            return bad("empty");
        }
        if table.iter().any(|row| row.len() != n || row.iter().any(|&e| e >= n)) {
            return bad("not an n×n table over 0..n");
        }
        let Some(identity) = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
        else {
            return bad("no identity element");
        };
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) {
                Some(b) => inverses.push(b),
                None => return bad(&format!("element {a} has no inverse")),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(&format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(TableGroup {
            table,
            identity,
            inverses,
        })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }
}

impl Group for TableGroup {
    type Elem = usize;

    fn tag(&self) -> GroupTag {
        GroupTag::Table(self.order())
    }
    fn identity(&self) -> usize {
        self.identity
    }
    fn op(&self, a: &usize, b: &usize) -> usize {
        self.table[*a][*b]
    }
    fn inverse(&self, a: &usize) -> usize {
        self.inverses[*a]
    }
    fn contains(&self, a: &usize) -> bool {
        *a < self.order()
    }
    fn generation_target(&self, _: &[usize]) -> Vec<usize> {
        (0..self.order()).collect()
    }
}
