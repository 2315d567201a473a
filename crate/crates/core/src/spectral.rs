//! Weighted Koopman representations of finite systems and the Markov-operator
//! bounds on entropy.
//!
//! On `L²(X, η)` the representation is `π(g)f(x) = √(dg_*η/dη(x)) f(g⁻¹x)`,
//! and for a finite system `dg_*η/dη(x) = η(g⁻¹x)/η(x)`. All inner products
//! here are η-weighted: `⟨f, h⟩ = Σ_x η(x) f(x) h(x)`.
//!
//! A finite system always carries an equivalent invariant measure, so the
//! full-space norm of a Markov operator is 1 here. What these functions check
//! are the inequalities
//! `-2 log ‖π(μ̄)‖ ≤ -2 log ⟨1, π(μ̄)1⟩ ≤ h_{μ̄}` and, per element,
//! `-2 log ⟨1, π(g)1⟩ ≤ ∫ -log(dg⁻¹_*η/dη) dη`. The supremum over all
//! representations without invariant vectors is not computable and is not
//! attempted.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::finite::{exact_entropy_finite, rotation, FiniteNonsingularSystem, PermutationAction};
use crate::group::{Group, Integers};
use crate::measure::{geometric_bar, Measure};

pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 10_000;
/// Tolerance of the per-element and chained inequality checks.
pub const BOUND_TOLERANCE: f64 = 1e-10;

/// Dimension up to which power iteration runs on `(MᵀM)^16` instead of
/// `MᵀM`; squaring separates clustered eigenvalues at O(n³) cost.
const SQUARING_LIMIT: usize = 512;
const SQUARINGS: usize = 4;

/// `0 - 2 ln x`, without producing `-0.0`.
fn neg_two_log(x: f64) -> f64 {
    0.0 - 2.0 * x.ln()
}

/// The matrix of `π(g)` in the standard basis of functions on the states.
#[derive(Debug, Clone, PartialEq)]
pub struct KoopmanMatrix(DMatrix<f64>);

impl KoopmanMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// The adjoint with respect to the η-weighted inner product.
    pub fn adjoint(&self, eta: &[f64]) -> DMatrix<f64> {
        let n = eta.len();
        DMatrix::from_fn(n, n, |x, y| self.0[(y, x)] * eta[y] / eta[x])
    }
}

/// `D M D⁻¹` with `D = diag(√η)`: the same operator expressed in an
/// orthonormal basis of `L²(η)`, so Euclidean norms apply.
pub fn orthonormal_form(m: &DMatrix<f64>, eta: &[f64]) -> DMatrix<f64> {
    let s: Vec<f64> = eta.iter().map(|w| w.sqrt()).collect();
    DMatrix::from_fn(m.nrows(), m.ncols(), |x, y| s[x] * m[(x, y)] / s[y])
}

/// `η`-weighted inner product.
pub fn eta_inner(f: &DVector<f64>, h: &DVector<f64>, eta: &[f64]) -> f64 {
    eta.iter().enumerate().map(|(x, w)| w * f[x] * h[x]).sum()
}

fn add_koopman<A: PermutationAction>(
    m: &mut DMatrix<f64>,
    system: &FiniteNonsingularSystem<A>,
    g: &<A::Group as Group>::Elem,
    weight: f64,
) {
    let eta = system.eta();
    let inv = system.action().group().inverse(g);
    for x in 0..eta.len() {
        let y = system.action().image(&inv, x);
        m[(x, y)] += weight * (eta[y] / eta[x]).sqrt();
    }
}

/// `π(g)`: entry `(x, g⁻¹x)` is `√(η(g⁻¹x)/η(x))`, all others 0.
pub fn koopman<A: PermutationAction>(
    system: &FiniteNonsingularSystem<A>,
    g: &<A::Group as Group>::Elem,
) -> KoopmanMatrix {
    let n = system.len();
    let mut m = DMatrix::zeros(n, n);
    add_koopman(&mut m, system, g, 1.0);
    KoopmanMatrix(m)
}

/// `π(μ) = Σ_g μ(g) π(g)`.
pub fn markov_operator<A: PermutationAction>(
    system: &FiniteNonsingularSystem<A>,
    mu: &Measure<A::Group>,
) -> Result<DMatrix<f64>> {
    if mu.group() != system.action().group() {
        return Err(Error::GroupMismatch {
            left: system.action().group().tag(),
            right: mu.group().tag(),
        });
    }
    let n = system.len();
    let mut m = DMatrix::zeros(n, n);
    for (g, w) in mu.atoms() {
        add_koopman(&mut m, system, g, *w);
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    Full,
    /// The η-orthogonal complement of the constant functions.
    ComplementOfConstants,
}

/// Largest singular value of `m` on the chosen subspace of `L²(η)`, by power
/// iteration on `(MP)ᵀ(MP)` in the orthonormal form, where `P` projects onto
/// the subspace.
pub fn operator_norm(m: &DMatrix<f64>, subspace: Subspace, eta: &[f64]) -> Result<f64> {
    let n = m.nrows();
    if m.ncols() != n || eta.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{}×{} matrix with {} weights",
            n,
            m.ncols(),
            eta.len()
        )));
    }
    let a = orthonormal_form(m, eta);
    let project = |v: &mut DVector<f64>, root: &DVector<f64>| {
        let c = root.dot(v);
        v.axpy(-c, root, 1.0);
    };
    let root = DVector::from_iterator(n, eta.iter().map(|w| w.sqrt()));
    let ap = match subspace {
        Subspace::Full => a,
        Subspace::ComplementOfConstants => {
            let p = DMatrix::identity(n, n) - &root * root.transpose();
            a * p
        }
    };
    let gram = ap.transpose() * &ap;

    let mut iterated = gram.clone();
    if n <= SQUARING_LIMIT {
        for _ in 0..SQUARINGS {
            iterated = &iterated * &iterated;
            let scale = iterated.amax();
            if scale == 0.0 {
                return Ok(0.0);
            }
            iterated /= scale;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    if subspace == Subspace::ComplementOfConstants {
        project(&mut v, &root);
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    v /= norm;

    let mut residual = f64::INFINITY;
    for _ in 0..POWER_MAX_ITERATIONS {
        let w = &iterated * &v;
        let lambda = v.dot(&w);
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(0.0);
        }
        residual = (&w - &v * lambda).norm();
        v = w / wn;
        if residual <= POWER_TOLERANCE * lambda.abs() {
            let rayleigh = v.dot(&(&gram * &v));
            return Ok(rayleigh.max(0.0).sqrt());
        }
    }
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERATIONS,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenReport {
    /// `-2 log ⟨1, π(g)1⟩`
    pub lhs: f64,
    /// `∫ -log(dg⁻¹_*η/dη) dη`
    pub rhs: f64,
    pub holds: bool,
}

/// Both sides of the per-element Jensen bound, computed exactly.
pub fn jensen_bound_check<A: PermutationAction>(
    system: &FiniteNonsingularSystem<A>,
    g: &<A::Group as Group>::Elem,
) -> JensenReport {
    let ones = DVector::from_element(system.len(), 1.0);
    let image = koopman(system, g).into_matrix() * &ones;
    let lhs = neg_two_log(eta_inner(&ones, &image, system.eta()));
    let rhs = system.element_entropy(g);
    JensenReport {
        lhs,
        rhs,
        holds: lhs <= rhs + BOUND_TOLERANCE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AppendixReport {
    /// `‖π(μ̄_N)‖` on all of `L²(η)`
    pub norm: f64,
    /// `-2 log ‖π(μ̄_N)‖`
    pub lhs: f64,
    /// `-2 log ⟨1, π(μ̄_N)1⟩`
    pub middle: f64,
    /// `h_{μ̄_N}(X, η)`
    pub rhs: f64,
    pub tail: f64,
    /// Allowance for rounding and the discarded tail mass.
    pub slack: f64,
    pub holds: bool,
}

/// Checks `-2 log ‖π(μ̄_N)‖ ≤ -2 log ⟨1, π(μ̄_N)1⟩ ≤ h_{μ̄_N}` for the
/// truncated geometric average `μ̄_N`.
pub fn appendix_bound_check<A: PermutationAction>(
    system: &FiniteNonsingularSystem<A>,
    mu: &Measure<A::Group>,
    truncation: usize,
) -> Result<AppendixReport> {
    let bar = geometric_bar(mu, truncation);
    let m = markov_operator(system, &bar.measure)?;
    let eta = system.eta();
    let norm = operator_norm(&m, Subspace::Full, eta)?;
    let ones = DVector::from_element(system.len(), 1.0);
    let middle = neg_two_log(eta_inner(&ones, &(&m * &ones), eta));
    let rhs = exact_entropy_finite(system, &bar.measure)?;
    let lhs = neg_two_log(norm);
    let slack = BOUND_TOLERANCE + bar.tail;
    Ok(AppendixReport {
        norm,
        lhs,
        middle,
        rhs,
        tail: bar.tail,
        slack,
        holds: lhs <= middle + BOUND_TOLERANCE && middle <= rhs + slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRow {
    pub n: usize,
    /// `‖π(μ̄_N)‖` on the complement of the constants.
    pub norm: f64,
    /// `-2 log` of the norm.
    pub gap: f64,
    pub tail: f64,
}

/// ℤ acting on ℤ/n by rotation with uniform η, for each `n` in `sizes`:
/// the norm of `π(μ̄_N)` off the constants and `-2 log` of it.
pub fn cyclic_gap_curve(
    sizes: &[usize],
    mu: &Measure<Integers>,
    truncation: usize,
) -> Result<Vec<GapRow>> {
    let bar = geometric_bar(mu, truncation);
    sizes
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(Error::InvalidArgument(format!("quotient size {n} < 2")));
            }
            let system = rotation(n)?;
            let m = markov_operator(&system, &bar.measure)?;
            let norm = operator_norm(&m, Subspace::ComplementOfConstants, system.eta())?;
            Ok(GapRow {
                n,
                norm,
                gap: neg_two_log(norm),
                tail: bar.tail,
            })
        })
        .collect()
}
