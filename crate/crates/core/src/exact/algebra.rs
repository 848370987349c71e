use num_traits::{One, Zero};

use super::linalg::{self, Echelon, SparseVec};
use super::matrix::{check_dim, ExactMatrix};
use super::Rational;
use crate::error::{Error, Result};

/// A *-subalgebra of the full matrix algebra `M_N`, held as a linearly
/// independent spanning basis.
#[derive(Clone, Debug)]
pub struct SubAlgebra {
    ambient_dim: usize,
    basis: Vec<ExactMatrix>,
    contains_unit: bool,
    echelon: Echelon,
}

impl SubAlgebra {
    /// Builds the algebra spanned by `spanning`, dropping dependent
    /// elements, and verifies closure under products and adjoints.
    pub fn new(ambient_dim: usize, spanning: Vec<ExactMatrix>) -> Result<Self> {
        check_dim(ambient_dim)?;
        if let Some(bad) = spanning.iter().find(|m| m.dim() != ambient_dim) {
            return Err(Error::input(format!(
                "matrix of dimension {} in an algebra of ambient dimension {ambient_dim}",
                bad.dim()
            )));
        }
        let alg = Self::independent(ambient_dim, spanning);
        alg.validate()?;
        Ok(alg)
    }

    /// Skips the closure check; callers guarantee the basis spans a
    /// *-algebra. Dependent elements are still discarded.
    pub fn new_unchecked(ambient_dim: usize, basis: Vec<ExactMatrix>) -> Self {
        Self::independent(ambient_dim, basis)
    }

    fn independent(ambient_dim: usize, spanning: Vec<ExactMatrix>) -> Self {
        let mut echelon = Echelon::new();
        let mut basis = Vec::with_capacity(spanning.len());
        for m in spanning {
            debug_assert_eq!(m.dim(), ambient_dim);
            if echelon.insert(&m.to_vec()) {
                basis.push(m);
            }
        }
        let contains_unit = echelon.contains(&ExactMatrix::identity(ambient_dim).to_vec());
        SubAlgebra {
            ambient_dim,
            basis,
            contains_unit,
            echelon,
        }
    }

    fn validate(&self) -> Result<()> {
        for (i, a) in self.basis.iter().enumerate() {
            if !self.contains(&a.adjoint()) {
                return Err(Error::Structure(format!(
                    "span is not closed under adjoint (basis element {i})"
                )));
            }
            for (j, b) in self.basis.iter().enumerate() {
                if !self.contains(&(a * b)) {
                    return Err(Error::Structure(format!(
                        "span is not closed under products (basis elements {i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn full(n: usize) -> Self {
        let basis = (0..n)
            .flat_map(|i| (0..n).map(move |j| ExactMatrix::unit(n, i, j)))
            .collect();
        Self::new_unchecked(n, basis)
    }

    pub fn scalars(n: usize) -> Self {
        Self::new_unchecked(n, vec![ExactMatrix::identity(n)])
    }

    /// Diagonal matrices `Δ_n`.
    pub fn diagonal(n: usize) -> Self {
        Self::new_unchecked(n, (0..n).map(|i| ExactMatrix::unit(n, i, i)).collect())
    }

    /// `A ⊗ B` inside `M_{N_A} ⊗ M_{N_B}`.
    pub fn tensor(a: &SubAlgebra, b: &SubAlgebra) -> Result<Self> {
        let dim = a.ambient_dim * b.ambient_dim;
        check_dim(dim)?;
        let basis = a
            .basis
            .iter()
            .flat_map(|x| b.basis.iter().map(move |y| x.kron(y)))
            .collect();
        Ok(Self::new_unchecked(dim, basis))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ExactMatrix] {
        &self.basis
    }

    pub fn contains_unit(&self) -> bool {
        self.contains_unit
    }

    pub fn contains(&self, x: &ExactMatrix) -> bool {
        x.dim() == self.ambient_dim && self.echelon.contains(&x.to_vec())
    }

    /// `other ⊆ self` as spans.
    pub fn contains_algebra(&self, other: &SubAlgebra) -> bool {
        other.ambient_dim == self.ambient_dim && other.basis.iter().all(|b| self.contains(b))
    }

    /// Equality of spans: equal dimension plus one containment.
    pub fn same_span(&self, other: &SubAlgebra) -> bool {
        self.dim() == other.dim() && self.contains_algebra(other)
    }

    /// Image under `x ↦ W x W*` for the permutation `W` given by `images`.
    pub fn permuted(&self, images: &[usize]) -> SubAlgebra {
        Self::new_unchecked(
            self.ambient_dim,
            self.basis.iter().map(|b| b.permute(images)).collect(),
        )
    }

    /// Image under conjugation `x ↦ u x u*` by a unitary `u`.
    pub fn conjugated(&self, u: &ExactMatrix) -> SubAlgebra {
        let ustar = u.adjoint();
        Self::new_unchecked(
            self.ambient_dim,
            self.basis.iter().map(|b| &(u * b) * &ustar).collect(),
        )
    }

    /// Rank of the span of arbitrary matrices, a helper for symmetric-square
    /// and corner checks.
    pub fn span_rank<'a>(mats: impl IntoIterator<Item = &'a ExactMatrix>) -> usize {
        let mut e = Echelon::new();
        for m in mats {
            e.insert(&m.to_vec());
        }
        e.rank()
    }
}

/// A positive linear functional `x ↦ Σ_i w_i x_ii` with `Σ w_i = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceForm {
    weights: Vec<Rational>,
}

impl TraceForm {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        check_dim(weights.len())?;
        if weights.iter().any(|w| *w < Rational::zero()) {
            return Err(Error::input("trace weights must be nonnegative"));
        }
        if weights.iter().cloned().sum::<Rational>() != Rational::one() {
            return Err(Error::input("trace weights must sum to 1"));
        }
        Ok(TraceForm { weights })
    }

    /// The normalized trace on `M_n`.
    pub fn normalized(n: usize) -> Self {
        let w = Rational::new(1.into(), (n as i64).into());
        TraceForm {
            weights: vec![w; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn is_faithful(&self) -> bool {
        self.weights.iter().all(|w| !w.is_zero())
    }

    pub fn eval(&self, x: &ExactMatrix) -> Rational {
        assert_eq!(x.dim(), self.dim());
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| w * x.get(i, i))
            .sum()
    }

    /// `tr(x y)` without forming the product.
    pub fn pair(&self, x: &ExactMatrix, y: &ExactMatrix) -> Rational {
        let mut acc = Rational::zero();
        for (i, w) in self.weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let mut s = Rational::zero();
            for (j, a) in x.row(i) {
                let b = y.get(*j, i);
                if !b.is_zero() {
                    s += a * b;
                }
            }
            if !s.is_zero() {
                acc += w * s;
            }
        }
        acc
    }

    /// `tr(xy) = tr(yx)` on all basis pairs of `alg`.
    pub fn is_tracial_on(&self, alg: &SubAlgebra) -> bool {
        let b = alg.basis();
        b.iter()
            .all(|x| b.iter().all(|y| self.pair(x, y) == self.pair(y, x)))
    }
}

/// The trace-preserving conditional expectation onto a subalgebra,
/// with the Gram system factored once.
#[derive(Clone, Debug)]
pub struct ConditionalExpectation<'a> {
    sub: &'a SubAlgebra,
    trace: &'a TraceForm,
    gram_inverse: Vec<SparseVec>,
}

impl<'a> ConditionalExpectation<'a> {
    pub fn new(sub: &'a SubAlgebra, trace: &'a TraceForm) -> Result<Self> {
        if sub.ambient_dim() != trace.dim() {
            return Err(Error::input(format!(
                "trace on M_{} used with a subalgebra of M_{}",
                trace.dim(),
                sub.ambient_dim()
            )));
        }
        let b = sub.basis();
        let gram: Vec<SparseVec> = b
            .iter()
            .map(|x| {
                b.iter()
                    .enumerate()
                    .filter_map(|(j, y)| {
                        let v = trace.pair(x, y);
                        (!v.is_zero()).then_some((j, v))
                    })
                    .collect()
            })
            .collect();
        let gram_inverse = linalg::inverse(&gram).ok_or_else(|| {
            Error::DegenerateTrace(format!(
                "Gram matrix of a {}-dimensional subalgebra is singular",
                b.len()
            ))
        })?;
        Ok(ConditionalExpectation {
            sub,
            trace,
            gram_inverse,
        })
    }

    pub fn apply(&self, x: &ExactMatrix) -> Result<ExactMatrix> {
        let n = self.sub.ambient_dim();
        if x.dim() != n {
            return Err(Error::input(format!(
                "matrix of dimension {} given to an expectation on M_{n}",
                x.dim()
            )));
        }
        let rhs: SparseVec = self
            .sub
            .basis()
            .iter()
            .enumerate()
            .filter_map(|(i, b)| {
                let v = self.trace.pair(b, x);
                (!v.is_zero()).then_some((i, v))
            })
            .collect();
        let coeffs = linalg::apply(&self.gram_inverse, &rhs);
        Ok(combine(n, self.sub.basis(), &coeffs))
    }
}

pub(crate) fn combine(n: usize, basis: &[ExactMatrix], coeffs: &SparseVec) -> ExactMatrix {
    ExactMatrix::from_entries(
        n,
        coeffs.iter().flat_map(|(j, c)| {
            basis[*j]
                .entries()
                .map(move |(r, s, v)| (r, s, v * c))
                .collect::<Vec<_>>()
        }),
    )
}

/// `E_S(x)` for the trace `tr`, from the Gram system
/// `Σ_j tr(b_i b_j) c_j = tr(b_i x)`.
pub fn conditional_expectation(
    x: &ExactMatrix,
    sub: &SubAlgebra,
    trace: &TraceForm,
) -> Result<ExactMatrix> {
    ConditionalExpectation::new(sub, trace)?.apply(x)
}

/// `{x ∈ T : xs = sx for all s in S}`.
pub fn commutant_in(s: &SubAlgebra, t: &SubAlgebra) -> Result<SubAlgebra> {
    let n = s.ambient_dim();
    if t.ambient_dim() != n {
        return Err(Error::input("commutant of algebras in different ambients"));
    }
    let block = n * n;
    let columns: Vec<SparseVec> = t
        .basis()
        .iter()
        .map(|tj| {
            s.basis()
                .iter()
                .enumerate()
                .flat_map(|(k, sk)| {
                    tj.commutator(sk)
                        .to_vec()
                        .into_iter()
                        .map(move |(i, v)| (k * block + i, v))
                })
                .collect()
        })
        .collect();
    let ker = linalg::kernel(&columns, s.dim() * block);
    let elems = ker.iter().map(|c| combine(n, t.basis(), c)).collect();
    SubAlgebra::new(n, elems)
}

/// `S ∩ T` as spans.
pub fn intersection(s: &SubAlgebra, t: &SubAlgebra) -> Result<SubAlgebra> {
    let n = s.ambient_dim();
    if t.ambient_dim() != n {
        return Err(Error::input("intersection of algebras in different ambients"));
    }
    let columns: Vec<SparseVec> = s
        .basis()
        .iter()
        .map(|b| b.to_vec())
        .chain(t.basis().iter().map(|b| (-b).to_vec()))
        .collect();
    let ker = linalg::kernel(&columns, n * n);
    let sd = s.dim();
    let elems = ker
        .iter()
        .map(|c| {
            let head: SparseVec = c.iter().filter(|(i, _)| *i < sd).cloned().collect();
            combine(n, s.basis(), &head)
        })
        .collect();
    Ok(SubAlgebra::new_unchecked(n, elems))
}

pub fn center(s: &SubAlgebra) -> Result<SubAlgebra> {
    commutant_in(s, s)
}

/// Smallest *-closed, product-closed span containing `gens` (and the
/// identity when `with_unit`).
pub fn generated_algebra(gens: &[ExactMatrix], with_unit: bool) -> Result<SubAlgebra> {
    let Some(first) = gens.first() else {
        return Err(Error::input("generated_algebra needs at least one generator"));
    };
    let n = first.dim();
    check_dim(n)?;
    if gens.iter().any(|g| g.dim() != n) {
        return Err(Error::input("generators of different dimensions"));
    }
    let mut echelon = Echelon::new();
    let mut basis: Vec<ExactMatrix> = Vec::new();
    let push = |m: ExactMatrix, echelon: &mut Echelon, basis: &mut Vec<ExactMatrix>| {
        if echelon.insert(&m.to_vec()) {
            basis.push(m);
        }
    };
    if with_unit {
        push(ExactMatrix::identity(n), &mut echelon, &mut basis);
    }
    for g in gens {
        push(g.clone(), &mut echelon, &mut basis);
        push(g.adjoint(), &mut echelon, &mut basis);
    }
    // basis[..done] have had all pairwise products with each other taken
    let mut done = 0;
    while done < basis.len() {
        let x = basis[done].clone();
        let mut i = 0;
        while i <= done {
            let y = basis[i].clone();
            push(&x * &y, &mut echelon, &mut basis);
            push(&y * &x, &mut echelon, &mut basis);
            i += 1;
        }
        push(x.adjoint(), &mut echelon, &mut basis);
        done += 1;
    }
    Ok(SubAlgebra::new_unchecked(n, basis))
}
