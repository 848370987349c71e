//! Block structure of finite-dimensional *-algebras: minimal central
//! projections, block sizes, and inclusion (Bratteli) multiplicities.
//!
//! Splitting the center needs eigenvalues; only rational spectra are
//! handled, anything else is reported as out of scope.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::algebra::{center, SubAlgebra};
use super::linalg::{self, SparseVec};
use super::{ExactMatrix, Rational};
use crate::error::{Error, Result};

/// One simple summand `M_size` of an algebra, sitting in the ambient space
/// with `rep_multiplicity` copies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub projection: ExactMatrix,
    pub size: usize,
    pub rep_multiplicity: usize,
}

/// Inclusion data of `sub ⊆ amb`: `multiplicities[i][j]` is how many times
/// block `i` of `sub` sits in block `j` of `amb`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inclusion {
    pub sub_blocks: Vec<Block>,
    pub amb_blocks: Vec<Block>,
    pub multiplicities: Vec<Vec<u64>>,
}

impl Inclusion {
    /// Connected components of the bipartite multiplicity graph.
    pub fn components(&self) -> usize {
        let m = self.sub_blocks.len();
        let mut uf = UnionFind::new(m + self.amb_blocks.len());
        for (i, row) in self.multiplicities.iter().enumerate() {
            for (j, &mult) in row.iter().enumerate() {
                if mult > 0 {
                    uf.union(i, m + j);
                }
            }
        }
        uf.count()
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller label as root so orbit representatives are least elements
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    pub(crate) fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&x| self.find(x) == x).count()
    }
}

/// Minimal central projections of a unital subalgebra, sorted by their
/// entry lists.
pub fn minimal_central_projections(alg: &SubAlgebra) -> Result<Vec<ExactMatrix>> {
    if !alg.contains_unit() {
        return Err(Error::input(
            "central decomposition needs an algebra containing the identity",
        ));
    }
    let n = alg.ambient_dim();
    if alg.dim() == n * n {
        return Ok(vec![ExactMatrix::identity(n)]);
    }
    let z = center(alg)?;
    let mut parts = vec![ExactMatrix::identity(n)];
    for zb in z.basis() {
        // symmetrize so the spectrum is real
        let s = (zb + &zb.adjoint()).scale(&Rational::new(1.into(), 2.into()));
        let mut next = Vec::with_capacity(parts.len());
        for e in &parts {
            next.extend(split(e, &(e * &s))?);
        }
        parts = next;
        if parts.len() == z.dim() {
            break;
        }
    }
    if parts.len() != z.dim() {
        return Err(Error::Internal(format!(
            "found {} central idempotents for a {}-dimensional center",
            parts.len(),
            z.dim()
        )));
    }
    parts.sort_by(|a, b| entry_key(a).cmp(&entry_key(b)));
    Ok(parts)
}

fn entry_key(m: &ExactMatrix) -> Vec<(usize, usize)> {
    m.entries().map(|(i, j, _)| (i, j)).collect()
}

/// Spectral projections of `w` inside the corner with unit `e`.
fn split(e: &ExactMatrix, w: &ExactMatrix) -> Result<Vec<ExactMatrix>> {
    let n = e.dim();
    let mut powers = vec![e.clone()];
    loop {
        let next = &powers[powers.len() - 1] * w;
        powers.push(next);
        let cols: Vec<SparseVec> = powers.iter().map(|m| m.to_vec()).collect();
        let ker = linalg::kernel(&cols, n * n);
        if let Some(rel) = ker.first() {
            let d = powers.len() - 1;
            let mut coeffs = vec![Rational::zero(); d + 1];
            for (i, c) in rel {
                coeffs[*i] = c.clone();
            }
            let roots = rational_roots(&coeffs)?;
            if roots.len() != d {
                return Err(Error::OutOfScope(
                    "central element has a spectrum outside the rationals".into(),
                ));
            }
            if d == 1 {
                return Ok(vec![e.clone()]);
            }
            let mut out = Vec::with_capacity(d);
            for (j, lj) in roots.iter().enumerate() {
                let mut proj = e.clone();
                for (l, ll) in roots.iter().enumerate() {
                    if l == j {
                        continue;
                    }
                    let factor = (w - &e.scale(ll)).scale(&(lj - ll).recip());
                    proj = &proj * &factor;
                }
                out.push(proj);
            }
            return Ok(out);
        }
    }
}

/// Distinct rational roots of `Σ coeffs[i] t^i`.
pub(crate) fn rational_roots(coeffs: &[Rational]) -> Result<Vec<Rational>> {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| (c * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    while ints.last().is_some_and(Zero::is_zero) {
        ints.pop();
    }
    let mut roots = Vec::new();
    if ints.is_empty() {
        return Ok(roots);
    }
    if ints[0].is_zero() {
        roots.push(Rational::zero());
        let first_nonzero = ints.iter().position(|c| !c.is_zero()).unwrap_or(0);
        ints.drain(..first_nonzero);
    }
    if ints.len() <= 1 {
        return Ok(roots);
    }
    let nums = divisors(&ints[0])?;
    let dens = divisors(ints.last().expect("nonempty"))?;
    let poly: Vec<Rational> = ints.iter().cloned().map(Rational::from_integer).collect();
    let mut found: Vec<Rational> = Vec::new();
    for u in &nums {
        for v in &dens {
            for sign in [1i32, -1] {
                let cand = Rational::new(BigInt::from(sign) * BigInt::from(*u), BigInt::from(*v));
                if found.contains(&cand) {
                    continue;
                }
                let val = poly
                    .iter()
                    .rev()
                    .fold(Rational::zero(), |acc, c| acc * &cand + c);
                if val.is_zero() {
                    found.push(cand);
                }
            }
        }
    }
    roots.extend(found);
    roots.sort();
    Ok(roots)
}

fn divisors(n: &BigInt) -> Result<Vec<u64>> {
    let n = n
        .abs()
        .to_u64()
        .filter(|&v| v <= 1_000_000_000_000)
        .ok_or_else(|| Error::OutOfScope("polynomial coefficients too large".into()))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

fn integer_sqrt(n: usize) -> Option<usize> {
    let r = (n as f64).sqrt().round() as usize;
    (r.checked_mul(r) == Some(n)).then_some(r)
}

fn integral(x: &Rational, what: &str) -> Result<usize> {
    if !x.is_integer() || x.is_negative() {
        return Err(Error::Internal(format!("{what} is not a nonnegative integer: {x}")));
    }
    x.to_integer()
        .to_usize()
        .ok_or_else(|| Error::Internal(format!("{what} overflows")))
}

/// Decomposes a unital algebra into its simple blocks.
pub fn blocks(alg: &SubAlgebra) -> Result<Vec<Block>> {
    let n = alg.ambient_dim();
    if alg.dim() == n * n {
        return Ok(vec![Block { projection: ExactMatrix::identity(n), size: n, rep_multiplicity: 1 }]);
    }
    let projections = minimal_central_projections(alg)?;
    projections
        .into_iter()
        .map(|p| {
            let corner_dim = SubAlgebra::span_rank(
                alg.basis().iter().map(|b| &p * b).collect::<Vec<_>>().iter(),
            );
            let size = integer_sqrt(corner_dim).ok_or_else(|| {
                Error::Internal(format!("block of dimension {corner_dim} is not a square"))
            })?;
            let rank = integral(&p.raw_trace(), "projection rank")?;
            if size == 0 || rank % size != 0 {
                return Err(Error::Internal("block rank not divisible by block size".into()));
            }
            Ok(Block {
                projection: p,
                size,
                rep_multiplicity: rank / size,
            })
        })
        .collect()
}

/// Builds the inclusion matrix from already known block decompositions.
pub fn inclusion_from_blocks(sub_blocks: Vec<Block>, amb_blocks: Vec<Block>) -> Result<Inclusion> {
    let mut multiplicities = Vec::with_capacity(sub_blocks.len());
    for pb in &sub_blocks {
        let mut row = Vec::with_capacity(amb_blocks.len());
        for qb in &amb_blocks {
            let rank = integral(&(&pb.projection * &qb.projection).raw_trace(), "overlap rank")?;
            let unit = pb.size * qb.rep_multiplicity;
            if rank % unit != 0 {
                return Err(Error::Internal("multiplicity is not an integer".into()));
            }
            row.push((rank / unit) as u64);
        }
        multiplicities.push(row);
    }
    Ok(Inclusion {
        sub_blocks,
        amb_blocks,
        multiplicities,
    })
}

/// Inclusion matrix of `sub ⊆ amb`, both unital in the same ambient.
pub fn inclusion_matrix(sub: &SubAlgebra, amb: &SubAlgebra) -> Result<Inclusion> {
    if !amb.contains_algebra(sub) {
        return Err(Error::input("inclusion_matrix: first algebra is not contained in the second"));
    }
    inclusion_from_blocks(blocks(sub)?, blocks(amb)?)
}

/// `dim(Z(sub) ∩ Z(amb))`, the number of connected components computed
/// without any spectral splitting.
pub fn center_intersection_dim(sub: &SubAlgebra, amb: &SubAlgebra) -> Result<usize> {
    let zs = center(sub)?;
    let za = center(amb)?;
    Ok(super::algebra::intersection(&zs, &za)?.dim())
}
