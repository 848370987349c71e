//! Permutation biunitaries in `M_p ⊗ M_k`, their permutation families and
//! factor matrices, and exhaustive enumeration.
//!
//! A basis vector of `ℂ^p ⊗ ℂ^k` is a pair `(α, a)` with flat index
//! `α·k + a`. A [`PermMatrix`] sends the basis vector `(α, a)` to
//! `map(α, a)`, so its 1-entry in column `(α, a)` sits in row `map(α, a)`.
//! The families satisfy `map(α, a) = (ρ_a(α), λ_α(a))` and
//! `map⁻¹(α, a) = (θ_a(α), ν_α(a))`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{check_dim, ExactMatrix};
use crate::perm::{factorial, Perm};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "PermMatrixJson", into = "PermMatrixJson")]
pub struct PermMatrix {
    p: usize,
    k: usize,
    map: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PermMatrixJson {
    p: usize,
    k: usize,
    images: Vec<[usize; 2]>,
}

impl TryFrom<PermMatrixJson> for PermMatrix {
    type Error = Error;

    fn try_from(j: PermMatrixJson) -> Result<Self> {
        if j.p == 0 || j.k == 0 {
            return Err(Error::input("p and k must be positive"));
        }
        let n = j.p.checked_mul(j.k).ok_or_else(|| Error::capacity("p·k overflows"))?;
        check_dim(n)?;
        if j.images.len() != n {
            return Err(Error::input(format!(
                "expected {n} images for p = {}, k = {}, found {}",
                j.p,
                j.k,
                j.images.len()
            )));
        }
        let mut map = Vec::with_capacity(n);
        for [alpha, a] in j.images {
            if !(1..=j.p).contains(&alpha) || !(1..=j.k).contains(&a) {
                return Err(Error::input(format!(
                    "image [{alpha}, {a}] outside 1..={} × 1..={}",
                    j.p, j.k
                )));
            }
            map.push((alpha - 1) * j.k + (a - 1));
        }
        PermMatrix::new(j.p, j.k, map)
    }
}

impl From<PermMatrix> for PermMatrixJson {
    fn from(u: PermMatrix) -> Self {
        let images = u
            .map
            .iter()
            .map(|&i| [i / u.k + 1, i % u.k + 1])
            .collect();
        PermMatrixJson { p: u.p, k: u.k, images }
    }
}

impl PermMatrix {
    pub fn new(p: usize, k: usize, map: Vec<usize>) -> Result<Self> {
        if p == 0 || k == 0 {
            return Err(Error::input("p and k must be positive"));
        }
        check_dim(p * k)?;
        if map.len() != p * k || Perm::from_images(map.clone()).is_err() {
            return Err(Error::input(format!(
                "map is not a bijection of the {}-element index set",
                p * k
            )));
        }
        Ok(PermMatrix { p, k, map })
    }

    /// Builds the matrix of `(α, a) ↦ f(α, a)`, or `None` when `f` is not
    /// a bijection.
    pub fn from_fn(p: usize, k: usize, f: impl Fn(usize, usize) -> (usize, usize)) -> Option<Self> {
        let n = p * k;
        let mut seen = vec![false; n];
        let mut map = Vec::with_capacity(n);
        for alpha in 0..p {
            for a in 0..k {
                let (beta, b) = f(alpha, a);
                debug_assert!(beta < p && b < k);
                let idx = beta * k + b;
                if seen[idx] {
                    return None;
                }
                seen[idx] = true;
                map.push(idx);
            }
        }
        Some(PermMatrix { p, k, map })
    }

    pub fn identity(p: usize, k: usize) -> Self {
        PermMatrix { p, k, map: (0..p * k).collect() }
    }

    /// Reads a 0/1 permutation matrix.
    pub fn from_matrix(p: usize, k: usize, m: &ExactMatrix) -> Result<Self> {
        if m.dim() != p * k {
            return Err(Error::input("matrix dimension differs from p·k"));
        }
        let t = m.adjoint();
        let mut map = Vec::with_capacity(p * k);
        for col in 0..p * k {
            match t.row(col) {
                [(row, v)] if *v == num_traits::One::one() => map.push(*row),
                _ => return Err(Error::input(format!("column {} is not a unit vector", col + 1))),
            }
        }
        Self::new(p, k, map)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.p * self.k
    }

    /// Flat images, column by column.
    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, alpha: usize, a: usize) -> (usize, usize) {
        let i = self.map[alpha * self.k + a];
        (i / self.k, i % self.k)
    }

    pub fn to_matrix(&self) -> ExactMatrix {
        ExactMatrix::permutation(&self.map)
    }

    pub fn adjoint(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &x) in self.map.iter().enumerate() {
            inv[x] = i;
        }
        PermMatrix { p: self.p, k: self.k, map: inv }
    }

    /// Matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.k), (other.p, other.k));
        PermMatrix {
            p: self.p,
            k: self.k,
            map: other.map.iter().map(|&j| self.map[j]).collect(),
        }
    }

    /// Lies in `Δ_p ⊗ M_k`: the Greek index is fixed.
    pub fn fixes_greek(&self) -> bool {
        (0..self.p).all(|alpha| (0..self.k).all(|a| self.image(alpha, a).0 == alpha))
    }

    /// Lies in `M_p ⊗ Δ_k`: the Roman index is fixed.
    pub fn fixes_roman(&self) -> bool {
        (0..self.p).all(|alpha| (0..self.k).all(|a| self.image(alpha, a).1 == a))
    }

    /// Block transpose as a permutation, when it is one.
    pub fn block_transpose_perm(&self) -> Option<Self> {
        // column (α,a) ↦ row (β,b) becomes column (β,a) ↦ row (α,b)
        let n = self.dim();
        let mut map = vec![usize::MAX; n];
        for alpha in 0..self.p {
            for a in 0..self.k {
                let (beta, b) = self.image(alpha, a);
                let slot = &mut map[beta * self.k + a];
                if *slot != usize::MAX {
                    return None;
                }
                *slot = alpha * self.k + b;
            }
        }
        let mut hit = vec![false; n];
        for &r in &map {
            if hit[r] {
                return None;
            }
            hit[r] = true;
        }
        Some(PermMatrix { p: self.p, k: self.k, map })
    }

    /// `(P₁⊗Q₁) · self · (P₂⊗Q₂)`.
    pub fn act(&self, p1: &Perm, q1: &Perm, p2: &Perm, q2: &Perm) -> Self {
        PermMatrix::from_fn(self.p, self.k, |alpha, a| {
            let (beta, b) = self.image(p2.apply(alpha), q2.apply(a));
            (p1.apply(beta), q1.apply(b))
        })
        .expect("tensor permutations preserve bijectivity")
    }
}

impl fmt::Debug for PermMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let images: Vec<(usize, usize)> = self.map.iter().map(|i| (i / self.k + 1, i % self.k + 1)).collect();
        write!(f, "PermMatrix(p={}, k={}, {:?})", self.p, self.k, images)
    }
}

/// The matrix `Ũ` obtained by swapping the Greek row and column indices.
pub fn block_transpose(u: &PermMatrix) -> ExactMatrix {
    let k = u.k;
    ExactMatrix::from_entries(
        u.dim(),
        (0..u.p).flat_map(|alpha| {
            (0..k).map(move |a| {
                let (beta, b) = u.image(alpha, a);
                (alpha * k + b, beta * k + a, num_traits::One::one())
            })
        }),
    )
}

pub fn is_biunitary(u: &PermMatrix) -> bool {
    u.block_transpose_perm().is_some()
}

/// The four permutation families of a biunitary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSData {
    pub p: usize,
    pub k: usize,
    pub lambda: Vec<Perm>,
    pub rho: Vec<Perm>,
    pub nu: Vec<Perm>,
    pub theta: Vec<Perm>,
}

fn families(u: &PermMatrix) -> Option<(Vec<Perm>, Vec<Perm>)> {
    let lambda = (0..u.p)
        .map(|alpha| Perm::from_images((0..u.k).map(|a| u.image(alpha, a).1).collect()).ok())
        .collect::<Option<Vec<_>>>()?;
    let rho = (0..u.k)
        .map(|a| Perm::from_images((0..u.p).map(|alpha| u.image(alpha, a).0).collect()).ok())
        .collect::<Option<Vec<_>>>()?;
    Some((lambda, rho))
}

pub fn extract_ks(u: &PermMatrix) -> Result<KSData> {
    let not_biunitary = || Error::Structure(format!("{u:?} is not a permutation biunitary"));
    let (lambda, rho) = families(u).ok_or_else(not_biunitary)?;
    let ustar = u.adjoint();
    let (nu, theta) = families(&ustar).ok_or_else(not_biunitary)?;
    if ks_compose(&lambda, &rho).as_ref() != Some(u) || ks_compose(&nu, &theta).as_ref() != Some(&ustar) {
        return Err(not_biunitary());
    }
    Ok(KSData { p: u.p, k: u.k, lambda, rho, nu, theta })
}

/// The matrix of `(α, a) ↦ (ρ_a(α), λ_α(a))`, or `None` when that map is
/// not a bijection or the family sizes are inconsistent.
pub fn ks_compose(lambda: &[Perm], rho: &[Perm]) -> Option<PermMatrix> {
    let (p, k) = (lambda.len(), rho.len());
    if p == 0 || k == 0 || lambda.iter().any(|l| l.len() != k) || rho.iter().any(|r| r.len() != p) {
        return None;
    }
    if check_dim(p * k).is_err() {
        return None;
    }
    PermMatrix::from_fn(p, k, |alpha, a| (rho[a].apply(alpha), lambda[alpha].apply(a)))
}

/// The factor matrices, with `U = Θ*Λ = N*P` and `Ũ = ΘN* = ΛP*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorQuadruple {
    /// `(α, a) ↦ (α, λ_α(a))`
    pub lambda: PermMatrix,
    /// `(α, a) ↦ (ρ_a(α), a)`
    pub p: PermMatrix,
    /// `(α, a) ↦ (α, ν_α(a))`
    pub n: PermMatrix,
    /// `(α, a) ↦ (θ_a(α), a)`
    pub theta: PermMatrix,
}

pub fn factor_quadruple(ks: &KSData) -> Result<FactorQuadruple> {
    let (p, k) = (ks.p, ks.k);
    let build = |f: &dyn Fn(usize, usize) -> (usize, usize)| {
        PermMatrix::from_fn(p, k, f).ok_or_else(|| Error::Internal("factor map is not a bijection".into()))
    };
    let quad = FactorQuadruple {
        lambda: build(&|alpha, a| (alpha, ks.lambda[alpha].apply(a)))?,
        p: build(&|alpha, a| (ks.rho[a].apply(alpha), a))?,
        n: build(&|alpha, a| (alpha, ks.nu[alpha].apply(a)))?,
        theta: build(&|alpha, a| (ks.theta[a].apply(alpha), a))?,
    };
    let u = ks_compose(&ks.lambda, &ks.rho)
        .ok_or_else(|| Error::Internal("families do not compose to a permutation".into()))?;
    let ut = u
        .block_transpose_perm()
        .ok_or_else(|| Error::Internal("block transpose is not a permutation".into()))?;
    let checks = [
        ("U = Θ*Λ", quad.theta.adjoint().compose(&quad.lambda) == u),
        ("U = N*P", quad.n.adjoint().compose(&quad.p) == u),
        ("Ũ = ΘN*", quad.theta.compose(&quad.n.adjoint()) == ut),
        ("Ũ = ΛP*", quad.lambda.compose(&quad.p.adjoint()) == ut),
    ];
    if let Some((name, _)) = checks.iter().find(|(_, ok)| !ok) {
        return Err(Error::Internal(format!("factorization {name} fails for {u:?}")));
    }
    Ok(quad)
}

const FAMILY_LIMIT: u128 = 10_000_000;

fn family_count(p: usize, k: usize) -> u128 {
    let fk = factorial(k).checked_pow(p as u32);
    let fp = factorial(p).checked_pow(k as u32);
    match (fk, fp) {
        (Some(a), Some(b)) => a.saturating_mul(b),
        _ => u128::MAX,
    }
}

fn check_enumeration_size(p: usize, k: usize) -> Result<()> {
    if p == 0 || k == 0 {
        return Err(Error::input("p and k must be positive"));
    }
    if p * k > 12 {
        return Err(Error::capacity(format!("enumeration limited to p·k ≤ 12, got {}", p * k)));
    }
    let count = family_count(p, k);
    if count > FAMILY_LIMIT {
        return Err(Error::capacity(format!(
            "(k!)^p·(p!)^k = {count} exceeds the enumeration limit {FAMILY_LIMIT}"
        )));
    }
    Ok(())
}

fn decode(mut idx: usize, radix: &[Perm], len: usize) -> Vec<&Perm> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(&radix[idx % radix.len()]);
        idx /= radix.len();
    }
    out
}

/// Every permutation biunitary in `M_p ⊗ M_k`, sorted by image array.
pub fn enumerate_biunitaries(p: usize, k: usize) -> Result<Vec<PermMatrix>> {
    check_enumeration_size(p, k)?;
    let perms_k = Perm::all(k);
    let perms_p = Perm::all(p);
    let n_lambda = perms_k.len().pow(p as u32);
    let n_rho = perms_p.len().pow(k as u32);
    let mut out: Vec<PermMatrix> = (0..n_lambda)
        .into_par_iter()
        .flat_map_iter(|li| {
            let lambda: Vec<Perm> = decode(li, &perms_k, p).into_iter().cloned().collect();
            let perms_p = &perms_p;
            (0..n_rho).filter_map(move |ri| {
                let rho: Vec<Perm> = decode(ri, perms_p, k).into_iter().cloned().collect();
                ks_compose(&lambda, &rho)
            })
        })
        .collect();
    out.par_sort_unstable();
    out.dedup();
    Ok(out)
}

/// Lexicographically least representative of `U` under
/// `U ~ (P₁⊗Q₁)U(P₂⊗Q₂)` with permutation matrices `P_i ∈ M_p`, `Q_i ∈ M_k`.
///
/// Experimental: this relation is a plausible reading of equivalence of
/// biunitaries and is not claimed to match any published classification.
pub fn canonical_form(u: &PermMatrix) -> Result<PermMatrix> {
    let group = factorial(u.p).saturating_mul(factorial(u.k));
    if group.saturating_mul(group) > 100_000_000 {
        return Err(Error::capacity(format!(
            "canonical form search over (p!·k!)² = {} elements is too large",
            group.saturating_mul(group)
        )));
    }
    let pp = Perm::all(u.p);
    let qq = Perm::all(u.k);
    let best = pp
        .par_iter()
        .flat_map_iter(|p2| qq.iter().map(move |q2| (p2, q2)))
        .map(|(p2, q2)| {
            let mut best: Option<PermMatrix> = None;
            for p1 in &pp {
                for q1 in &qq {
                    let v = u.act(p1, q1, p2, q2);
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
            best.expect("groups are nonempty")
        })
        .min()
        .expect("groups are nonempty");
    Ok(best)
}
