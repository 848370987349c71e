//! The Bisch projection `p = 1 ⊗ q`, `q = Σ_a e_{aa,aa} ∈ M_{k²}`, and the
//! finite identities that place it in the first relative commutant.
//!
//! `M_p ⊗ M_k ⊗ M_k` is indexed by `(α·k + a)·k + b`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::biunitary::{extract_ks, is_biunitary, KSData, PermMatrix};
use crate::error::{Error, Result};
use crate::exact::{check_dim, q, ConditionalExpectation, ExactMatrix, Rational, SubAlgebra, TraceForm};
use crate::perm::Perm;
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BischData {
    pub p: usize,
    pub k: usize,
    pub q_matrix: ExactMatrix,
    pub p_matrix: ExactMatrix,
}

fn diagonal(dim: usize, support: impl IntoIterator<Item = usize>) -> ExactMatrix {
    ExactMatrix::from_entries(dim, support.into_iter().map(|i| (i, i, Rational::one())))
}

fn check_projection(x: &ExactMatrix, k: usize) -> Result<()> {
    let tr = x.raw_trace() / Rational::from_integer(x.dim().into());
    if !x.is_projection() || tr != q(1, k as i64) {
        return Err(Error::Internal(format!("Bisch projection has trace {tr} or is not a projection")));
    }
    Ok(())
}

pub fn bisch_projection(p: usize, k: usize) -> Result<BischData> {
    if p == 0 || k == 0 {
        return Err(Error::input("p and k must be positive"));
    }
    build_p_n(0, p, k).map(|p_matrix| BischData {
        p,
        k,
        q_matrix: diagonal(k * k, (0..k).map(|a| a * k + a)),
        p_matrix,
    })
}

/// `1_p ⊗ 1_{k^n} ⊗ q ∈ M_p ⊗ M_{k^{n+2}}`.
pub fn build_p_n(n: usize, p: usize, k: usize) -> Result<ExactMatrix> {
    if p == 0 || k == 0 {
        return Err(Error::input("p and k must be positive"));
    }
    let outer = k
        .checked_pow(n as u32)
        .and_then(|x| x.checked_mul(p))
        .ok_or_else(|| Error::capacity("p_n ambient dimension overflows"))?;
    let dim = outer.checked_mul(k * k).ok_or_else(|| Error::capacity("p_n ambient dimension overflows"))?;
    check_dim(dim)?;
    let pn = diagonal(dim, (0..outer).flat_map(|i| (0..k).map(move |a| (i * k + a) * k + a)));
    check_projection(&pn, k)?;
    Ok(pn)
}

/// `λ_{ρ_a⁻¹(α)}(a) = b ⟺ ν_α(b) = a` for all `α, a, b`.
pub fn lemma5_identity_check(ks: &KSData) -> bool {
    let rho_inv: Vec<Perm> = ks.rho.iter().map(Perm::inverse).collect();
    (0..ks.p).all(|alpha| {
        (0..ks.k).all(|a| {
            (0..ks.k).all(|b| {
                let lhs = ks.lambda[rho_inv[a].apply(alpha)].apply(a) == b;
                lhs == (ks.nu[alpha].apply(b) == a)
            })
        })
    })
}

/// `Σ_γ U_{γa}^{βb} U_{γa'}^{αb'}` against both closed forms, the overlap
/// of the two branches, the λ/ν identity, and direct commutation of `p`
/// with the level-one algebras in `D₁`.
pub fn pdiagram_check(u: &PermMatrix) -> Result<Report> {
    let ks = extract_ks(u)?;
    let (p, k) = (u.p(), u.k());
    let entry = |g: usize, a: usize, beta: usize, b: usize| u.image(g, a) == (beta, b);
    let lhs = |beta: usize, alpha: usize, a: usize, a2: usize, b: usize, b2: usize| -> u64 {
        (0..p).filter(|&g| entry(g, a, beta, b) && entry(g, a2, alpha, b2)).count() as u64
    };
    let nu = |beta: usize, b: usize| ks.nu[beta].apply(b);
    let first = |alpha: usize, beta: usize, a: usize, b: usize, b2: usize| (alpha == beta && b == b2 && a == nu(beta, b)) as u64;
    let second = |alpha: usize, beta: usize, a: usize, a2: usize, b: usize| (alpha == beta && a == a2 && a == nu(beta, b)) as u64;
    let (mut same_a, mut same_b, mut overlap) = (true, true, true);
    for alpha in 0..p {
        for beta in 0..p {
            for a in 0..k {
                for b in 0..k {
                    for x in 0..k {
                        same_a &= lhs(beta, alpha, a, a, b, x) == first(alpha, beta, a, b, x);
                        same_b &= lhs(beta, alpha, a, x, b, b) == second(alpha, beta, a, x, b);
                    }
                    overlap &= first(alpha, beta, a, b, b) == second(alpha, beta, a, a, b);
                }
            }
        }
    }
    let mut r = Report::new();
    r.check("pdiagram.a_equals_a'", same_a);
    r.check("pdiagram.b_equals_b'", same_b);
    r.check("pdiagram.branches_agree", overlap);
    r.check("lemma5", lemma5_identity_check(&ks));

    let bd = bisch_projection(p, k)?;
    let n = p * k;
    let lift = |x: &ExactMatrix| x.kron(&ExactMatrix::identity(k));
    let middle: Vec<ExactMatrix> = (0..k)
        .map(|c| lift(&diagonal(n, (0..p).map(|g| u.image(g, c).0 * k + u.image(g, c).1))))
        .collect();
    let bottom: Vec<ExactMatrix> = (0..p)
        .flat_map(|a| (0..p).map(move |b| (a, b)))
        .map(|(a, b)| ExactMatrix::unit(p, a, b).kron(&ExactMatrix::identity(k * k)))
        .collect();
    r.check(
        "level1.p_commutes_with_U(1⊗Δ_k)U*⊗1",
        middle.iter().all(|x| x.commutes_with(&bd.p_matrix)),
    );
    r.check("level1.p_commutes_with_M_p⊗1", bottom.iter().all(|x| x.commutes_with(&bd.p_matrix)));
    Ok(r)
}

/// The q-identities and the level-one corner `C₁ = E_p(A₁)` in
/// `D₁ = M_p ⊗ M_k ⊗ M_k`. None of these involve `U` beyond `(p, k)`, so
/// results are cached per shape.
pub fn qprop_check(u: &PermMatrix) -> Result<Report> {
    if !is_biunitary(u) {
        return Err(Error::input(format!("{u:?} is not a permutation biunitary")));
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Report>>> = OnceLock::new();
    let key = (u.p(), u.k());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(r) = cache.lock().expect("cache lock").get(&key) {
        return Ok(r.clone());
    }
    let r = qprop_level1(key.0, key.1)?;
    cache.lock().expect("cache lock").insert(key, r.clone());
    Ok(r)
}

fn qprop_level1(p: usize, k: usize) -> Result<Report> {
    let bd = bisch_projection(p, k)?;
    let qm = &bd.q_matrix;
    let one_k = ExactMatrix::identity(k);
    let delta_k: Vec<ExactMatrix> = (0..k).map(|a| ExactMatrix::unit(k, a, a)).collect();
    let full_k: Vec<ExactMatrix> = (0..k)
        .flat_map(|a| (0..k).map(move |b| ExactMatrix::unit(k, a, b)))
        .collect();

    let mut r = Report::new();
    r.check("qprop.commutant", delta_k.iter().all(|d| d.kron(&one_k).commutes_with(qm)));
    let compressed: Vec<ExactMatrix> = full_k.iter().map(|x| &(qm * &x.kron(&one_k)) * qm).collect();
    let scaled: Vec<ExactMatrix> = delta_k.iter().map(|d| &d.kron(&one_k) * qm).collect();
    r.check("qprop1.span", span_equal(k * k, &compressed, &scaled));

    let n = p * k * k;
    let mp: Vec<ExactMatrix> = (0..p)
        .flat_map(|a| (0..p).map(move |b| ExactMatrix::unit(p, a, b)))
        .collect();
    let tensor = |left: &[ExactMatrix], right: &[ExactMatrix]| -> Vec<ExactMatrix> {
        left.iter()
            .flat_map(|x| right.iter().map(move |y| x.kron(y).kron(&ExactMatrix::identity(k))))
            .collect()
    };
    let c1 = SubAlgebra::new_unchecked(n, tensor(&mp, &delta_k));
    let a1 = SubAlgebra::new_unchecked(n, tensor(&mp, &full_k));
    let pm = &bd.p_matrix;
    r.check("level1.p_in_C1'∩D1", c1.basis().iter().all(|x| x.commutes_with(pm)));
    let pap: Vec<ExactMatrix> = a1.basis().iter().map(|x| &(pm * x) * pm).collect();
    let cp: Vec<ExactMatrix> = c1.basis().iter().map(|x| x * pm).collect();
    r.check("level1.pA1p=C1p", span_equal(n, &pap, &cp));
    let tr = TraceForm::normalized(n);
    let e = ConditionalExpectation::new(&c1, &tr)?;
    let mut implements = true;
    for (x, pxp) in a1.basis().iter().zip(&pap) {
        implements &= &e.apply(x)? * pm == *pxp;
    }
    r.check("level1.C1=E_p(A1)", implements);
    let span_p = SubAlgebra::new_unchecked(n, vec![pm.clone()]);
    r.check("level1.C1={p}'∩A1", crate::exact::commutant_in(&span_p, &a1)?.same_span(&c1));
    r.check("flatness.permutation_fixed", permutation_fixed(&bd));
    Ok(r)
}

fn span_equal(n: usize, a: &[ExactMatrix], b: &[ExactMatrix]) -> bool {
    SubAlgebra::new_unchecked(n, a.to_vec()).same_span(&SubAlgebra::new_unchecked(n, b.to_vec()))
}

/// `p` is fixed by `1 ⊗ (σ ⊗ σ)` for every `σ ∈ S_k`.
pub fn permutation_fixed(bd: &BischData) -> bool {
    let k = bd.k;
    Perm::all(k).iter().all(|s| {
        let images: Vec<usize> = (0..bd.p * k * k)
            .map(|i| {
                let (alpha, a, b) = (i / (k * k), (i / k) % k, i % k);
                (alpha * k + s.apply(a)) * k + s.apply(b)
            })
            .collect();
        bd.p_matrix.permute(&images) == bd.p_matrix
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biunitary::ks_compose;

    fn block_diagonal_swap() -> PermMatrix {
        ks_compose(&[Perm::identity(2), Perm::transposition(2, 0, 1)], &[Perm::identity(2), Perm::identity(2)]).unwrap()
    }

    #[test]
    fn small_projections() {
        let b = bisch_projection(1, 1).unwrap();
        assert_eq!(b.q_matrix, ExactMatrix::identity(1));
        assert_eq!(b.p_matrix, ExactMatrix::identity(1));
        let b = bisch_projection(3, 2).unwrap();
        assert_eq!(b.q_matrix.nnz(), 2);
        assert_eq!(b.p_matrix.raw_trace() / Rational::from_integer(12.into()), q(1, 2));
        assert!(permutation_fixed(&b));
    }

    #[test]
    fn p_n_family() {
        assert_eq!(build_p_n(0, 2, 3).unwrap(), bisch_projection(2, 3).unwrap().p_matrix);
        let p1 = build_p_n(1, 2, 2).unwrap();
        assert_eq!(p1.dim(), 16);
        assert_eq!(p1.raw_trace(), q(8, 1));
        assert_eq!(build_p_n(1, 1, 3).unwrap().raw_trace(), q(9, 1));
        assert!(matches!(build_p_n(3, 2, 3), Err(Error::Capacity(_))));
    }

    #[test]
    fn identity_and_swap_pass() {
        for u in [PermMatrix::identity(2, 2), PermMatrix::identity(3, 2), block_diagonal_swap()] {
            let r = pdiagram_check(&u).unwrap();
            assert!(r.all_pass(), "{:?}", r.failures());
            let r = qprop_check(&u).unwrap();
            assert!(r.all_pass(), "{:?}", r.failures());
        }
    }

    #[test]
    fn swap_has_nu_inverse_lambda() {
        let ks = extract_ks(&block_diagonal_swap()).unwrap();
        for (nu, lambda) in ks.nu.iter().zip(&ks.lambda) {
            assert_eq!(*nu, lambda.inverse());
        }
        assert!(lemma5_identity_check(&ks));
    }

    #[test]
    fn lemma5_detects_tampering() {
        let mut ks = extract_ks(&block_diagonal_swap()).unwrap();
        ks.nu[1] = Perm::identity(2);
        assert!(!lemma5_identity_check(&ks));
    }

    #[test]
    fn k1_collapses() {
        let r = qprop_check(&PermMatrix::identity(3, 1)).unwrap();
        assert!(r.all_pass());
    }
}
