//! Commuting squares built from a permutation biunitary.
//!
//! A square is drawn as
//!
//! ```text
//! B0 ⊂ B1
//! ∪    ∪
//! A0 ⊂ A1
//! ```

use std::fmt;

use crate::biunitary::{block_transpose, extract_ks, factor_quadruple, is_biunitary, PermMatrix};
use crate::error::{Error, Result};
use crate::exact::{inclusion_matrix, ConditionalExpectation, ExactMatrix, SubAlgebra, TraceForm};
use crate::report::Report;

/// The standard subalgebras of `M_p ⊗ M_k`.
pub mod std_algebras {
    use crate::exact::{ExactMatrix, SubAlgebra};

    fn tensor_units(
        p: usize,
        k: usize,
        left: impl Fn(usize) -> Vec<ExactMatrix>,
        right: impl Fn(usize) -> Vec<ExactMatrix>,
    ) -> SubAlgebra {
        let l = left(p);
        let r = right(k);
        let basis = l.iter().flat_map(|x| r.iter().map(move |y| x.kron(y))).collect();
        SubAlgebra::new_unchecked(p * k, basis)
    }

    fn units(n: usize) -> Vec<ExactMatrix> {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| ExactMatrix::unit(n, i, j)))
            .collect()
    }

    fn diag(n: usize) -> Vec<ExactMatrix> {
        (0..n).map(|i| ExactMatrix::unit(n, i, i)).collect()
    }

    fn one(n: usize) -> Vec<ExactMatrix> {
        vec![ExactMatrix::identity(n)]
    }

    /// `M_p ⊗ 1`
    pub fn mp_one(p: usize, k: usize) -> SubAlgebra {
        tensor_units(p, k, units, one)
    }

    /// `1 ⊗ M_k`
    pub fn one_mk(p: usize, k: usize) -> SubAlgebra {
        tensor_units(p, k, one, units)
    }

    /// `1 ⊗ Δ_k`
    pub fn one_delta(p: usize, k: usize) -> SubAlgebra {
        tensor_units(p, k, one, diag)
    }

    /// `M_p ⊗ Δ_k`
    pub fn mp_delta(p: usize, k: usize) -> SubAlgebra {
        tensor_units(p, k, units, diag)
    }

    /// `Δ_p ⊗ M_k`
    pub fn delta_mk(p: usize, k: usize) -> SubAlgebra {
        tensor_units(p, k, diag, units)
    }

    pub fn full(p: usize, k: usize) -> SubAlgebra {
        SubAlgebra::full(p * k)
    }

    pub fn scalars(p: usize, k: usize) -> SubAlgebra {
        SubAlgebra::scalars(p * k)
    }
}

use std_algebras as sa;

/// Four nested algebras and a trace on the top-right corner.
#[derive(Clone, Debug)]
pub struct SquareSpec {
    a0: SubAlgebra,
    a1: SubAlgebra,
    b0: SubAlgebra,
    b1: SubAlgebra,
    trace: TraceForm,
    labels: [String; 4],
}

impl SquareSpec {
    /// Validates the four containments and nondegeneracy of the trace on `B1`.
    pub fn new(a0: SubAlgebra, a1: SubAlgebra, b0: SubAlgebra, b1: SubAlgebra, trace: TraceForm) -> Result<Self> {
        let n = b1.ambient_dim();
        if [&a0, &a1, &b0].iter().any(|x| x.ambient_dim() != n) || trace.dim() != n {
            return Err(Error::input("square corners and trace must share one ambient dimension"));
        }
        for (name, sub, amb) in [
            ("A0 ⊂ A1", &a0, &a1),
            ("A1 ⊂ B1", &a1, &b1),
            ("A0 ⊂ B0", &a0, &b0),
            ("B0 ⊂ B1", &b0, &b1),
        ] {
            if !amb.contains_algebra(sub) {
                return Err(Error::input(format!("containment {name} fails")));
            }
        }
        if !trace.is_faithful() {
            ConditionalExpectation::new(&b1, &trace)?;
        }
        Ok(SquareSpec {
            a0,
            a1,
            b0,
            b1,
            trace,
            labels: ["A0", "A1", "B0", "B1"].map(String::from),
        })
    }

    pub fn with_labels(mut self, a0: &str, a1: &str, b0: &str, b1: &str) -> Self {
        self.labels = [a0, a1, b0, b1].map(String::from);
        self
    }

    pub fn a0(&self) -> &SubAlgebra {
        &self.a0
    }

    pub fn a1(&self) -> &SubAlgebra {
        &self.a1
    }

    pub fn b0(&self) -> &SubAlgebra {
        &self.b0
    }

    pub fn b1(&self) -> &SubAlgebra {
        &self.b1
    }

    pub fn trace(&self) -> &TraceForm {
        &self.trace
    }

    pub fn labels(&self) -> &[String; 4] {
        &self.labels
    }

    /// Corner-by-corner span equality.
    pub fn same_corners(&self, other: &SquareSpec) -> bool {
        self.a0.same_span(&other.a0)
            && self.a1.same_span(&other.a1)
            && self.b0.same_span(&other.b0)
            && self.b1.same_span(&other.b1)
    }

    /// Image of every corner under `x ↦ w x w*`.
    pub fn conjugated(&self, w: &PermMatrix) -> SquareSpec {
        let m = w.map();
        SquareSpec {
            a0: self.a0.permuted(m),
            a1: self.a1.permuted(m),
            b0: self.b0.permuted(m),
            b1: self.b1.permuted(m),
            trace: self.trace.clone(),
            labels: self.labels.clone(),
        }
    }

    fn expectation<'a>(&'a self, onto: &'a SubAlgebra) -> ConditionalExpectation<'a> {
        ConditionalExpectation::new(onto, &self.trace).expect("trace is nondegenerate on every corner of a validated square")
    }
}

impl fmt::Display for SquareSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cell = |i: usize, alg: &SubAlgebra| format!("{} [dim {}]", self.labels[i], alg.dim());
        let (b0, b1) = (cell(2, &self.b0), cell(3, &self.b1));
        let (a0, a1) = (cell(0, &self.a0), cell(1, &self.a1));
        let w = b0.chars().count().max(a0.chars().count());
        writeln!(f, "{b0:<w$}  ⊂  {b1}")?;
        writeln!(f, "{:<w$}     ∪", "∪")?;
        writeln!(f, "{a0:<w$}  ⊂  {a1}")
    }
}

fn require_biunitary(u: &PermMatrix) -> Result<()> {
    if is_biunitary(u) {
        Ok(())
    } else {
        Err(Error::input(format!("{u:?} is not a permutation biunitary")))
    }
}

/// `U(1⊗M_k)U* ⊂ M_p⊗M_k` over `ℂ ⊂ M_p⊗1`, normalized trace.
pub fn square_from_biunitary(u: &PermMatrix) -> Result<SquareSpec> {
    require_biunitary(u)?;
    let (p, k) = (u.p(), u.k());
    Ok(SquareSpec::new(
        sa::scalars(p, k),
        sa::mp_one(p, k),
        sa::one_mk(p, k).permuted(u.map()),
        sa::full(p, k),
        TraceForm::normalized(p * k),
    )?
    .with_labels("C", "M_p⊗1", "U(1⊗M_k)U*", "M_p⊗M_k"))
}

/// The lower and upper squares through the middle row
/// `U(1⊗Δ_k)U* ⊂ M_p⊗Δ_k`.
pub fn intermediate_squares(u: &PermMatrix) -> Result<(SquareSpec, SquareSpec)> {
    require_biunitary(u)?;
    let (p, k) = (u.p(), u.k());
    let mid_left = sa::one_delta(p, k).permuted(u.map());
    let mid_right = sa::mp_delta(p, k);
    if !mid_right.contains_algebra(&mid_left) {
        return Err(Error::Internal(format!("U(1⊗Δ_k)U* ⊄ M_p⊗Δ_k for {u:?}")));
    }
    let tr = TraceForm::normalized(p * k);
    let lower = SquareSpec::new(sa::scalars(p, k), sa::mp_one(p, k), mid_left.clone(), mid_right.clone(), tr.clone())?
        .with_labels("C", "M_p⊗1", "U(1⊗Δ_k)U*", "M_p⊗Δ_k");
    let upper = SquareSpec::new(mid_left, mid_right, sa::one_mk(p, k).permuted(u.map()), sa::full(p, k), tr)?
        .with_labels("U(1⊗Δ_k)U*", "M_p⊗Δ_k", "U(1⊗M_k)U*", "M_p⊗M_k");
    Ok((lower, upper))
}

/// `E_{A1}(B0) ⊆ A0`.
pub fn is_commuting(sq: &SquareSpec) -> bool {
    let e = sq.expectation(&sq.a1);
    sq.b0
        .basis()
        .iter()
        .all(|b| sq.a0.contains(&e.apply(b).expect("dimensions agree")))
}

/// `E_{A1} ∘ E_{B0} = E_{A0}` on a basis of `B1`.
pub fn is_commuting_composed(sq: &SquareSpec) -> bool {
    let (ea1, eb0, ea0) = (sq.expectation(&sq.a1), sq.expectation(&sq.b0), sq.expectation(&sq.a0));
    sq.b1.basis().iter().all(|x| {
        let lhs = ea1.apply(&eb0.apply(x).expect("dims")).expect("dims");
        lhs == ea0.apply(x).expect("dims")
    })
}

/// `span(B0·A1) = B1`.
pub fn is_symmetric(sq: &SquareSpec) -> bool {
    let products: Vec<ExactMatrix> = sq
        .b0
        .basis()
        .iter()
        .flat_map(|b| sq.a1.basis().iter().map(move |a| b * a))
        .collect();
    SubAlgebra::span_rank(&products) == sq.b1.dim()
}

/// Number of connected components of the Bratteli diagram of `sub ⊂ amb`.
pub fn connected_components(sub: &SubAlgebra, amb: &SubAlgebra) -> Result<usize> {
    Ok(inclusion_matrix(sub, amb)?.components())
}

/// Stacks `upper` on `lower` when the shared row agrees.
pub fn compose_vertical(lower: &SquareSpec, upper: &SquareSpec) -> Option<SquareSpec> {
    if !(lower.b0.same_span(&upper.a0) && lower.b1.same_span(&upper.a1)) {
        return None;
    }
    SquareSpec::new(
        lower.a0.clone(),
        lower.a1.clone(),
        upper.b0.clone(),
        upper.b1.clone(),
        upper.trace.clone(),
    )
    .ok()
}

/// The lower square's middle row equals the one built from `N*`, and the
/// upper square conjugated by `Θ` is the one built from `Λ`.
pub fn check_lemma_intsq(u: &PermMatrix) -> Result<Report> {
    require_biunitary(u)?;
    let (p, k) = (u.p(), u.k());
    let quad = factor_quadruple(&extract_ks(u)?)?;
    let diag = sa::one_delta(p, k);
    let mut r = Report::new();

    let via_u = diag.permuted(u.map());
    let via_n = diag.permuted(quad.n.adjoint().map());
    r.check("lowsq2.middle_row_equal", via_u.same_span(&via_n));
    r.check("lowsq2.p_stabilizes_1⊗Δ_k", diag.permuted(quad.p.map()).same_span(&diag));

    let (_, upper) = intermediate_squares(u)?;
    let conj = upper.conjugated(&quad.theta);
    let lam = quad.lambda.map();
    r.check("upsq2.theta_in_M_p⊗Δ_k", quad.theta.fixes_roman());
    r.check("upsq2.top_left", conj.b0.same_span(&sa::one_mk(p, k).permuted(lam)));
    r.check("upsq2.top_right", conj.b1.same_span(&sa::full(p, k)));
    r.check("upsq2.bottom_left", conj.a0.same_span(&diag.permuted(lam)));
    r.check("upsq2.bottom_right", conj.a1.same_span(&sa::mp_delta(p, k)));
    Ok(r)
}

/// The all-entries-`1/k` projection in `M_k`.
pub fn jones_e(k: usize) -> ExactMatrix {
    let w = crate::exact::q(1, k as i64);
    ExactMatrix::from_entries(k, (0..k * k).map(|idx| (idx / k, idx % k, w.clone())))
}

/// Finite identities showing the `Λ` squares model the dual inclusion.
pub fn check_duality(u: &PermMatrix) -> Result<Report> {
    require_biunitary(u)?;
    let (p, k) = (u.p(), u.k());
    let quad = factor_quadruple(&extract_ks(u)?)?;
    let ut = u.block_transpose_perm().expect("biunitary");
    let diag = sa::one_delta(p, k);
    let mut r = Report::new();

    r.check("dlowsq.u_tilde_equals_lambda", diag.permuted(ut.map()).same_span(&diag.permuted(quad.lambda.map())));
    r.check("duabc.u_tilde_matrix", block_transpose(u) == ut.to_matrix());

    let e = jones_e(k);
    let one_e = ExactMatrix::identity(p).kron(&e);
    r.check_eq("lambda_fixes_1⊗e", &one_e.permute(quad.lambda.map()), &one_e);

    let tr = TraceForm::normalized(k);
    let ok = (0..k).all(|i| {
        let d = ExactMatrix::unit(k, i, i);
        &(&e * &d) * &e == e.scale(&tr.eval(&d))
    });
    r.check("e_implements_trace_on_Δ_k", ok);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biunitary::{enumerate_biunitaries, ks_compose};
    use crate::perm::Perm;

    fn block_diag_example() -> PermMatrix {
        ks_compose(&[Perm::identity(2), Perm::transposition(2, 0, 1)], &[Perm::identity(2), Perm::identity(2)]).unwrap()
    }

    #[test]
    fn identity_square() {
        let sq = square_from_biunitary(&PermMatrix::identity(2, 3)).unwrap();
        assert!(sq.b0().same_span(&sa::one_mk(2, 3)));
        assert!(is_commuting(&sq) && is_symmetric(&sq));
    }

    #[test]
    fn non_biunitary_refused() {
        let u = PermMatrix::new(2, 2, vec![0, 2, 1, 3]).unwrap();
        assert!(!is_biunitary(&u));
        assert!(matches!(square_from_biunitary(&u), Err(Error::Input(_))));
    }

    #[test]
    fn non_commuting_and_non_symmetric() {
        let tr = TraceForm::normalized(2);
        let full = SubAlgebra::full(2);
        let sq = SquareSpec::new(SubAlgebra::scalars(2), full.clone(), full.clone(), full.clone(), tr.clone()).unwrap();
        assert!(!is_commuting(&sq));
        assert!(!is_commuting_composed(&sq));
        let sq = SquareSpec::new(
            SubAlgebra::scalars(2),
            SubAlgebra::scalars(2),
            SubAlgebra::scalars(2),
            full,
            tr,
        )
        .unwrap();
        assert!(!is_symmetric(&sq));
    }

    #[test]
    fn invalid_nesting_rejected() {
        let tr = TraceForm::normalized(2);
        let r = SquareSpec::new(
            SubAlgebra::full(2),
            SubAlgebra::scalars(2),
            SubAlgebra::full(2),
            SubAlgebra::full(2),
            tr,
        );
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn identity_middle_row() {
        let (lower, _) = intermediate_squares(&PermMatrix::identity(2, 2)).unwrap();
        assert!(lower.b0().same_span(&sa::one_delta(2, 2)));
        assert_eq!(connected_components(lower.b0(), lower.b1()).unwrap(), 2);
    }

    #[test]
    fn block_diagonal_middle_row() {
        let u = block_diag_example();
        let (lower, _) = intermediate_squares(&u).unwrap();
        // U(1⊗f_aa)U* = Σ_α e_αα ⊗ f_{λ_α(a)λ_α(a)}
        let ks = extract_ks(&u).unwrap();
        for a in 0..2 {
            let expected = (0..2).fold(ExactMatrix::zeros(4), |acc, alpha| {
                let b = ks.lambda[alpha].apply(a);
                &acc + &ExactMatrix::unit(2, alpha, alpha).kron(&ExactMatrix::unit(2, b, b))
            });
            let actual = ExactMatrix::identity(2).kron(&ExactMatrix::unit(2, a, a)).permute(u.map());
            assert_eq!(actual, expected);
            assert!(lower.b0().contains(&expected));
        }
    }

    #[test]
    fn upper_square_expectation_formula() {
        for u in enumerate_biunitaries(2, 2).unwrap() {
            let (_, upper) = intermediate_squares(&u).unwrap();
            let e = ConditionalExpectation::new(upper.a1(), upper.trace()).unwrap();
            for a in 0..2 {
                for b in 0..2 {
                    let x = ExactMatrix::identity(2).kron(&ExactMatrix::unit(2, a, b)).permute(u.map());
                    let expected = if a == b { x.clone() } else { ExactMatrix::zeros(4) };
                    assert_eq!(e.apply(&x).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn squares_of_small_enumerations() {
        for (p, k) in [(2, 2), (2, 3), (3, 2)] {
            for u in enumerate_biunitaries(p, k).unwrap() {
                let sq = square_from_biunitary(&u).unwrap();
                assert!(is_commuting(&sq) && is_symmetric(&sq));
                assert!(is_commuting_composed(&sq));
                let (lower, upper) = intermediate_squares(&u).unwrap();
                for s in [&lower, &upper] {
                    assert!(is_commuting(s) && is_symmetric(s) && is_commuting_composed(s));
                }
                assert!(compose_vertical(&lower, &upper).unwrap().same_corners(&sq));
                assert!(check_lemma_intsq(&u).unwrap().all_pass());
                assert!(check_duality(&u).unwrap().all_pass());
            }
        }
    }

    #[test]
    fn duality_for_block_diagonal() {
        let r = check_duality(&block_diag_example()).unwrap();
        assert!(r.all_pass(), "{r:?}");
        assert!(check_lemma_intsq(&PermMatrix::identity(3, 3)).unwrap().all_pass());
    }

    #[test]
    fn tensor_inclusion_connected() {
        assert_eq!(connected_components(&sa::mp_one(2, 3), &sa::full(2, 3)).unwrap(), 1);
        assert!(matches!(
            connected_components(&sa::full(2, 3), &sa::mp_one(2, 3)),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn text_layout() {
        let sq = square_from_biunitary(&PermMatrix::identity(1, 2)).unwrap();
        let s = sq.to_string();
        assert!(s.lines().next().unwrap().contains("U(1⊗M_k)U* [dim 4]  ⊂  M_p⊗M_k [dim 4]"));
        assert_eq!(s.lines().count(), 3);
    }
}
