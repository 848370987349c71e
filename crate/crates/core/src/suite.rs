//! Every finite identity for a single biunitary, gathered into one report.

use serde::Serialize;

use crate::biunitary::{extract_ks, factor_quadruple, is_biunitary, ks_compose, KSData, PermMatrix};
use crate::bisch::{pdiagram_check, qprop_check};
use crate::error::{Error, Result};
use crate::exact::{commutant_in, qi};
use crate::groups::{central_projections_report, coset_square_isomorphism, gamma_of, remark_conjugacy_check, OrbitSummary};
use crate::ladder::{first_relative_commutant, markov_data};
use crate::report::Report;
use crate::squares::{
    check_duality, check_lemma_intsq, connected_components, intermediate_squares, is_commuting, is_commuting_composed,
    is_symmetric, square_from_biunitary, std_algebras as sa,
};

/// Reconstruction from the four families and the factorizations.
pub fn ks_report(u: &PermMatrix) -> Result<Report> {
    let ks = extract_ks(u)?;
    let mut r = Report::new();
    r.check("reconstruct_from_lambda_rho", ks_compose(&ks.lambda, &ks.rho).as_ref() == Some(u));
    r.check("reconstruct_adjoint_from_nu_theta", ks_compose(&ks.nu, &ks.theta).as_ref() == Some(&u.adjoint()));
    r.check("factorizations", factor_quadruple(&ks).is_ok());
    r.check("conjugate_groups", remark_conjugacy_check(&ks));
    Ok(r)
}

pub fn squares_report(u: &PermMatrix) -> Result<Report> {
    let mut r = Report::new();
    let sq = square_from_biunitary(u)?;
    let (lower, upper) = intermediate_squares(u)?;
    for (name, s) in [("sq", &sq), ("lower", &lower), ("upper", &upper)] {
        r.check(format!("{name}.commuting"), is_commuting(s));
        r.check(format!("{name}.commuting_composed"), is_commuting_composed(s));
        r.check(format!("{name}.symmetric"), is_symmetric(s));
    }
    r.merge("intsq", check_lemma_intsq(u)?);
    r.merge("dual", check_duality(u)?);
    Ok(r)
}

/// Orbit projections, relative commutants and the coset square.
pub fn groups_report(u: &PermMatrix) -> Result<Report> {
    let od = gamma_of(&extract_ks(u)?)?;
    let (p, k) = (u.p(), u.k());
    let (cp, rep) = central_projections_report(u, &od)?;
    let mut r = Report::new();
    r.merge("q_r", rep);

    let omega = od.orbits.len();
    let n_star = factor_quadruple(&extract_ks(u)?)?.n.adjoint();
    let components = connected_components(&sa::one_delta(p, k).permuted(n_star.map()), &sa::mp_delta(p, k))?;
    r.check_details("omega_equals_components", omega == components, format!("|Ω| = {omega}, components = {components}"));

    let sq = square_from_biunitary(u)?;
    let (lower, _) = intermediate_squares(u)?;
    let rc = first_relative_commutant(&sq)?;
    let rc_lower = commutant_in(lower.a1(), lower.b0())?;
    r.check("q_r_in_A1'∩B0", cp.projections.iter().all(|q| rc.contains(q)));
    r.check("q_r_in_lower_A1'∩B0", cp.projections.iter().all(|q| rc_lower.contains(q)));
    r.check_details("omega_at_most_rc_dim", omega <= rc.dim(), format!("dim A1'∩B0 = {}", rc.dim()));
    r.check("irreducible_implies_transitive", rc.dim() != 1 || omega == 1);
    r.check("lower_irreducible_implies_transitive", rc_lower.dim() != 1 || omega == 1);
    if od.is_transitive() {
        r.merge("coset_square", coset_square_isomorphism(u)?);
    }
    Ok(r)
}

/// Vertical index `k²` and horizontal Markov eigenvalue `p²` on the square.
pub fn markov_report(u: &PermMatrix) -> Result<Report> {
    let sq = square_from_biunitary(u)?;
    let (p, k) = (u.p() as i64, u.k() as i64);
    let mut r = Report::new();
    let vertical = markov_data(sq.a1(), sq.b1(), sq.trace())?;
    let norm2: u64 = vertical.matrix.iter().flatten().map(|x| x * x).sum();
    r.check_details("vertical.norm2", norm2 == (k * k) as u64 && vertical.beta == qi(k * k), format!("‖G‖² = {norm2}"));
    let horizontal = markov_data(sq.b0(), sq.b1(), sq.trace())?;
    r.check_details("horizontal.beta", horizontal.beta == qi(p * p), format!("beta = {}", horizontal.beta));
    Ok(r)
}

pub fn bisch_report(u: &PermMatrix) -> Result<Report> {
    let mut r = Report::new();
    r.merge("pdiagram", pdiagram_check(u)?);
    r.merge("qprop", qprop_check(u)?);
    Ok(r)
}

/// All of the above, prefixed by area.
pub fn full_report(u: &PermMatrix) -> Result<Report> {
    if !is_biunitary(u) {
        return Err(Error::input(format!("{u:?} is not a permutation biunitary")));
    }
    let mut r = Report::new();
    r.merge("ks", ks_report(u)?);
    r.merge("squares", squares_report(u)?);
    r.merge("groups", groups_report(u)?);
    r.merge("markov", markov_report(u)?);
    r.merge("bisch", bisch_report(u)?);
    Ok(r)
}

/// Summary of the group invariant and the first relative commutant.
#[derive(Clone, Debug, Serialize)]
pub struct Invariants {
    pub p: usize,
    pub k: usize,
    pub families: KSData,
    pub group: OrbitSummary,
    pub omega: usize,
    pub relative_commutant_dim: usize,
    pub irreducible: bool,
}

pub fn invariants(u: &PermMatrix) -> Result<Invariants> {
    let ks = extract_ks(u)?;
    let od = gamma_of(&ks)?;
    let rc = first_relative_commutant(&square_from_biunitary(u)?)?;
    Ok(Invariants {
        p: u.p(),
        k: u.k(),
        omega: od.orbits.len(),
        group: OrbitSummary::from(&od),
        families: ks,
        relative_commutant_dim: rc.dim(),
        irreducible: rc.dim() == 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biunitary::enumerate_biunitaries;

    #[test]
    fn every_2x2_biunitary_passes() {
        for u in enumerate_biunitaries(2, 2).unwrap() {
            let r = full_report(&u).unwrap();
            assert!(r.all_pass(), "{u:?}: {:?}", r.failures());
        }
    }

    #[test]
    fn identity_invariants() {
        let inv = invariants(&PermMatrix::identity(2, 3)).unwrap();
        assert_eq!(inv.omega, 3);
        assert_eq!(inv.relative_commutant_dim, 9);
        assert!(!inv.irreducible);
    }
}
