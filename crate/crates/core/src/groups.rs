//! The permutation group `Γ = ⟨ν_α ν_β⁻¹⟩` of a biunitary, its orbits and
//! stabilizers, the central projections `q_r`, and the construction of a
//! biunitary from a generating set.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::biunitary::{extract_ks, factor_quadruple, is_biunitary, KSData, PermMatrix};
use crate::error::{Error, Result};
use crate::exact::{check_dim, ExactMatrix, SubAlgebra, TraceForm};
use crate::perm::{closure, orbits, Perm};
use crate::report::Report;
use crate::squares::{is_commuting, is_symmetric, std_algebras as sa, SquareSpec};

/// Largest degree for which groups are stored as explicit element sets.
pub const MAX_DEGREE: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitData {
    pub k: usize,
    /// The family `ν`, kept so ladders can be built from the orbit data alone.
    pub nu: Vec<Perm>,
    /// Sorted elements of `Γ`.
    pub gamma: Vec<Perm>,
    /// Sorted elements of the coset `Γ' = ν_α⁻¹Γ`.
    pub gamma_prime: Vec<Perm>,
    /// Orbits of `Γ` on `{0..k-1}`, each sorted, ordered by least element.
    pub orbits: Vec<Vec<usize>>,
    /// `stabilizers[i]` fixes `representatives[i]`, the least point of orbit `i`.
    pub stabilizers: Vec<Vec<Perm>>,
    pub representatives: Vec<usize>,
}

impl OrbitData {
    pub fn p(&self) -> usize {
        self.nu.len()
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits.len() == 1
    }

    /// `H = H_1`, the stabilizer of the first point.
    pub fn h(&self) -> &[Perm] {
        &self.stabilizers[0]
    }

    pub fn gamma_index(&self, g: &Perm) -> Option<usize> {
        self.gamma.binary_search(g).ok()
    }

    pub fn gamma_prime_index(&self, g: &Perm) -> Option<usize> {
        self.gamma_prime.binary_search(g).ok()
    }
}

fn stabilizer(group: &[Perm], point: usize) -> Vec<Perm> {
    group.iter().filter(|g| g.apply(point) == point).cloned().collect()
}

pub fn gamma_of(ks: &KSData) -> Result<OrbitData> {
    let k = ks.k;
    if k > MAX_DEGREE {
        return Err(Error::capacity(format!("groups are limited to degree {MAX_DEGREE}, got {k}")));
    }
    let gens: Vec<Perm> = ks
        .nu
        .iter()
        .flat_map(|a| ks.nu.iter().map(move |b| a.compose(&b.inverse())))
        .collect();
    let gamma: Vec<Perm> = closure(k, &gens)?.into_iter().collect();
    if gamma.len() as u128 > crate::perm::factorial(k) {
        return Err(Error::Internal("closure exceeds the symmetric group".into()));
    }

    let coset = |alpha: usize| -> BTreeSet<Perm> {
        let inv = ks.nu[alpha].inverse();
        gamma.iter().map(|g| inv.compose(g)).collect()
    };
    let gamma_prime = coset(0);
    if (1..ks.p).any(|alpha| coset(alpha) != gamma_prime) {
        return Err(Error::Internal("cosets ν_α⁻¹Γ differ".into()));
    }

    let orbits = orbits(k, &gens);
    let representatives: Vec<usize> = orbits.iter().map(|o| o[0]).collect();
    let stabilizers: Vec<Vec<Perm>> = representatives.iter().map(|&r| stabilizer(&gamma, r)).collect();
    for (o, h) in orbits.iter().zip(&stabilizers) {
        if o.len() * h.len() != gamma.len() {
            return Err(Error::Internal("orbit-stabilizer count fails".into()));
        }
    }
    Ok(OrbitData {
        k,
        nu: ks.nu.clone(),
        gamma,
        gamma_prime: gamma_prime.into_iter().collect(),
        orbits,
        stabilizers,
        representatives,
    })
}

/// Orbit data straight from a biunitary.
pub fn orbit_data(u: &PermMatrix) -> Result<OrbitData> {
    gamma_of(&extract_ks(u)?)
}

/// The group `⟨ν_α⁻¹ν_β⟩` is `ν_γ⁻¹Γν_γ` for every `γ`, with stabilizers
/// matching under the same conjugation.
pub fn remark_conjugacy_check(ks: &KSData) -> bool {
    let Ok(od) = gamma_of(ks) else { return false };
    let gens: Vec<Perm> = ks
        .nu
        .iter()
        .flat_map(|a| ks.nu.iter().map(move |b| a.inverse().compose(b)))
        .collect();
    let Ok(other) = closure(ks.k, &gens) else { return false };
    let other: Vec<Perm> = other.into_iter().collect();
    ks.nu.iter().all(|nu| {
        let inv = nu.inverse();
        let conj = |g: &Perm| inv.compose(g).compose(nu);
        let image: BTreeSet<Perm> = od.gamma.iter().map(conj).collect();
        image.iter().eq(other.iter())
            && (0..ks.k).all(|a| {
                let lhs: BTreeSet<Perm> = stabilizer(&od.gamma, a).iter().map(conj).collect();
                let rhs: BTreeSet<Perm> = stabilizer(&other, inv.apply(a)).into_iter().collect();
                lhs == rhs
            })
    })
}

/// The projections `q_r = N*(1 ⊗ Σ_{a∈r} f_aa)N`, one per orbit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralProjections {
    pub projections: Vec<ExactMatrix>,
}

fn require_biunitary(u: &PermMatrix) -> Result<()> {
    if is_biunitary(u) {
        Ok(())
    } else {
        Err(Error::input(format!("{u:?} is not a permutation biunitary")))
    }
}

/// Builds the `q_r` and records every property they must have.
pub fn central_projections_report(u: &PermMatrix, od: &OrbitData) -> Result<(CentralProjections, Report)> {
    require_biunitary(u)?;
    let (p, k) = (u.p(), u.k());
    if od.k != k {
        return Err(Error::input("orbit data and biunitary have different k"));
    }
    let n_star = factor_quadruple(&extract_ks(u)?)?.n.adjoint();
    let projections: Vec<ExactMatrix> = od
        .orbits
        .iter()
        .map(|r| {
            let d = ExactMatrix::from_entries(k, r.iter().map(|&a| (a, a, num_traits::One::one())));
            ExactMatrix::identity(p).kron(&d).permute(n_star.map())
        })
        .collect();

    let mut rep = Report::new();
    rep.check("projections", projections.iter().all(ExactMatrix::is_projection));
    let orthogonal = projections
        .iter()
        .enumerate()
        .all(|(i, a)| projections.iter().skip(i + 1).all(|b| (a * b).is_zero()));
    rep.check("mutually_orthogonal", orthogonal);
    let sum = projections.iter().fold(ExactMatrix::zeros(p * k), |acc, q| &acc + q);
    rep.check_eq("sum_to_identity", &sum, &ExactMatrix::identity(p * k));

    let middle = sa::one_delta(p, k).permuted(u.map());
    let mp1 = sa::mp_one(p, k);
    let commute = |alg: &SubAlgebra| {
        projections
            .iter()
            .all(|q| alg.basis().iter().all(|b| q.commutes_with(b)))
    };
    rep.check("commute_with_U(1⊗Δ_k)U*", commute(&middle));
    rep.check("commute_with_M_p⊗1", commute(&mp1));
    let diag = sa::one_delta(p, k);
    rep.check("in_1⊗Δ_k", projections.iter().all(|q| diag.contains(q)));
    rep.check("in_U(1⊗Δ_k)U*", projections.iter().all(|q| middle.contains(q)));
    Ok((CentralProjections { projections }, rep))
}

pub fn central_projections(u: &PermMatrix, od: &OrbitData) -> Result<CentralProjections> {
    let (cp, rep) = central_projections_report(u, od)?;
    rep.ensure()?;
    Ok(cp)
}

/// `U = Σ_α e_αα ⊗ U_α` with `U_0 = 1` and `U_α` the `α`-th generator.
pub fn biunitary_from_subgroup(generators: &[Perm]) -> Result<PermMatrix> {
    let Some(first) = generators.first() else {
        return Err(Error::input("at least one generator is required"));
    };
    let k = first.len();
    if k == 0 || generators.iter().any(|g| g.len() != k) {
        return Err(Error::input("generators must be permutations of one common positive degree"));
    }
    let p = generators.len() + 1;
    check_dim(p * k)?;
    let id = Perm::identity(k);
    let blocks: Vec<&Perm> = std::iter::once(&id).chain(generators).collect();
    Ok(PermMatrix::from_fn(p, k, |alpha, a| (alpha, blocks[alpha].apply(a))).expect("block-diagonal permutation"))
}

/// Left cosets `sH` of `H` inside `set`, each sorted, ordered by least element.
pub fn left_cosets(set: &[Perm], h: &[Perm]) -> Vec<Vec<Perm>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in set {
        if seen.contains(s) {
            continue;
        }
        let mut c: Vec<Perm> = h.iter().map(|x| s.compose(x)).collect();
        c.sort();
        seen.extend(c.iter().cloned());
        out.push(c);
    }
    out.sort();
    out
}

fn coset_of(cosets: &[Vec<Perm>], x: &Perm) -> usize {
    cosets
        .iter()
        .position(|c| c.binary_search(x).is_ok())
        .expect("element lies in some coset")
}

/// Square `ℂ ⊂ M_p` below `Δ_{Γ/H} ⊂ M_p ⊗ Δ_{Γ'/H}`, realized in
/// `M_p ⊗ M_{|Γ'/H|}` with cosets in [`left_cosets`] order.
pub fn coset_square(od: &OrbitData, h: &[Perm]) -> Result<SquareSpec> {
    let p = od.p();
    let gh = left_cosets(&od.gamma, h);
    let ph = left_cosets(&od.gamma_prime, h);
    let m = ph.len();
    check_dim(p * m)?;
    let lower_left: Vec<ExactMatrix> = gh
        .iter()
        .map(|c| {
            let g = &c[0];
            ExactMatrix::from_entries(
                p * m,
                (0..p).map(|alpha| {
                    let s = coset_of(&ph, &od.nu[alpha].inverse().compose(g));
                    (alpha * m + s, alpha * m + s, num_traits::One::one())
                }),
            )
        })
        .collect();
    let corner = SubAlgebra::new_unchecked(p * m, lower_left);
    Ok(SquareSpec::new(
        sa::scalars(p, m),
        sa::mp_one(p, m),
        corner,
        sa::mp_delta(p, m),
        TraceForm::normalized(p * m),
    )?
    .with_labels("C", "M_p", "Δ_{Γ/H}", "M_p⊗Δ_{Γ'/H}"))
}

/// Checks that `F ⊗ x_{gH} ↦ F ⊗ f_{g(1)g(1)}` carries the coset square
/// onto the lower square built from `N*`.
pub fn coset_square_isomorphism(u: &PermMatrix) -> Result<Report> {
    require_biunitary(u)?;
    let ks = extract_ks(u)?;
    let od = gamma_of(&ks)?;
    if !od.is_transitive() {
        return Err(Error::Scope(format!(
            "Γ has {} orbits; process each orbit with its own stabilizer",
            od.orbits.len()
        )));
    }
    let (p, k) = (u.p(), u.k());
    let h = od.h().to_vec();
    let star = coset_square(&od, &h)?;
    let ph = left_cosets(&od.gamma_prime, &h);
    let gh = left_cosets(&od.gamma, &h);

    let mut rep = Report::new();
    let point: Vec<usize> = ph.iter().map(|c| c[0].apply(0)).collect();
    let bijective = ph.len() == k && point.iter().collect::<BTreeSet<_>>().len() == k;
    rep.check("coset_map_bijective", bijective);
    if !bijective {
        return Ok(rep);
    }
    let well_defined = ph.iter().all(|c| c.iter().all(|s| s.apply(0) == c[0].apply(0)));
    rep.check("coset_map_well_defined", well_defined);

    // F ⊗ x_{sH} ↦ F ⊗ f_{s(1)}: relabel the second tensor index
    let phi: Vec<usize> = (0..p * k).map(|i| (i / k) * k + point[i % k]).collect();
    let image = star.conjugated(&PermMatrix::new(p, k, phi.clone())?);

    let n_star = factor_quadruple(&ks)?.n.adjoint();
    let target_middle = sa::one_delta(p, k).permuted(n_star.map());
    rep.check("corner_scalars", image.a0().same_span(&sa::scalars(p, k)));
    rep.check("corner_M_p⊗1", image.a1().same_span(&sa::mp_one(p, k)));
    rep.check("corner_N*(1⊗Δ_k)N", image.b0().same_span(&target_middle));
    rep.check("corner_M_p⊗Δ_k", image.b1().same_span(&sa::mp_delta(p, k)));
    let tr = TraceForm::normalized(p * k);
    rep.check(
        "trace_preserving",
        star.b1().basis().iter().all(|x| tr.eval(&x.permute(&phi)) == tr.eval(x)),
    );

    let images_match = (0..k).all(|a| {
        let Some(f) = od.gamma.iter().find(|g| g.apply(0) == a) else { return false };
        let fh = coset_of(&gh, f);
        let lhs = ExactMatrix::identity(p)
            .kron(&ExactMatrix::unit(k, a, a))
            .permute(n_star.map());
        lhs == star.b0().basis()[fh].permute(&phi)
    });
    rep.check("N*(1⊗â)N_is_image_of_x_fH", images_match);
    rep.check("star_commuting", is_commuting(&star));
    rep.check("star_symmetric", is_symmetric(&star));
    Ok(rep)
}

/// JSON view of orbit data, one-indexed.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitSummary {
    pub k: usize,
    pub order: usize,
    pub transitive: bool,
    pub gamma: Vec<Perm>,
    pub gamma_prime: Vec<Perm>,
    pub orbits: Vec<Vec<usize>>,
    pub representatives: Vec<usize>,
    pub stabilizers: Vec<Vec<Perm>>,
}

impl From<&OrbitData> for OrbitSummary {
    fn from(od: &OrbitData) -> Self {
        let one = |v: &[usize]| v.iter().map(|x| x + 1).collect::<Vec<_>>();
        OrbitSummary {
            k: od.k,
            order: od.gamma.len(),
            transitive: od.is_transitive(),
            gamma: od.gamma.clone(),
            gamma_prime: od.gamma_prime.clone(),
            orbits: od.orbits.iter().map(|o| one(o)).collect(),
            representatives: one(&od.representatives),
            stabilizers: od.stabilizers.clone(),
        }
    }
}
