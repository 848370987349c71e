//! Experimental: the basic construction `⟨M, e_N⟩` of an inclusion
//! `N ⊂ M`, realised on `L²(M, tr)`. Used to probe levels past the
//! closed-form ladder.

use crate::error::{Error, Result};
use crate::exact::{
    apply_rows, check_dim, inclusion_matrix, inverse, ConditionalExpectation, Echelon, ExactMatrix, SparseVec,
    SubAlgebra, TraceForm,
};

#[derive(Clone, Debug)]
pub struct BasicConstruction {
    /// `⟨M, e_N⟩` acting on `L²(M)` in the coordinates of `M`'s basis.
    pub algebra: SubAlgebra,
    pub jones: ExactMatrix,
    /// `Σ_i c_i²` with `c = G a`, `a` the block sizes of `M`.
    pub expected_dim: usize,
}

fn coordinates(gram_inverse: &[SparseVec], basis: &[ExactMatrix], trace: &TraceForm, y: &ExactMatrix) -> SparseVec {
    let rhs: SparseVec = basis
        .iter()
        .enumerate()
        .map(|(i, b)| (i, trace.pair(b, y)))
        .filter(|(_, v)| *v != num_traits::Zero::zero())
        .collect();
    apply_rows(gram_inverse, &rhs)
}

fn operator(dim: usize, columns: impl Iterator<Item = SparseVec>) -> ExactMatrix {
    ExactMatrix::from_entries(
        dim,
        columns
            .enumerate()
            .flat_map(|(j, col)| col.into_iter().map(move |(i, v)| (i, j, v)))
            .collect::<Vec<_>>(),
    )
}

pub fn basic_construction(sub: &SubAlgebra, amb: &SubAlgebra, trace: &TraceForm) -> Result<BasicConstruction> {
    if !amb.contains_algebra(sub) {
        return Err(Error::input("basic construction needs N ⊂ M"));
    }
    let basis = amb.basis();
    let d = basis.len();
    check_dim(d)?;
    let gram: Vec<SparseVec> = basis
        .iter()
        .map(|x| basis.iter().enumerate().map(|(j, y)| (j, trace.pair(x, y))).filter(|(_, v)| *v != num_traits::Zero::zero()).collect())
        .collect();
    let gram_inverse =
        inverse(&gram).ok_or_else(|| Error::DegenerateTrace("trace is not faithful on M".into()))?;
    let coords = |y: &ExactMatrix| coordinates(&gram_inverse, basis, trace, y);

    let cond = ConditionalExpectation::new(sub, trace)?;
    let jones = operator(d, basis.iter().map(|b| cond.apply(b).map(|y| coords(&y))).collect::<Result<Vec<_>>>()?.into_iter());
    let mut gens: Vec<ExactMatrix> = basis.iter().map(|a| operator(d, basis.iter().map(|b| coords(&(a * b))))).collect();
    gens.push(jones.clone());

    // the generating set spans a *-closed space, so closing under products suffices
    let mut echelon = Echelon::new();
    let mut found: Vec<ExactMatrix> = Vec::new();
    for g in gens.iter() {
        if echelon.insert(&g.to_vec()) {
            found.push(g.clone());
        }
    }
    let mut done = 0;
    while done < found.len() {
        let x = found[done].clone();
        for i in 0..=done {
            let y = found[i].clone();
            for z in [&x * &y, &y * &x] {
                if echelon.insert(&z.to_vec()) {
                    found.push(z);
                }
            }
        }
        done += 1;
    }
    let algebra = SubAlgebra::new_unchecked(d, found);

    let inc = inclusion_matrix(sub, amb)?;
    let expected_dim = inc
        .multiplicities
        .iter()
        .map(|row| {
            let c: u64 = row.iter().zip(&inc.amb_blocks).map(|(&g, b)| g * b.size as u64).sum();
            (c * c) as usize
        })
        .sum();
    if algebra.dim() != expected_dim {
        return Err(Error::Internal(format!(
            "basic construction has dimension {} instead of {expected_dim}",
            algebra.dim()
        )));
    }
    Ok(BasicConstruction { algebra, jones, expected_dim })
}
