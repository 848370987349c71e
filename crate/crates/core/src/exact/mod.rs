//! Exact rational matrix arithmetic and the subalgebra machinery every
//! other module is built on. No floating point is used anywhere.

mod algebra;
mod linalg;
mod matrix;
mod structure;

pub use algebra::{
    center, commutant_in, conditional_expectation, generated_algebra, intersection,
    ConditionalExpectation, SubAlgebra, TraceForm,
};
pub use linalg::{kernel, Echelon, SparseVec};
pub(crate) use linalg::{apply as apply_rows, inverse};
pub use matrix::{ExactMatrix, MAX_DIM};
pub(crate) use matrix::check_dim;
pub use structure::{
    blocks, center_intersection_dim, inclusion_from_blocks, inclusion_matrix,
    minimal_central_projections, Block, Inclusion,
};
pub(crate) use structure::UnionFind;

pub type Rational = num_rational::BigRational;

/// `num / den` as an exact rational.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// An integer as an exact rational.
pub fn qi(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Parses `"a"` or `"a/b"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let den: num_bigint::BigInt = b.trim().parse().ok()?;
            if num_traits::Zero::is_zero(&den) {
                return None;
            }
            Some(Rational::new(a.trim().parse().ok()?, den))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}
