//! Exact finite-level computations for commuting squares built from
//! permutation biunitary matrices.

pub mod biunitary;
pub mod bisch;
pub mod error;
pub mod exact;
pub mod groups;
pub mod ladder;
pub mod perm;
pub mod report;
pub mod squares;
pub mod suite;

pub use error::{Error, Result};
pub use report::Report;
