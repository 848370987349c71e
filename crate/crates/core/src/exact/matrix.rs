use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{Rational, SparseVec};
use crate::error::{Error, Result};

/// Largest ambient dimension any matrix may have.
pub const MAX_DIM: usize = 256;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::input("ambient dimension must be positive"));
    }
    if dim > MAX_DIM {
        return Err(Error::capacity(format!(
            "ambient dimension {dim} exceeds the limit of {MAX_DIM}"
        )));
    }
    Ok(())
}

/// Square matrix with exact rational entries.
///
/// Rows are stored as column-sorted lists of the nonzero entries, so the
/// matrix units and permutation matrices that dominate this crate cost
/// one entry per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Rational)>>,
}

impl ExactMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0 && dim <= MAX_DIM, "matrix dimension {dim} out of range");
        ExactMatrix {
            dim,
            rows: vec![Vec::new(); dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, Rational::one())
    }

    pub fn scalar(dim: usize, value: Rational) -> Self {
        let mut m = Self::zeros(dim);
        if !value.is_zero() {
            for (i, row) in m.rows.iter_mut().enumerate() {
                row.push((i, value.clone()));
            }
        }
        m
    }

    /// The matrix unit with a single 1 at `(row, col)` (zero-indexed).
    pub fn unit(dim: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.rows[row].push((col, Rational::one()));
        m
    }

    /// Builds a matrix from `(row, col, value)` triples. Repeated positions
    /// are summed.
    pub fn from_entries(
        dim: usize,
        entries: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut m = Self::zeros(dim);
        for (i, j, v) in entries {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside dimension {dim}");
            m.rows[i].push((j, v));
        }
        for row in &mut m.rows {
            *row = normalize_row(std::mem::take(row));
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let dim = rows.len();
        Self::from_entries(
            dim,
            rows.iter().enumerate().flat_map(|(i, row)| {
                assert_eq!(row.len(), dim, "dense input must be square");
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(move |(j, v)| (i, j, v.clone()))
            }),
        )
    }

    /// Permutation matrix sending basis vector `j` to basis vector `images[j]`.
    pub fn permutation(images: &[usize]) -> Self {
        let dim = images.len();
        let mut m = Self::zeros(dim);
        for (col, &row) in images.iter().enumerate() {
            m.rows[row].push((col, Rational::one()));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Rational {
        match self.rows[row].binary_search_by_key(&col, |(c, _)| *c) {
            Ok(pos) => self.rows[row][pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn row(&self, row: usize) -> &[(usize, Rational)] {
        &self.rows[row]
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); self.dim]; self.dim];
        for (i, j, v) in self.entries() {
            out[i][j] = v.clone();
        }
        out
    }

    /// Adjoint. Entries are rational, so this is the transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for (i, j, v) in self.entries() {
            m.rows[j].push((i, v.clone()));
        }
        m
    }

    pub fn is_self_adjoint(&self) -> bool {
        *self == self.adjoint()
    }

    pub fn is_projection(&self) -> bool {
        self.is_self_adjoint() && &(self * self) == self
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zeros(self.dim);
        }
        ExactMatrix {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .map(|row| row.iter().map(|(j, v)| (*j, v * factor)).collect())
                .collect(),
        }
    }

    /// Plain (unnormalized) trace.
    pub fn raw_trace(&self) -> Rational {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self * other == other * self
    }

    /// Kronecker product `self ⊗ other`; row index is `i * other.dim + j`.
    pub fn kron(&self, other: &Self) -> Self {
        let dim = self.dim * other.dim;
        assert!(dim <= MAX_DIM, "tensor product dimension {dim} exceeds limit");
        let mut m = Self::zeros(dim);
        for (i, row) in self.rows.iter().enumerate() {
            for (i2, row2) in other.rows.iter().enumerate() {
                let out = &mut m.rows[i * other.dim + i2];
                for (j, v) in row {
                    for (j2, v2) in row2 {
                        out.push((j * other.dim + j2, v * v2));
                    }
                }
            }
        }
        m
    }

    /// Conjugation `W X W*` by the permutation matrix sending basis vector
    /// `j` to `images[j]`. Equivalent to relabelling indices.
    pub fn permute(&self, images: &[usize]) -> Self {
        assert_eq!(images.len(), self.dim);
        Self::from_entries(
            self.dim,
            self.entries().map(|(i, j, v)| (images[i], images[j], v.clone())),
        )
    }

    /// Flattened entry vector, index `row * dim + col`.
    pub fn to_vec(&self) -> SparseVec {
        self.entries()
            .map(|(i, j, v)| (i * self.dim + j, v.clone()))
            .collect()
    }

    pub fn from_vec(dim: usize, v: &SparseVec) -> Self {
        Self::from_entries(dim, v.iter().map(|(idx, x)| (idx / dim, idx % dim, x.clone())))
    }

    pub fn is_diagonal(&self) -> bool {
        self.entries().all(|(i, j, _)| i == j)
    }
}

fn normalize_row(mut row: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    row.sort_by_key(|(c, _)| *c);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some((lc, lv)) if *lc == c => *lv += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

fn merge_rows(
    a: &[(usize, Rational)],
    b: &[(usize, Rational)],
    negate_b: bool,
) -> Vec<(usize, Rational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            let v = if negate_b { -&b[j].1 } else { b[j].1.clone() };
            out.push((b[j].0, v));
            j += 1;
        } else {
            let v = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl<'a> Mul<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;

    fn mul(self, rhs: &'a ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let mut out = ExactMatrix::zeros(self.dim);
        let mut acc: Vec<Option<Rational>> = vec![None; self.dim];
        let mut touched = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                for (j, b) in &rhs.rows[*k] {
                    let term = a * b;
                    match &mut acc[*j] {
                        Some(x) => *x += term,
                        slot @ None => {
                            *slot = Some(term);
                            touched.push(*j);
                        }
                    }
                }
            }
            touched.sort_unstable();
            for j in touched.drain(..) {
                if let Some(v) = acc[j].take() {
                    if !v.is_zero() {
                        out.rows[i].push((j, v));
                    }
                }
            }
        }
        out
    }
}

impl Mul for ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: ExactMatrix) -> ExactMatrix {
        &self * &rhs
    }
}

impl<'a> Add<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &'a ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sum");
        ExactMatrix {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| merge_rows(a, b, false))
                .collect(),
        }
    }
}

impl Add for ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: ExactMatrix) -> ExactMatrix {
        &self + &rhs
    }
}

impl<'a> Sub<&'a ExactMatrix> for &'a ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &'a ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in difference");
        ExactMatrix {
            dim: self.dim,
            rows: self
                .rows
                .iter()
                .zip(&rhs.rows)
                .map(|(a, b)| merge_rows(a, b, true))
                .collect(),
        }
    }
}

impl Sub for ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: ExactMatrix) -> ExactMatrix {
        &self - &rhs
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        self.scale(&-Rational::one())
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMatrix({}) {{", self.dim)?;
        for (n, (i, j, v)) in self.entries().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, " ({i},{j})={v}")?;
        }
        write!(f, " }}")
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dense = self.to_dense();
        let width = dense
            .iter()
            .flatten()
            .map(|v| v.to_string().len())
            .max()
            .unwrap_or(1);
        for row in dense {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>width$}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct MatrixJson {
    dim: usize,
    entries: Vec<(usize, usize, String)>,
}

impl serde::Serialize for ExactMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            dim: self.dim,
            entries: self
                .entries()
                .map(|(i, j, v)| (i + 1, j + 1, v.to_string()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for ExactMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = MatrixJson::deserialize(d)?;
        check_dim(j.dim).map_err(D::Error::custom)?;
        let mut entries = Vec::with_capacity(j.entries.len());
        for (i, k, v) in j.entries {
            if !(1..=j.dim).contains(&i) || !(1..=j.dim).contains(&k) {
                return Err(D::Error::custom(format!("entry ({i}, {k}) outside 1..={}", j.dim)));
            }
            let x = super::parse_rational(&v)
                .ok_or_else(|| D::Error::custom(format!("{v:?} is not a rational")))?;
            entries.push((i - 1, k - 1, x));
        }
        Ok(ExactMatrix::from_entries(j.dim, entries))
    }
}
