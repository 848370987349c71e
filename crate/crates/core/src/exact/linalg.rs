//! Row reduction over the rationals on sparse vectors.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::Rational;

/// Sparse vector: index-sorted nonzero entries.
pub type SparseVec = Vec<(usize, Rational)>;

/// Incrementally built row echelon form.
///
/// Every stored row has leading entry 1 at its pivot column and no pivot
/// is shared. Rows are not back-substituted, so reduction walks the
/// candidate's columns left to right.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_vectors<'a>(vs: impl IntoIterator<Item = &'a SparseVec>) -> Self {
        let mut e = Self::new();
        for v in vs {
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the stored rows and returns the residue.
    pub fn reduce(&self, v: &SparseVec) -> BTreeMap<usize, Rational> {
        let mut w: BTreeMap<usize, Rational> = v.iter().cloned().collect();
        let mut cursor = 0usize;
        while let Some(col) = w.range(cursor..).next().map(|(c, _)| *c) {
            if let Some(&r) = self.pivots.get(&col) {
                let coef = w.remove(&col).expect("present");
                for (j, x) in self.rows[r].iter().skip(1) {
                    let entry = w.entry(*j).or_insert_with(Rational::zero);
                    *entry -= &coef * x;
                    if entry.is_zero() {
                        w.remove(j);
                    }
                }
            }
            cursor = col + 1;
        }
        w
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts `v`; returns `false` when it was already in the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let residue = self.reduce(v);
        self.push_residue(residue)
    }

    fn push_residue(&mut self, residue: BTreeMap<usize, Rational>) -> bool {
        let Some((&pivot, lead)) = residue.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        let row: SparseVec = residue.into_iter().map(|(j, x)| (j, x * &inv)).collect();
        self.pivots.insert(pivot, self.rows.len());
        self.rows.push(row);
        true
    }
}

/// Basis of `{c : Σ_j c_j · columns[j] = 0}`.
///
/// Each column is tagged with a unit vector placed past `width`, so rows
/// whose data part vanishes after reduction carry the dependency.
pub fn kernel(columns: &[SparseVec], width: usize) -> Vec<SparseVec> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for (j, col) in columns.iter().enumerate() {
        debug_assert!(col.iter().all(|(i, _)| *i < width));
        let mut tagged = col.clone();
        tagged.push((width + j, Rational::one()));
        let residue = ech.reduce(&tagged);
        let lead = *residue.keys().next().expect("tag survives reduction");
        if lead >= width {
            out.push(residue.into_iter().map(|(i, x)| (i - width, x)).collect());
        } else {
            ech.push_residue(residue);
        }
    }
    out
}

/// Inverse of a square matrix given by sparse rows, or `None` if singular.
/// Gauss-Jordan on `[A | I]`.
pub fn inverse(rows: &[SparseVec]) -> Option<Vec<SparseVec>> {
    let n = rows.len();
    let mut work: Vec<BTreeMap<usize, Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut m: BTreeMap<usize, Rational> = r.iter().cloned().collect();
            m.insert(n + i, Rational::one());
            m
        })
        .collect();
    // column index of A -> row position holding that pivot
    let mut pivot_row: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    for col in 0..n {
        let r = (0..n).find(|&r| !used[r] && work[r].get(&col).is_some_and(|x| !x.is_zero()))?;
        used[r] = true;
        pivot_row[col] = Some(r);
        let inv = work[r][&col].recip();
        let pivot: BTreeMap<usize, Rational> =
            work[r].iter().map(|(j, x)| (*j, x * &inv)).collect();
        for (other, row) in work.iter_mut().enumerate() {
            if other == r {
                continue;
            }
            let Some(coef) = row.get(&col).cloned() else { continue };
            for (j, x) in &pivot {
                let e = row.entry(*j).or_insert_with(Rational::zero);
                *e -= &coef * x;
                if e.is_zero() {
                    row.remove(j);
                }
            }
        }
        work[r] = pivot;
    }
    Some(
        (0..n)
            .map(|col| {
                let r = pivot_row[col].expect("every column pivoted");
                work[r]
                    .iter()
                    .filter(|(j, _)| **j >= n)
                    .map(|(j, x)| (j - n, x.clone()))
                    .collect()
            })
            .collect(),
    )
}

/// Sparse matrix–vector product with rows given as sparse vectors.
pub fn apply(rows: &[SparseVec], v: &SparseVec) -> SparseVec {
    let dense: BTreeMap<usize, &Rational> = v.iter().map(|(i, x)| (*i, x)).collect();
    rows.iter()
        .enumerate()
        .filter_map(|(i, row)| {
            let s: Rational = row
                .iter()
                .filter_map(|(j, a)| dense.get(j).map(|x| a * *x))
                .sum();
            (!s.is_zero()).then_some((i, s))
        })
        .collect()
}
