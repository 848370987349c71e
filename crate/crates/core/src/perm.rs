//! Permutations of `{0..n-1}` stored as image arrays, plus explicit-set
//! group closure. JSON uses one-indexed image arrays.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Ordering is lexicographic on the image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(Error::input(format!(
                    "image array {images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    pub fn from_one_indexed(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::input("one-indexed image array contains 0"));
        }
        Self::from_images(images.iter().map(|x| x - 1).collect())
    }

    pub fn to_one_indexed(&self) -> Vec<usize> {
        self.0.iter().map(|x| x + 1).collect()
    }

    /// Transposition of `i` and `j` on `n` points.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, j);
        Perm(v)
    }

    /// The cycle `c[0] → c[1] → … → c[0]` on `n` points.
    pub fn cycle(n: usize, c: &[usize]) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        for (i, &x) in c.iter().enumerate() {
            v[x] = c[(i + 1) % c.len()];
        }
        Perm(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// All permutations of `n` points in lexicographic order.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Perm(cur.clone()));
            if !next_permutation(&mut cur) {
                return out;
            }
        }
    }
}

/// Advances `v` to its lexicographic successor; `false` at the last one.
pub(crate) fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).expect("successor exists");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

pub(crate) fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.to_one_indexed())
    }
}

impl Serialize for Perm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_indexed().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Perm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Perm::from_one_indexed(&v).map_err(D::Error::custom)
    }
}

/// The group generated by `gens` inside `S_n`, as a sorted element set.
/// Finite groups need only products, so inverses come for free.
pub fn closure(n: usize, gens: &[Perm]) -> Result<BTreeSet<Perm>> {
    if let Some(g) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::input(format!(
            "generator {g:?} does not act on {n} points"
        )));
    }
    let mut group = BTreeSet::new();
    let mut queue = VecDeque::new();
    group.insert(Perm::identity(n));
    queue.push_back(Perm::identity(n));
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.compose(&x);
            if group.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    Ok(group)
}

/// Orbits of a permutation group on `{0..n-1}`, each sorted, ordered by
/// least element.
pub fn orbits<'a>(n: usize, gens: impl IntoIterator<Item = &'a Perm>) -> Vec<Vec<usize>> {
    let mut uf = crate::exact::UnionFind::new(n);
    for g in gens {
        for x in 0..n {
            uf.union(x, g.apply(x));
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        by_root.entry(uf.find(x)).or_default().push(x);
    }
    let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
    out.sort();
    out
}
