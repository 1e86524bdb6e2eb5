//! Sparse exact linear algebra over the coefficient field.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

pub type SparseVec<K> = BTreeMap<K, Scalar>;

/// `acc += c * v`, dropping cancelled entries.
pub fn axpy<K: Ord + Clone>(acc: &mut SparseVec<K>, c: &Scalar, v: &SparseVec<K>) {
    for (k, x) in v {
        let term = c * x;
        match acc.get_mut(k) {
            Some(slot) => {
                *slot += &term;
                if slot.is_zero() {
                    acc.remove(k);
                }
            }
            None => {
                if !term.is_zero() {
                    acc.insert(k.clone(), term);
                }
            }
        }
    }
}

/// Row echelon basis of a subspace; each row is keyed by its pivot, the greatest
/// key of its support, and is normalised to have pivot coefficient 1.
#[derive(Clone, Debug)]
pub struct EchelonBasis<K: Ord + Clone> {
    rows: BTreeMap<K, SparseVec<K>>,
}

impl<K: Ord + Clone> Default for EchelonBasis<K> {
    fn default() -> Self {
        EchelonBasis { rows: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> EchelonBasis<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, k: &K) -> bool {
        self.rows.contains_key(k)
    }

    pub fn pivots(&self) -> impl Iterator<Item = &K> {
        self.rows.keys()
    }

    pub fn row(&self, pivot: &K) -> Option<&SparseVec<K>> {
        self.rows.get(pivot)
    }

    /// Eliminates every pivot from `v`, returning the remainder.
    pub fn reduce(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        let mut bound: Option<K> = None;
        loop {
            let next = {
                let mut iter: Box<dyn Iterator<Item = (&K, &Scalar)>> = match &bound {
                    Some(b) => Box::new(v.range(..b.clone()).rev()),
                    None => Box::new(v.iter().rev()),
                };
                iter.find(|(k, _)| self.rows.contains_key(*k)).map(|(k, c)| (k.clone(), c.clone()))
            };
            let Some((k, c)) = next else { break };
            axpy(&mut v, &-&c, &self.rows[&k]);
            debug_assert!(!v.contains_key(&k));
            bound = Some(k);
        }
        v
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec<K>) -> bool {
        let mut r = self.reduce_leading(v);
        let Some((pivot, lead)) = r.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead.inv().expect("nonzero leading coefficient");
        for c in r.values_mut() {
            *c *= &inv;
        }
        self.rows.insert(pivot, r);
        true
    }

    /// Reduces only until the leading key is not a pivot.
    fn reduce_leading(&self, mut v: SparseVec<K>) -> SparseVec<K> {
        while let Some((k, c)) = v.iter().next_back().map(|(k, c)| (k.clone(), c.clone())) {
            match self.rows.get(&k) {
                Some(row) => axpy(&mut v, &-&c, row),
                None => break,
            }
        }
        v
    }

    /// Brings the basis to reduced row echelon form: no row mentions another
    /// row's pivot.
    pub fn make_reduced(&mut self) {
        let keys: Vec<K> = self.rows.keys().cloned().collect();
        let mut done: EchelonBasis<K> = EchelonBasis::new();
        for k in keys {
            let row = self.rows.remove(&k).expect("row present");
            let mut tail = row.clone();
            let lead = tail.remove(&k).expect("pivot entry");
            let mut reduced = done.reduce(tail);
            reduced.insert(k.clone(), lead);
            done.rows.insert(k, reduced);
        }
        *self = done;
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone>(vectors: impl IntoIterator<Item = SparseVec<K>>) -> usize {
    let mut basis = EchelonBasis::new();
    for v in vectors {
        basis.insert(v);
    }
    basis.rank()
}

/// Determinant of a dense square matrix by Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<Scalar>>) -> Scalar {
    let n = m.len();
    let mut det = Scalar::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Scalar::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det *= &pivot;
        let inv = pivot.inv().expect("nonzero pivot");
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] * &inv;
            let (top, bottom) = m.split_at_mut(r);
            for (x, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= &(&factor * p);
            }
        }
    }
    det
}
