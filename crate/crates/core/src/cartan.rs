//! Symmetrizable Cartan data, the root lattice and braid words.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A symmetrizable generalized Cartan matrix together with its symmetrizers
/// `d_i = (alpha_i, alpha_i)/2`. Nodes are `0..n` internally and printed `1..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CartanDatum {
    #[serde(rename = "cartan")]
    matrix: Vec<Vec<i64>>,
    symmetrizers: Vec<u32>,
}

/// Order of `r_i r_j` in the braid relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BraidOrder {
    Finite(usize),
    Unbounded,
}

/// An element of the root lattice in the basis of simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootVector(pub Vec<i64>);

impl RootVector {
    pub fn zero(rank: usize) -> Self {
        RootVector(vec![0; rank])
    }

    pub fn simple(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        RootVector(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn add(&self, other: &RootVector) -> RootVector {
        RootVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RootVector) -> RootVector {
        RootVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> RootVector {
        RootVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }
}

impl fmt::Display for RootVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}

impl CartanDatum {
    pub fn new(matrix: Vec<Vec<i64>>, symmetrizers: Vec<u32>) -> Result<Self> {
        let datum = CartanDatum { matrix, symmetrizers };
        datum.validate()?;
        Ok(datum)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.matrix.len();
        if n == 0 {
            return Err(Error::InvalidDatum("empty index set".into()));
        }
        if self.symmetrizers.len() != n {
            return Err(Error::InvalidDatum(format!(
                "symmetrizers has length {} but the matrix has {} rows",
                self.symmetrizers.len(),
                n
            )));
        }
        for (i, row) in self.matrix.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDatum(format!("row {} has length {}, expected {}", i + 1, row.len(), n)));
            }
        }
        for i in 0..n {
            if self.symmetrizers[i] == 0 {
                return Err(Error::InvalidDatum(format!("symmetrizer d_{} must be positive", i + 1)));
            }
            if self.matrix[i][i] != 2 {
                return Err(Error::InvalidDatum(format!("diagonal entry c_{0}{0} must equal 2", i + 1)));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (cij, cji) = (self.matrix[i][j], self.matrix[j][i]);
                if cij > 0 {
                    return Err(Error::InvalidDatum(format!("off-diagonal entry c_{}{} must be <= 0", i + 1, j + 1)));
                }
                if (cij == 0) != (cji == 0) {
                    return Err(Error::InvalidDatum(format!(
                        "c_{0}{1} = 0 must hold iff c_{1}{0} = 0",
                        i + 1,
                        j + 1
                    )));
                }
                if self.symmetrizers[i] as i64 * cij != self.symmetrizers[j] as i64 * cji {
                    return Err(Error::InvalidDatum(format!(
                        "symmetrizability d_{0} c_{0}{1} = d_{1} c_{1}{0} fails",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn preset(name: &str) -> Result<Self> {
        let (m, d): (Vec<Vec<i64>>, Vec<u32>) = match name.to_ascii_uppercase().as_str() {
            "A1" => (vec![vec![2]], vec![1]),
            "A2" => (vec![vec![2, -1], vec![-1, 2]], vec![1, 1]),
            "B2" => (vec![vec![2, -1], vec![-2, 2]], vec![2, 1]),
            "G2" => (vec![vec![2, -1], vec![-3, 2]], vec![3, 1]),
            "A3" => (vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]], vec![1, 1, 1]),
            other => return Err(Error::InvalidDatum(format!("unknown preset {:?}", other))),
        };
        CartanDatum::new(m, d)
    }

    pub const PRESETS: [&'static str; 5] = ["A1", "A2", "B2", "G2", "A3"];

    pub fn from_json(text: &str) -> Result<Self> {
        let datum: CartanDatum = serde_json::from_str(text)?;
        datum.validate()?;
        Ok(datum)
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn nodes(&self) -> std::ops::Range<usize> {
        0..self.rank()
    }

    /// `c_ij = <h_i, alpha_j>`.
    pub fn c(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    pub fn d(&self, i: usize) -> u32 {
        self.symmetrizers[i]
    }

    /// `(alpha_i, alpha_j) = d_i c_ij`.
    pub fn simple_form(&self, i: usize, j: usize) -> i64 {
        self.symmetrizers[i] as i64 * self.matrix[i][j]
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(Error::UnknownNode(i + 1))
        }
    }

    pub fn form(&self, a: &RootVector, b: &RootVector) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += a.0[i] * b.0[j] * self.simple_form(i, j);
            }
        }
        s
    }

    /// `N(a) = (a, a)/2`, returned doubled so that it stays integral.
    pub fn n_func_doubled(&self, a: &RootVector) -> i64 {
        self.form(a, a)
    }

    /// `N(a) = (a, a)/2`; integral on the root lattice.
    pub fn n_func(&self, a: &RootVector) -> i64 {
        let f = self.form(a, a);
        debug_assert!(f % 2 == 0);
        f / 2
    }

    /// Simple reflection `s_i(b) = b - <h_i, b> alpha_i`.
    pub fn reflect(&self, i: usize, b: &RootVector) -> RootVector {
        let pairing: i64 = (0..self.rank()).map(|j| self.c(i, j) * b.0[j]).sum();
        let mut out = b.clone();
        out.0[i] -= pairing;
        out
    }

    pub fn m_ij(&self, i: usize, j: usize) -> Result<BraidOrder> {
        if i == j {
            return Err(Error::InvalidArgument("m_ij requires i != j".into()));
        }
        let p = self.c(i, j) * self.c(j, i);
        Ok(match p {
            p if p <= 2 => BraidOrder::Finite((p + 2) as usize),
            3 => BraidOrder::Finite(6),
            _ => BraidOrder::Unbounded,
        })
    }

    /// Stable hex digest of the datum, used to key cache files.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("datum serialises");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// A letter `r_i^{sign}` of a braid word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BraidLetter {
    pub node: usize,
    pub inverse: bool,
}

/// A free word in the braid generators `r_i^{+-1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord(pub Vec<BraidLetter>);

impl BraidWord {
    pub fn positive(nodes: &[usize]) -> Self {
        BraidWord(nodes.iter().map(|&node| BraidLetter { node, inverse: false }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|l| !l.inverse)
    }

    /// Node sequence of a positive word.
    pub fn sequence(&self) -> Result<Vec<usize>> {
        if !self.is_positive() {
            return Err(Error::InvalidArgument("braid word contains inverse letters".into()));
        }
        Ok(self.0.iter().map(|l| l.node).collect())
    }

    /// The anti-automorphism fixing every `r_i`.
    pub fn reverse(&self) -> Self {
        BraidWord(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &BraidWord) -> Self {
        BraidWord(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Parses `1,2,-1` (1-based nodes, negative for inverse letters).
    pub fn parse(text: &str, datum: &CartanDatum) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(BraidWord::default());
        }
        let mut letters = Vec::new();
        for part in text.split(',') {
            let k: i64 = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad braid letter {:?}", part)))?;
            if k == 0 {
                return Err(Error::InvalidArgument("braid letters are 1-based".into()));
            }
            let node = (k.unsigned_abs() - 1) as usize;
            datum.check_node(node)?;
            letters.push(BraidLetter { node, inverse: k < 0 });
        }
        Ok(BraidWord(letters))
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            if l.inverse {
                write!(f, "-")?;
            }
            write!(f, "{}", l.node + 1)?;
        }
        Ok(())
    }
}

/// The two alternating words `i j i ...` and `j i j ...` of length `m_ij`.
pub fn braid_relation_words(datum: &CartanDatum, i: usize, j: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    match datum.m_ij(i, j)? {
        BraidOrder::Unbounded => Err(Error::InvalidArgument(format!(
            "no braid relation between {} and {} (m_ij is unbounded)",
            i + 1,
            j + 1
        ))),
        BraidOrder::Finite(m) => {
            let a = (0..m).map(|k| if k % 2 == 0 { i } else { j }).collect();
            let b = (0..m).map(|k| if k % 2 == 0 { j } else { i }).collect();
            Ok((a, b))
        }
    }
}

/// Decides whether two positive words represent the same element of the braid
/// monoid by exploring braid moves. Words of a fixed length form a finite set.
pub fn braid_equivalent(datum: &CartanDatum, a: &[usize], b: &[usize]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let n = datum.rank();
    let mut moves = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                if let BraidOrder::Finite(_) = datum.m_ij(i, j)? {
                    moves.push(braid_relation_words(datum, i, j)?);
                }
            }
        }
    }
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(a.to_vec());
    queue.push_back(a.to_vec());
    while let Some(w) = queue.pop_front() {
        if w == b {
            return Ok(true);
        }
        for (lhs, rhs) in &moves {
            let m = lhs.len();
            if m > w.len() {
                continue;
            }
            for start in 0..=w.len() - m {
                if w[start..start + m] == lhs[..] {
                    let mut next = w.clone();
                    next[start..start + m].copy_from_slice(rhs);
                    if seen.insert(next.clone()) {
                        queue.push_back(next);
                    }
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in CartanDatum::PRESETS {
            CartanDatum::preset(name).unwrap();
        }
        assert!(CartanDatum::preset("E8").is_err());
    }

    #[test]
    fn validation_names_the_violation() {
        let err = CartanDatum::new(vec![vec![2, -1], vec![-2, 2]], vec![1, 1]).unwrap_err();
        assert!(err.to_string().contains("symmetrizability"));
        let err = CartanDatum::new(vec![vec![2, 0], vec![-1, 2]], vec![1, 1]).unwrap_err();
        assert!(err.to_string().contains("= 0 must hold iff"));
        let err = CartanDatum::new(vec![vec![1, 0], vec![0, 2]], vec![1, 1]).unwrap_err();
        assert!(err.to_string().contains("diagonal"));
    }

    #[test]
    fn json_config() {
        let d = CartanDatum::from_json(r#"{"cartan": [[2,-1],[-1,2]], "symmetrizers": [1,1]}"#).unwrap();
        assert_eq!(d, CartanDatum::preset("A2").unwrap());
        assert!(CartanDatum::from_json(r#"{"cartan": [[2,1],[1,2]], "symmetrizers": [1,1]}"#).is_err());
    }

    #[test]
    fn forms() {
        let a2 = CartanDatum::preset("A2").unwrap();
        let a1 = RootVector::simple(2, 0);
        let a2v = RootVector::simple(2, 1);
        assert_eq!(a2.form(&a1, &a1), 2);
        assert_eq!(a2.form(&a1, &a2v), -1);
        assert_eq!(a2.form(&RootVector::zero(2), &a2v), 0);
        assert_eq!(a2.n_func(&a1), 1);
        assert_eq!(a2.n_func(&a1.add(&a2v)), 1);
        let b2 = CartanDatum::preset("B2").unwrap();
        assert_eq!(b2.n_func(&RootVector::simple(2, 1)), 1);
        assert_eq!(b2.n_func(&RootVector::simple(2, 0)), 2);
    }

    #[test]
    fn form_is_weyl_invariant() {
        for name in CartanDatum::PRESETS {
            let d = CartanDatum::preset(name).unwrap();
            let n = d.rank();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(d.form(&RootVector::simple(n, i), &RootVector::simple(n, j)), d.simple_form(i, j));
                    assert_eq!(d.simple_form(i, j), d.simple_form(j, i));
                }
            }
            let vs = [vec![1, 0, 0], vec![1, 1, 0], vec![2, -1, 3], vec![0, 3, 1]];
            for v in vs {
                let b = RootVector(v[..n].to_vec());
                for i in 0..n {
                    assert_eq!(d.n_func(&d.reflect(i, &b)), d.n_func(&b));
                }
            }
        }
    }

    #[test]
    fn braid_orders() {
        let a2 = CartanDatum::preset("A2").unwrap();
        assert_eq!(a2.m_ij(0, 1).unwrap(), BraidOrder::Finite(3));
        assert_eq!(CartanDatum::preset("B2").unwrap().m_ij(0, 1).unwrap(), BraidOrder::Finite(4));
        assert_eq!(CartanDatum::preset("G2").unwrap().m_ij(1, 0).unwrap(), BraidOrder::Finite(6));
        assert!(a2.m_ij(0, 0).is_err());
        let affine = CartanDatum::new(vec![vec![2, -2], vec![-2, 2]], vec![1, 1]).unwrap();
        assert_eq!(affine.m_ij(0, 1).unwrap(), BraidOrder::Unbounded);
        assert!(braid_relation_words(&affine, 0, 1).is_err());
    }

    #[test]
    fn reverse_words() {
        let w = BraidWord::positive(&[0, 1, 0]);
        assert_eq!(w.reverse(), w);
        assert_eq!(BraidWord::positive(&[0, 1]).reverse(), BraidWord::positive(&[1, 0]));
        assert!(BraidWord::default().reverse().is_empty());
        let a = BraidWord::positive(&[0, 1, 1]);
        let b = BraidWord::parse("2,-1", &CartanDatum::preset("A2").unwrap()).unwrap();
        assert_eq!(a.concat(&b).reverse(), b.reverse().concat(&a.reverse()));
        assert_eq!(a.reverse().reverse(), a);
    }

    #[test]
    fn braid_monoid_equivalence() {
        let a2 = CartanDatum::preset("A2").unwrap();
        assert!(braid_equivalent(&a2, &[0, 1, 0], &[1, 0, 1]).unwrap());
        assert!(!braid_equivalent(&a2, &[0, 1], &[1, 0]).unwrap());
        let a3 = CartanDatum::preset("A3").unwrap();
        assert!(braid_equivalent(&a3, &[0, 2, 1], &[2, 0, 1]).unwrap());
    }
}
