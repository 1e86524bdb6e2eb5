//! Cuspidal elements, PBW bases of the subalgebras attached to positive braid
//! words, their c-invariant corrections and the twist maps.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::RwLock;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Algebra, Element, Monomial};
use crate::cartan::{BraidWord, RootVector};
use crate::error::{Error, Result};
use crate::linalg::{self, SparseVec};
use crate::scalar::Scalar;

/// Exponent vector of a PBW monomial.
pub type PbwIndex = Vec<u32>;

/// Coordinates in a PBW basis.
pub type PbwCoords = BTreeMap<PbwIndex, Scalar>;

/// The cuspidal elements `P_k = T_{i_1} ... T_{i_{k-1}} phi_0(<i_k>)` of a sequence.
pub struct CuspidalSet<'a> {
    alg: &'a Algebra,
    seq: Vec<usize>,
    cusp: Vec<Element>,
    weights: Vec<RootVector>,
    pbw_cache: RwLock<HashMap<PbwIndex, Element>>,
}

/// Result of expanding an element in a PBW basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwExpansion {
    pub coords: PbwCoords,
    pub residual: Element,
}

/// A c-invariant element with its PBW coordinates.
#[derive(Clone, Debug)]
pub struct KlElement {
    pub u: PbwIndex,
    pub element: Element,
    /// `G(u) = P(u) + sum t_{u,u'} P(u')`, including `t_{u,u} = 1`.
    pub t: PbwCoords,
    /// `P(u) = G(u) + sum g_{u,u'} G(u')`, including `g_{u,u} = 1`.
    pub g: PbwCoords,
}

/// Bi-lexicographic strict order: the first and the last differing entries are
/// both smaller in `a`.
pub fn bilex_less(a: &[u32], b: &[u32]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!("length mismatch {} vs {}", a.len(), b.len())));
    }
    let first = a.iter().zip(b).find(|(x, y)| x != y);
    let last = a.iter().zip(b).rev().find(|(x, y)| x != y);
    Ok(matches!((first, last), (Some((x1, y1)), Some((x2, y2))) if x1 < y1 && x2 < y2))
}

/// `prod_k prod_{s=1}^{u_k} (1 - q_{i_k}^{2s})`.
pub fn orthogonality_norm(alg: &Algebra, seq: &[usize], u: &[u32]) -> Scalar {
    let mut out = Scalar::one();
    for (k, &n) in u.iter().enumerate() {
        let d = alg.datum().d(seq[k]) as i32;
        for s in 1..=n as i32 {
            out *= &(&Scalar::one() - &Scalar::q_pow(2 * s * d));
        }
    }
    out
}

impl<'a> CuspidalSet<'a> {
    pub fn new(alg: &'a Algebra, seq: &[usize]) -> Result<Self> {
        for &i in seq {
            alg.datum().check_node(i)?;
        }
        let mut cusp = Vec::with_capacity(seq.len());
        let mut weights = Vec::with_capacity(seq.len());
        for k in 0..seq.len() {
            let prefix = BraidWord::positive(&seq[..k]);
            let p = alg.apply_braid(&prefix, &alg.phi_gen(0, seq[k])?)?;
            weights.push(alg.weight(&p)?);
            cusp.push(p);
        }
        Ok(CuspidalSet { alg, seq: seq.to_vec(), cusp, weights, pbw_cache: RwLock::new(HashMap::new()) })
    }

    pub fn from_word(alg: &'a Algebra, word: &BraidWord) -> Result<Self> {
        CuspidalSet::new(alg, &word.sequence()?)
    }

    pub fn algebra(&self) -> &'a Algebra {
        self.alg
    }

    pub fn sequence(&self) -> &[usize] {
        &self.seq
    }

    pub fn word(&self) -> BraidWord {
        BraidWord::positive(&self.seq)
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.seq.len() {
            return Err(Error::InvalidArgument(format!("cuspidal index {} outside [1,{}]", k, self.seq.len())));
        }
        Ok(())
    }

    /// `P_k`, with `k` 1-based.
    pub fn cuspidal(&self, k: usize) -> Result<&Element> {
        self.check_k(k)?;
        Ok(&self.cusp[k - 1])
    }

    /// `P_k^{(n)} = q_{i_k}^{n(n-1)/2} P_k^n`.
    pub fn cuspidal_power(&self, k: usize, n: u32) -> Result<Element> {
        self.check_k(k)?;
        let d = self.alg.datum().d(self.seq[k - 1]) as i32;
        let p = self.alg.pow(&self.cusp[k - 1], n)?;
        Ok(p.scale(&Scalar::v_pow(d * (n as i32) * (n as i32 - 1))))
    }

    fn check_index(&self, u: &[u32]) -> Result<()> {
        if u.len() != self.seq.len() {
            return Err(Error::InvalidArgument(format!(
                "PBW index has length {} but the sequence has length {}",
                u.len(),
                self.seq.len()
            )));
        }
        Ok(())
    }

    /// `P(u) = P_r^{(u_r)} ... P_1^{(u_1)}`.
    pub fn pbw_element(&self, u: &[u32]) -> Result<Element> {
        self.check_index(u)?;
        if let Some(e) = self.pbw_cache.read().expect("pbw cache lock").get(u) {
            return Ok(e.clone());
        }
        let mut acc = Element::one();
        for k in (1..=u.len()).rev() {
            if u[k - 1] > 0 {
                acc = self.alg.multiply(&acc, &self.cuspidal_power(k, u[k - 1])?)?;
            }
        }
        let mut cache = self.pbw_cache.write().expect("pbw cache lock");
        Ok(cache.entry(u.to_vec()).or_insert(acc).clone())
    }

    pub fn norm(&self, u: &[u32]) -> Scalar {
        orthogonality_norm(self.alg, &self.seq, u)
    }

    pub fn weight_of(&self, u: &[u32]) -> RootVector {
        let mut w = RootVector::zero(self.alg.rank());
        for (k, &n) in u.iter().enumerate() {
            w = w.add(&self.weights[k].scale(n as i64));
        }
        w
    }

    /// All `u` of weight `beta` with `sum_k u_k |ht wt(P_k)| <= max_len`, in graded-lex order.
    pub fn indices_of_weight(&self, beta: &RootVector, max_len: usize) -> Vec<PbwIndex> {
        let costs: Vec<usize> = self.weights.iter().map(|w| w.height().unsigned_abs().max(1) as usize).collect();
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.seq.len()];
        self.enumerate(0, max_len, &costs, &mut cur, &mut |u| {
            if self.weight_of(u) == *beta {
                out.push(u.to_vec());
            }
        });
        out.sort_by(|a, b| (a.iter().sum::<u32>(), a).cmp(&(b.iter().sum::<u32>(), b)));
        out
    }

    fn enumerate(&self, k: usize, budget: usize, costs: &[usize], cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if k == cur.len() {
            f(cur);
            return;
        }
        let mut n = 0;
        loop {
            cur[k] = n as u32;
            self.enumerate(k + 1, budget - n * costs[k], costs, cur, f);
            if (n + 1) * costs[k] > budget {
                break;
            }
            n += 1;
        }
        cur[k] = 0;
    }

    /// All `u` with `sum u <= total`, graded-lex.
    pub fn indices_up_to(&self, total: u32) -> Vec<PbwIndex> {
        let r = self.seq.len();
        let mut out = Vec::new();
        fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<PbwIndex>) {
            if k == cur.len() {
                out.push(cur.clone());
                return;
            }
            for n in 0..=left {
                cur[k] = n;
                rec(k + 1, left - n, cur, out);
            }
            cur[k] = 0;
        }
        rec(0, total, &mut vec![0; r], &mut out);
        out.sort_by(|a, b| (a.iter().sum::<u32>(), a).cmp(&(b.iter().sum::<u32>(), b)));
        out
    }

    /// Coordinates `((x, P(u))) / ((P(u), P(u)))` together with the residual
    /// `x - sum coords(u) P(u)`, which vanishes iff `x` lies in the PBW span.
    pub fn pbw_expand(&self, x: &Element) -> Result<PbwExpansion> {
        let mut coords = PbwCoords::new();
        let mut approx = Element::zero();
        for (beta, comp) in self.alg.homogeneous_components(x) {
            if !comp.in_nonneg() {
                continue;
            }
            for u in self.indices_of_weight(&beta, comp.max_length()) {
                let p = self.pbw_element(&u)?;
                let c = self.alg.pair(&comp, &p)?;
                if c.is_zero() {
                    continue;
                }
                let c = c.checked_div(&self.norm(&u))?;
                approx = approx.add(&p.scale(&c));
                coords.insert(u, c);
            }
        }
        Ok(PbwExpansion { coords, residual: x.sub(&approx) })
    }

    /// `sum coords(u) P(u)`.
    pub fn from_coords(&self, coords: &PbwCoords) -> Result<Element> {
        let mut out = Element::zero();
        for (u, c) in coords {
            out = out.add(&self.pbw_element(u)?.scale(c));
        }
        Ok(out)
    }

    /// PBW expansion of `[P_k, P_t]_q` for `1 <= k < t <= r`.
    pub fn ls_commutator(&self, k: usize, t: usize) -> Result<PbwExpansion> {
        if !(k < t) {
            return Err(Error::InvalidArgument(format!("need k < t, got k={} t={}", k, t)));
        }
        let c = self.alg.q_commutator(self.cuspidal(k)?, self.cuspidal(t)?)?;
        self.pbw_expand(&c)
    }

    /// Whether `T_b^{-1} x` lies in the negative half.
    pub fn membership_tb_neg(&self, x: &Element) -> Result<bool> {
        Ok(self.alg.apply_braid_inverse(&self.word(), x)?.in_neg())
    }

    /// PBW coordinates of `c(P(w))`; must be exact.
    fn c_expansion(&self, w: &[u32]) -> Result<PbwCoords> {
        let p = self.pbw_element(w)?;
        let e = self.pbw_expand(&self.alg.c_map(&p)?)?;
        if !e.residual.is_zero() {
            return Err(Error::Consistency(format!("c(P({:?})) left the PBW span", w)));
        }
        Ok(e.coords)
    }

    /// The c-invariant elements `G(u)` for `u` and every index below it that
    /// appears in the c-expansions.
    pub fn kl_family(&self, u: &[u32]) -> Result<BTreeMap<PbwIndex, KlElement>> {
        self.check_index(u)?;
        let mut expansions: BTreeMap<PbwIndex, PbwCoords> = BTreeMap::new();
        let mut todo = vec![u.to_vec()];
        while let Some(w) = todo.pop() {
            if expansions.contains_key(&w) {
                continue;
            }
            let e = self.c_expansion(&w)?;
            for (v, c) in &e {
                if *v == w {
                    if !c.is_one() {
                        return Err(Error::Consistency(format!("c(P({:?})) has leading coefficient {}", w, c)));
                    }
                } else if !bilex_less(v, &w)? {
                    return Err(Error::Consistency(format!("c(P({:?})) involves P({:?}) outside the order", w, v)));
                }
                if !expansions.contains_key(v) {
                    todo.push(v.clone());
                }
            }
            expansions.insert(w, e);
        }
        // Left-lex order refines the bi-lexicographic order.
        let order: Vec<PbwIndex> = expansions.keys().cloned().collect();
        let mut t_rows: BTreeMap<PbwIndex, PbwCoords> = BTreeMap::new();
        for top in &order {
            let mut t: PbwCoords = PbwCoords::new();
            t.insert(top.clone(), Scalar::one());
            for v in order.iter().rev().filter(|v| *v < top) {
                let mut r = Scalar::zero();
                for (w, tw) in &t {
                    if let Some(f) = expansions[w].get(v) {
                        r += &(&tw.bar() * f);
                    }
                }
                if r.is_zero() {
                    continue;
                }
                if !r.is_laurent() || r.bar() != -&r {
                    return Err(Error::Consistency(format!("non-antisymmetric correction {} at {:?}", r, v)));
                }
                let tv = Scalar::from_poly(r.numerator().positive_part());
                if !tv.is_in_qzq() {
                    return Err(Error::Consistency(format!("coefficient {} at {:?} is not in qZ[q]", tv, v)));
                }
                if !tv.is_zero() {
                    if !bilex_less(v, top)? {
                        return Err(Error::Consistency(format!("G({:?}) involves P({:?}) outside the order", top, v)));
                    }
                    t.insert(v.clone(), tv);
                }
            }
            t_rows.insert(top.clone(), t);
        }
        let mut out = BTreeMap::new();
        for top in &order {
            let t = t_rows[top].clone();
            // g = t^{-1}: g_top = e_top - sum_{v != top} t_{top,v} g_v.
            let mut g = PbwCoords::new();
            g.insert(top.clone(), Scalar::one());
            for (v, tv) in t.iter().filter(|(v, _)| *v != top) {
                let gv: &PbwCoords = &out.get(v).map(|k: &KlElement| k.g.clone()).expect("lower rows first");
                for (w, c) in gv {
                    let slot = g.entry(w.clone()).or_insert_with(Scalar::zero);
                    *slot -= &(tv * c);
                }
            }
            g.retain(|_, c| !c.is_zero());
            let element = self.from_coords(&t)?;
            out.insert(top.clone(), KlElement { u: top.clone(), element, t, g });
        }
        Ok(out)
    }

    /// The c-invariant element `G(u)`.
    pub fn kl_basis(&self, u: &[u32]) -> Result<KlElement> {
        let mut family = self.kl_family(u)?;
        Ok(family.remove(u).expect("requested index present"))
    }
}

impl Algebra {
    /// `Theta_b = T_b o star o dbar`.
    pub fn twist(&self, word: &BraidWord, x: &Element) -> Result<Element> {
        if !word.is_positive() {
            return Err(Error::InvalidArgument("the twist map takes positive braid words".into()));
        }
        self.apply_braid(word, &self.star(&self.dbar(x))?)
    }
}

/// Outcome for one fine degree of the tensor decomposition check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorDegreeReport {
    /// Multidegree at each level `0..=L`.
    pub fine_degree: Vec<Vec<u32>>,
    pub dimension: usize,
    pub products: usize,
    pub product_rank: usize,
    pub reconstructed: usize,
    pub pass: bool,
}

/// Checks the decomposition `A(*, b) (x) A(b) -> A_{>=0}` on the fine degrees of
/// window `[0, max_level]` and height at most `max_height`.
///
/// Every basis monomial `x` is written as `sum T_b(M) P(u)` by splitting
/// `T_b^{-1}(x)` into nonnegative and negative level parts; the pieces must be
/// PBW-expandable and the products must reproduce `x`. The products used,
/// indexed by pairs `(M, u)`, must be linearly independent.
pub fn tensor_check(set: &CuspidalSet, max_level: i32, max_height: u32) -> Result<Vec<TensorDegreeReport>> {
    let alg = set.algebra();
    let n = alg.rank();
    let word = set.word();
    let degrees = fine_degrees(n, max_level, max_height);
    degrees.into_par_iter().map(|fine| -> Result<TensorDegreeReport> {
        let levels: Vec<(i32, Vec<u32>)> =
            fine.iter().enumerate().rev().map(|(lvl, d)| (lvl as i32, d.clone())).filter(|(_, d)| d.iter().any(|&x| x > 0)).collect();
        let basis = alg.canonical_monomials(&levels)?;
        let mut pairs: BTreeSet<(Monomial, PbwIndex)> = BTreeSet::new();
        let mut reconstructed = 0;
        for m in &basis {
            let x = Element::monomial(m.clone(), Scalar::one());
            let pulled = alg.apply_braid_inverse(&word, &x)?;
            let mut split: BTreeMap<Monomial, Element> = BTreeMap::new();
            for (mono, c) in pulled.terms() {
                let cut = mono.letters().iter().position(|g| g.level < 0).unwrap_or(mono.len());
                let head = Monomial(mono.letters()[..cut].to_vec());
                let tail = Monomial(mono.letters()[cut..].to_vec());
                split.entry(head).or_default().add_term(tail, c);
            }
            let mut rebuilt = Element::zero();
            let mut ok = true;
            for (head, tail) in &split {
                let image = alg.apply_braid(&word, tail)?;
                let e = set.pbw_expand(&image)?;
                if !e.residual.is_zero() {
                    ok = false;
                    break;
                }
                let th = alg.apply_braid(&word, &Element::monomial(head.clone(), Scalar::one()))?;
                for (u, c) in &e.coords {
                    pairs.insert((head.clone(), u.clone()));
                    rebuilt = rebuilt.add(&alg.multiply(&th, &set.pbw_element(u)?)?.scale(c));
                }
            }
            if ok && rebuilt == x {
                reconstructed += 1;
            }
        }
        let mut vectors = Vec::with_capacity(pairs.len());
        for (head, u) in &pairs {
            let th = alg.apply_braid(&word, &Element::monomial(head.clone(), Scalar::one()))?;
            let prod = alg.multiply(&th, &set.pbw_element(u)?)?;
            let v: SparseVec<Monomial> = prod.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
            vectors.push(v);
        }
        let product_rank = linalg::rank(vectors);
        let dimension = basis.len();
        let pass = reconstructed == dimension && product_rank == pairs.len();
        Ok(TensorDegreeReport { fine_degree: fine, dimension, products: pairs.len(), product_rank, reconstructed, pass })
    })
    .collect()
}

/// Nonzero tuples of multidegrees at levels `0..=max_level` of total height at
/// most `max_height`.
pub fn fine_degrees(rank: usize, max_level: i32, max_height: u32) -> Vec<Vec<Vec<u32>>> {
    let slots = rank * (max_level as usize + 1);
    let mut out = Vec::new();
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur[k] = x;
            rec(k + 1, left - x, cur, out);
        }
        cur[k] = 0;
    }
    let mut flat = Vec::new();
    rec(0, max_height, &mut vec![0; slots], &mut flat);
    flat.sort_by(|a, b| (a.iter().sum::<u32>(), a).cmp(&(b.iter().sum::<u32>(), b)));
    for f in flat {
        if f.iter().all(|&x| x == 0) {
            continue;
        }
        out.push(f.chunks(rank).map(|c| c.to_vec()).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;

    fn alg(name: &str) -> Algebra {
        Algebra::new(CartanDatum::preset(name).unwrap())
    }

    #[test]
    fn bilex_examples() {
        assert!(bilex_less(&[0, 1, 0], &[1, 1, 0]).unwrap());
        assert!(!bilex_less(&[1, 1, 0], &[1, 1, 0]).unwrap());
        assert!(!bilex_less(&[1, 0, 0], &[0, 0, 1]).unwrap());
        assert!(!bilex_less(&[0, 0, 1], &[1, 0, 0]).unwrap());
        assert!(bilex_less(&[0], &[1, 0]).is_err());
    }

    #[test]
    fn cuspidals_a2() {
        let a = alg("A2");
        let set = CuspidalSet::new(&a, &[0, 1, 0]).unwrap();
        assert_eq!(set.cuspidal(1).unwrap(), &a.gen(0, 0).unwrap().scale(&Scalar::v_pow(1)));
        let k = Scalar::q_pow(1).checked_div(&a.zeta(0)).unwrap();
        let p2 = a
            .normal_form(&[
                (vec![crate::Gen::new(0, 0), crate::Gen::new(1, 0)], k.clone()),
                (vec![crate::Gen::new(1, 0), crate::Gen::new(0, 0)], -&k.mul_v_pow(2)),
            ])
            .unwrap();
        assert_eq!(set.cuspidal(2).unwrap(), &p2);
        assert_eq!(set.cuspidal(3).unwrap(), &a.gen(1, 0).unwrap().scale(&Scalar::v_pow(1)));
        assert!(set.cuspidal(0).is_err() && set.cuspidal(4).is_err());
        assert_eq!(set.cuspidal_power(2, 0).unwrap(), Element::one());
    }

    #[test]
    fn pbw_elements_and_expansion() {
        let a = alg("A2");
        let set = CuspidalSet::new(&a, &[0, 1, 0]).unwrap();
        assert_eq!(set.pbw_element(&[0, 0, 0]).unwrap(), Element::one());
        assert_eq!(set.pbw_element(&[1, 0, 0]).unwrap(), a.gen(0, 0).unwrap().scale(&Scalar::v_pow(1)));
        let e = set.pbw_expand(&a.gen(1, 0).unwrap()).unwrap();
        assert!(e.residual.is_zero());
        assert_eq!(e.coords, PbwCoords::from([(vec![0, 0, 1], Scalar::v_pow(-1))]));
        let p = set.pbw_element(&[1, 1, 0]).unwrap();
        let e = set.pbw_expand(&p).unwrap();
        assert_eq!(e.coords, PbwCoords::from([(vec![1, 1, 0], Scalar::one())]));
        let neg = a.gen(0, -1).unwrap();
        let e = set.pbw_expand(&neg).unwrap();
        assert!(e.coords.is_empty());
        assert_eq!(e.residual, neg);
    }

    #[test]
    fn membership_examples() {
        let a = alg("A1");
        let set = CuspidalSet::new(&a, &[0]).unwrap();
        assert!(set.membership_tb_neg(&a.gen(0, 0).unwrap()).unwrap());
        assert!(!set.membership_tb_neg(&a.gen(0, 1).unwrap()).unwrap());
    }

    #[test]
    fn kl_rank_one_is_pbw() {
        let a = alg("A1");
        let set = CuspidalSet::new(&a, &[0]).unwrap();
        for n in 0..4 {
            let g = set.kl_basis(&[n]).unwrap();
            assert_eq!(g.element, set.pbw_element(&[n]).unwrap());
            assert_eq!(g.t.len(), 1);
        }
    }

    #[test]
    fn twist_on_generators() {
        let a = alg("B2");
        for i in 0..2 {
            for m in -1..=1 {
                let w = BraidWord::positive(&[i]);
                assert_eq!(a.twist(&w, &a.gen(i, m).unwrap()).unwrap(), a.gen(i, -m).unwrap());
            }
        }
    }

    #[test]
    fn tensor_check_small() {
        let a = alg("A2");
        let empty = CuspidalSet::new(&a, &[]).unwrap();
        assert!(tensor_check(&empty, 1, 2).unwrap().iter().all(|r| r.pass));
        let set = CuspidalSet::new(&a, &[0]).unwrap();
        let reports = tensor_check(&set, 1, 2).unwrap();
        assert!(reports.iter().all(|r| r.pass), "{:?}", reports);
    }
}
