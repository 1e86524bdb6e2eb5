//! Elements of the bosonic extension and the normal-form engine.
//!
//! A normal monomial has weakly decreasing levels from left to right, and each
//! maximal constant-level block is a canonical word for the q-Serre relations:
//! one that is not the pivot of a row in the echelon basis of the Serre ideal in
//! its multidegree. Pivots are lex-greatest in the node order.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanDatum, RootVector};
use crate::error::{Error, Result};
use crate::linalg::{EchelonBasis, SparseVec};
use crate::scalar::{q_binom, Scalar};

/// The generator `f_{node, level}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gen {
    pub node: u32,
    pub level: i32,
}

impl Gen {
    pub fn new(node: usize, level: i32) -> Self {
        Gen { node: node as u32, level }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f[{},{}]", self.node + 1, self.level)
    }
}

/// A word in the generators. Inside an [`Element`] it is always normal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(pub Vec<Gen>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn weight(&self, rank: usize) -> RootVector {
        let mut w = vec![0; rank];
        for g in &self.0 {
            w[g.node as usize] += if g.level.rem_euclid(2) == 0 { -1 } else { 1 };
        }
        RootVector(w)
    }

    /// Per-level multidegrees, highest level first.
    pub fn fine_degree(&self, rank: usize) -> Vec<(i32, Vec<u32>)> {
        let mut out: Vec<(i32, Vec<u32>)> = Vec::new();
        for g in &self.0 {
            match out.last_mut() {
                Some((lvl, deg)) if *lvl == g.level => deg[g.node as usize] += 1,
                _ => {
                    let mut deg = vec![0; rank];
                    deg[g.node as usize] = 1;
                    out.push((g.level, deg));
                }
            }
        }
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{}", g)?;
        }
        Ok(())
    }
}

/// A finite linear combination of normal monomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn one() -> Self {
        Element::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        Element::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Element { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Coefficient of the empty monomial.
    pub fn constant_term(&self) -> Scalar {
        self.coeff(&Monomial::one())
    }

    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        add_into(&mut self.terms, m, c.clone());
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_into(&mut out.terms, m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            add_into(&mut out.terms, m.clone(), -c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn neg(&self) -> Element {
        Element { terms: self.terms.iter().map(|(m, x)| (m.clone(), -x)).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Element {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            add_into(&mut terms, m.clone(), f(c));
        }
        Element { terms }
    }

    /// Adds `k` to every level; normal forms are preserved.
    pub fn shift_levels(&self, k: i32) -> Element {
        if k == 0 {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial(m.0.iter().map(|g| Gen { node: g.node, level: g.level + k }).collect()), c.clone()))
            .collect();
        Element { terms }
    }

    pub fn max_length(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn min_length(&self) -> usize {
        self.terms.keys().map(|m| m.len()).min().unwrap_or(0)
    }

    /// Splits into weight-homogeneous components.
    pub fn homogeneous_components(&self, rank: usize) -> BTreeMap<RootVector, Element> {
        let mut out: BTreeMap<RootVector, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight(rank)).or_default().terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// The common weight of a homogeneous element; zero has weight 0.
    pub fn weight(&self, rank: usize) -> Result<RootVector> {
        let mut iter = self.terms.keys().map(|m| m.weight(rank));
        let Some(first) = iter.next() else {
            return Ok(RootVector::zero(rank));
        };
        if iter.any(|w| w != first) {
            return Err(Error::MixedWeight);
        }
        Ok(first)
    }

    pub fn level_window(&self) -> Result<(i32, i32)> {
        if self.is_zero() {
            return Err(Error::EmptyElement);
        }
        let levels = self.terms.keys().flat_map(|m| m.0.iter().map(|g| g.level));
        let (mut lo, mut hi) = (None::<i32>, None::<i32>);
        for l in levels {
            lo = Some(lo.map_or(l, |x| x.min(l)));
            hi = Some(hi.map_or(l, |x| x.max(l)));
        }
        // An element supported on the empty monomial only has every window.
        Ok((lo.unwrap_or(0), hi.unwrap_or(0)))
    }

    pub fn in_window(&self, a: i32, b: i32) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|g| a <= g.level && g.level <= b))
    }

    pub fn in_nonneg(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|g| g.level >= 0))
    }

    pub fn in_neg(&self) -> bool {
        self.terms.keys().all(|m| m.0.iter().all(|g| g.level < 0))
    }
}

fn add_into(terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(slot) => {
            *slot += &c;
            if slot.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let term = format_term(m, c);
            if k == 0 {
                write!(f, "{}", term)?;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {}", rest)?;
            } else {
                write!(f, " + {}", term)?;
            }
        }
        Ok(())
    }
}

fn format_term(m: &Monomial, c: &Scalar) -> String {
    let coeff = c.to_q_string();
    let coeff = if c.is_compound() { format!("({})", coeff) } else { coeff };
    if m.is_one() {
        return coeff;
    }
    if c.is_one() {
        m.to_string()
    } else if coeff == "-1" {
        format!("-{}", m)
    } else {
        format!("{}*{}", coeff, m)
    }
}

/// Echelon data of the q-Serre ideal in one multidegree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerreBlock {
    pub degree: Vec<u32>,
    pub canonical: BTreeSet<Vec<u32>>,
    /// Each pivot word written in canonical words.
    pub reductions: BTreeMap<Vec<u32>, Vec<(Vec<u32>, Scalar)>>,
}

/// All words with the given letter multiplicities, in lexicographic order.
pub fn words_of_degree(degree: &[u32]) -> Vec<Vec<u32>> {
    fn rec(remaining: &mut Vec<u32>, current: &mut Vec<u32>, len: usize, out: &mut Vec<Vec<u32>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        for i in 0..remaining.len() {
            if remaining[i] > 0 {
                remaining[i] -= 1;
                current.push(i as u32);
                rec(remaining, current, len, out);
                current.pop();
                remaining[i] += 1;
            }
        }
    }
    let len = degree.iter().sum::<u32>() as usize;
    let mut out = Vec::new();
    rec(&mut degree.to_vec(), &mut Vec::with_capacity(len), len, &mut out);
    out
}

/// The q-Serre relation for `i != j` as a combination of words.
pub fn serre_relation(datum: &CartanDatum, i: usize, j: usize) -> Vec<(Vec<u32>, Scalar)> {
    let b = (1 - datum.c(i, j)) as usize;
    let d = datum.d(i);
    (0..=b)
        .map(|k| {
            let mut w = vec![i as u32; k];
            w.push(j as u32);
            w.extend(std::iter::repeat_n(i as u32, b - k));
            let mut c = q_binom(b as i64, k as i64, d).expect("valid binomial");
            if k % 2 == 1 {
                c = -c;
            }
            (w, c)
        })
        .collect()
}

impl SerreBlock {
    pub fn compute(datum: &CartanDatum, degree: &[u32]) -> SerreBlock {
        let n = datum.rank();
        let mut basis: EchelonBasis<Vec<u32>> = EchelonBasis::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let b = (1 - datum.c(i, j)) as u32;
                if degree[i] < b || degree[j] < 1 {
                    continue;
                }
                let mut rest = degree.to_vec();
                rest[i] -= b;
                rest[j] -= 1;
                let relation = serre_relation(datum, i, j);
                for w in words_of_degree(&rest) {
                    for split in 0..=w.len() {
                        let row: SparseVec<Vec<u32>> = relation
                            .iter()
                            .map(|(r, c)| {
                                let mut word = w[..split].to_vec();
                                word.extend_from_slice(r);
                                word.extend_from_slice(&w[split..]);
                                (word, c.clone())
                            })
                            .collect();
                        basis.insert(row);
                    }
                }
            }
        }
        basis.make_reduced();
        let mut canonical = BTreeSet::new();
        for w in words_of_degree(degree) {
            if !basis.is_pivot(&w) {
                canonical.insert(w);
            }
        }
        let mut reductions = BTreeMap::new();
        for p in basis.pivots() {
            let row = basis.row(p).expect("pivot row");
            let expansion: Vec<(Vec<u32>, Scalar)> =
                row.iter().filter(|(w, _)| *w != p).map(|(w, c)| (w.clone(), -c)).collect();
            reductions.insert(p.clone(), expansion);
        }
        SerreBlock { degree: degree.to_vec(), canonical, reductions }
    }

    pub fn is_canonical(&self, word: &[u32]) -> bool {
        self.canonical.contains(word)
    }
}

/// Kinds of generator images cached by the symmetry module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum ImageKind {
    T,
    TStar,
}

/// The algebra attached to a Cartan datum, with its shared Serre cache.
pub struct Algebra {
    datum: CartanDatum,
    max_height: usize,
    serre: RwLock<HashMap<Vec<u32>, Arc<SerreBlock>>>,
    images: RwLock<HashMap<(ImageKind, usize, usize), Arc<Element>>>,
}

pub const DEFAULT_MAX_HEIGHT: usize = 14;

impl Algebra {
    pub fn new(datum: CartanDatum) -> Self {
        Algebra::with_max_height(datum, DEFAULT_MAX_HEIGHT)
    }

    pub fn with_max_height(datum: CartanDatum, max_height: usize) -> Self {
        Algebra {
            datum,
            max_height,
            serre: RwLock::new(HashMap::new()),
            images: RwLock::new(HashMap::new()),
        }
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn max_height(&self) -> usize {
        self.max_height
    }

    /// The Serre echelon data for `degree`, computed on first use.
    pub fn serre_block(&self, degree: &[u32]) -> Result<Arc<SerreBlock>> {
        if let Some(b) = self.serre.read().expect("serre cache lock").get(degree) {
            return Ok(b.clone());
        }
        let height = degree.iter().sum::<u32>() as usize;
        if height > self.max_height {
            return Err(Error::ResourceExceeded(format!(
                "multidegree of height {} exceeds the bound {}",
                height, self.max_height
            )));
        }
        let block = Arc::new(SerreBlock::compute(&self.datum, degree));
        let mut cache = self.serre.write().expect("serre cache lock");
        Ok(cache.entry(degree.to_vec()).or_insert(block).clone())
    }

    /// Every cached block, sorted by multidegree.
    pub fn cached_blocks(&self) -> Vec<Arc<SerreBlock>> {
        let cache = self.serre.read().expect("serre cache lock");
        let mut blocks: Vec<_> = cache.values().cloned().collect();
        blocks.sort_by(|a, b| a.degree.cmp(&b.degree));
        blocks
    }

    pub(crate) fn insert_block(&self, block: SerreBlock) {
        let mut cache = self.serre.write().expect("serre cache lock");
        cache.insert(block.degree.clone(), Arc::new(block));
    }

    pub(crate) fn cached_image(&self, key: (ImageKind, usize, usize)) -> Option<Arc<Element>> {
        self.images.read().expect("image cache lock").get(&key).cloned()
    }

    pub(crate) fn store_image(&self, key: (ImageKind, usize, usize), image: Element) -> Arc<Element> {
        let mut cache = self.images.write().expect("image cache lock");
        cache.entry(key).or_insert_with(|| Arc::new(image)).clone()
    }

    fn degree_of(&self, word: &[u32]) -> Vec<u32> {
        let mut deg = vec![0; self.rank()];
        for &i in word {
            deg[i as usize] += 1;
        }
        deg
    }

    /// Writes a single-level word in canonical words.
    pub fn canonicalize_word(&self, word: &[u32]) -> Result<Vec<(Vec<u32>, Scalar)>> {
        if word.len() < 2 || word.iter().all(|&x| x == word[0]) {
            return Ok(vec![(word.to_vec(), Scalar::one())]);
        }
        let block = self.serre_block(&self.degree_of(word))?;
        if block.is_canonical(word) {
            return Ok(vec![(word.to_vec(), Scalar::one())]);
        }
        Ok(block.reductions.get(word).cloned().expect("non-canonical words are pivots"))
    }

    /// Adds `coeff * word` to `out`, where `word` is normal except possibly
    /// for the block at `level`.
    fn emit_with_block(
        &self,
        word: &[Gen],
        level: i32,
        coeff: Scalar,
        out: &mut BTreeMap<Monomial, Scalar>,
    ) -> Result<()> {
        let start = word.iter().position(|g| g.level == level);
        let Some(start) = start else {
            add_into(out, Monomial(word.to_vec()), coeff);
            return Ok(());
        };
        let end = word[start..].iter().position(|g| g.level != level).map_or(word.len(), |e| start + e);
        let nodes: Vec<u32> = word[start..end].iter().map(|g| g.node).collect();
        for (w, c) in self.canonicalize_word(&nodes)? {
            let mut letters = Vec::with_capacity(word.len());
            letters.extend_from_slice(&word[..start]);
            letters.extend(w.iter().map(|&node| Gen { node, level }));
            letters.extend_from_slice(&word[end..]);
            add_into(out, Monomial(letters), &coeff * &c);
        }
        Ok(())
    }

    /// q-power exponent (in `q`) of the boson swap `f_{i,m} f_{j,p} -> f_{j,p} f_{i,m}`, `m < p`.
    fn boson_exponent(&self, x: Gen, g: Gen) -> i32 {
        let e = self.datum.simple_form(x.node as usize, g.node as usize) as i32;
        if (g.level - x.level + 1).rem_euclid(2) == 0 {
            e
        } else {
            -e
        }
    }

    /// `zeta_i = 1 - q_i^2`.
    pub fn zeta(&self, i: usize) -> Scalar {
        &Scalar::one() - &Scalar::q_pow(2 * self.datum.d(i) as i32)
    }

    /// Adds `coeff * mono * g` in normal form to `out`.
    fn mul_monomial_gen(&self, mono: &[Gen], g: Gen, coeff: &Scalar, out: &mut BTreeMap<Monomial, Scalar>) -> Result<()> {
        let n = mono.len();
        let t0 = mono.iter().position(|x| x.level < g.level).unwrap_or(n);
        let mut acc_q = 0i32;
        for k in (t0..n).rev() {
            let x = mono[k];
            if x.node == g.node && x.level == g.level - 1 {
                let mut word = Vec::with_capacity(n - 1);
                word.extend_from_slice(&mono[..k]);
                word.extend_from_slice(&mono[k + 1..]);
                let c = &coeff.mul_v_pow(2 * acc_q) * &self.zeta(g.node as usize);
                self.emit_with_block(&word, x.level, c, out)?;
            }
            acc_q += self.boson_exponent(x, g);
        }
        let mut word = Vec::with_capacity(n + 1);
        word.extend_from_slice(&mono[..t0]);
        word.push(g);
        word.extend_from_slice(&mono[t0..]);
        self.emit_with_block(&word, g.level, coeff.mul_v_pow(2 * acc_q), out)
    }

    /// `x * f_g`.
    pub fn mul_gen(&self, x: &Element, g: Gen) -> Result<Element> {
        self.datum.check_node(g.node as usize)?;
        let mut out = BTreeMap::new();
        for (m, c) in &x.terms {
            self.mul_monomial_gen(&m.0, g, c, &mut out)?;
        }
        Ok(Element { terms: out })
    }

    /// `x * w` for a raw word `w`.
    pub fn mul_word(&self, x: &Element, word: &[Gen]) -> Result<Element> {
        let mut cur = x.clone();
        for &g in word {
            if cur.is_zero() {
                break;
            }
            cur = self.mul_gen(&cur, g)?;
        }
        Ok(cur)
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = BTreeMap::new();
        for (m, c) in &y.terms {
            let part = self.mul_word(x, &m.0)?;
            for (pm, pc) in part.terms {
                add_into(&mut out, pm, &pc * c);
            }
        }
        Ok(Element { terms: out })
    }

    pub fn multiply_all(&self, factors: &[&Element]) -> Result<Element> {
        let mut acc = Element::one();
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, x: &Element, n: u32) -> Result<Element> {
        let mut acc = Element::one();
        for _ in 0..n {
            acc = self.multiply(&acc, x)?;
        }
        Ok(acc)
    }

    pub fn gen(&self, i: usize, m: i32) -> Result<Element> {
        self.datum.check_node(i)?;
        Ok(Element::monomial(Monomial(vec![Gen::new(i, m)]), Scalar::one()))
    }

    /// Normal form of a linear combination of raw words.
    pub fn normal_form(&self, words: &[(Vec<Gen>, Scalar)]) -> Result<Element> {
        let mut out = BTreeMap::new();
        for (w, c) in words {
            let e = self.mul_word(&Element::scalar(c.clone()), w)?;
            for (m, x) in e.terms {
                add_into(&mut out, m, x);
            }
        }
        Ok(Element { terms: out })
    }

    /// Normal form by an independent route: rewrite randomly chosen adjacent
    /// level inversions with the boson relation until levels are sorted, then
    /// canonicalize each level block.
    pub fn normal_form_randomized<R: Rng>(&self, words: &[(Vec<Gen>, Scalar)], rng: &mut R) -> Result<Element> {
        for (w, _) in words {
            for g in w {
                self.datum.check_node(g.node as usize)?;
            }
        }
        let mut pending: BTreeMap<Vec<Gen>, Scalar> = BTreeMap::new();
        for (w, c) in words {
            add_raw(&mut pending, w.clone(), c.clone());
        }
        let mut sorted: BTreeMap<Vec<Gen>, Scalar> = BTreeMap::new();
        while let Some((w, c)) = pending.pop_first() {
            let inversions: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&k| w[k].level < w[k + 1].level).collect();
            if inversions.is_empty() {
                add_raw(&mut sorted, w, c);
                continue;
            }
            let k = inversions[rng.gen_range(0..inversions.len())];
            let (x, g) = (w[k], w[k + 1]);
            let mut swapped = w.clone();
            swapped.swap(k, k + 1);
            add_raw(&mut pending, swapped, c.mul_v_pow(2 * self.boson_exponent(x, g)));
            if x.node == g.node && x.level == g.level - 1 {
                let mut shorter = w[..k].to_vec();
                shorter.extend_from_slice(&w[k + 2..]);
                add_raw(&mut pending, shorter, &c * &self.zeta(g.node as usize));
            }
        }
        let mut out = BTreeMap::new();
        for (w, c) in sorted {
            let mut partial: Vec<(Vec<Gen>, Scalar)> = vec![(Vec::new(), c)];
            let mut start = 0;
            while start < w.len() {
                let level = w[start].level;
                let end = w[start..].iter().position(|g| g.level != level).map_or(w.len(), |e| start + e);
                let nodes: Vec<u32> = w[start..end].iter().map(|g| g.node).collect();
                let expansion = self.canonicalize_word(&nodes)?;
                let mut next = Vec::new();
                for (prefix, pc) in &partial {
                    for (cw, cc) in &expansion {
                        let mut word = prefix.clone();
                        word.extend(cw.iter().map(|&node| Gen { node, level }));
                        next.push((word, pc * cc));
                    }
                }
                partial = next;
                start = end;
            }
            for (word, c) in partial {
                add_into(&mut out, Monomial(word), c);
            }
        }
        Ok(Element { terms: out })
    }

    pub fn weight(&self, x: &Element) -> Result<RootVector> {
        x.weight(self.rank())
    }

    pub fn homogeneous_components(&self, x: &Element) -> BTreeMap<RootVector, Element> {
        x.homogeneous_components(self.rank())
    }

    /// `[x, y]_q = xy - q^{-(wt x, wt y)} yx`, extended bilinearly.
    pub fn q_commutator(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (wx, cx) in self.homogeneous_components(x) {
            for (wy, cy) in self.homogeneous_components(y) {
                let e = -self.datum.form(&wx, &wy) as i32;
                let xy = self.multiply(&cx, &cy)?;
                let yx = self.multiply(&cy, &cx)?;
                out = out.add(&xy.sub(&yx.scale(&Scalar::q_pow(e))));
            }
        }
        Ok(out)
    }

    /// `E_{i,m}(x) = [x, f_{i,m+1}]_q`.
    pub fn e_op(&self, i: usize, m: i32, x: &Element) -> Result<Element> {
        self.q_commutator(x, &self.gen(i, m + 1)?)
    }

    /// `E*_{i,m}(x) = [f_{i,m-1}, x]_q`.
    pub fn e_star_op(&self, i: usize, m: i32, x: &Element) -> Result<Element> {
        self.q_commutator(&self.gen(i, m - 1)?, x)
    }

    /// The divided power `F_{i,m}^{(r)} = (kappa_i^{-1} f_{i,m})^r / [r]_i!`, zero for `r < 0`.
    pub fn divided_power_f(&self, i: usize, m: i32, r: i64) -> Result<Element> {
        self.datum.check_node(i)?;
        if r < 0 {
            return Ok(Element::zero());
        }
        let d = self.datum.d(i);
        let coeff = Scalar::v_pow(d as i32 * r as i32)
            .checked_div(&self.zeta(i).pow(r as i32)?)?
            .checked_div(&crate::scalar::q_factorial(r, d)?)?;
        let word = Monomial(vec![Gen::new(i, m); r as usize]);
        Ok(Element::monomial(word, coeff))
    }

    /// Checks that every block of every monomial is canonical and levels are sorted.
    pub fn is_normal(&self, x: &Element) -> Result<bool> {
        for m in x.terms.keys() {
            let w = &m.0;
            if w.windows(2).any(|p| p[0].level < p[1].level) {
                return Ok(false);
            }
            let mut start = 0;
            while start < w.len() {
                let level = w[start].level;
                let end = w[start..].iter().position(|g| g.level != level).map_or(w.len(), |e| start + e);
                let nodes: Vec<u32> = w[start..end].iter().map(|g| g.node).collect();
                let can = self.canonicalize_word(&nodes)?;
                if can.len() != 1 || can[0].0 != nodes || !can[0].1.is_one() {
                    return Ok(false);
                }
                start = end;
            }
        }
        Ok(true)
    }

    /// All canonical monomials with the given fine degree (highest level first).
    pub fn canonical_monomials(&self, fine: &[(i32, Vec<u32>)]) -> Result<Vec<Monomial>> {
        let mut out = vec![Vec::new()];
        for (level, deg) in fine {
            let words: Vec<Vec<u32>> = if deg.iter().all(|&d| d == 0) {
                vec![Vec::new()]
            } else if deg.iter().filter(|&&d| d > 0).count() == 1 {
                words_of_degree(deg)
            } else {
                self.serre_block(deg)?.canonical.iter().cloned().collect()
            };
            let mut next = Vec::new();
            for prefix in &out {
                for w in &words {
                    let mut m: Vec<Gen> = prefix.clone();
                    m.extend(w.iter().map(|&node| Gen { node, level: *level }));
                    next.push(m);
                }
            }
            out = next;
        }
        Ok(out.into_iter().map(Monomial).collect())
    }
}

fn add_raw(terms: &mut BTreeMap<Vec<Gen>, Scalar>, w: Vec<Gen>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&w) {
        Some(slot) => {
            *slot += &c;
            if slot.is_zero() {
                terms.remove(&w);
            }
        }
        None => {
            terms.insert(w, c);
        }
    }
}
