//! Verification suites with JSON reports. Items are checked in parallel and
//! collected in a fixed order, so reports do not depend on the thread count.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{Algebra, Element, Gen, Monomial};
use crate::cartan::{braid_relation_words, BraidOrder, BraidWord, CartanDatum, RootVector};
use crate::error::{Error, Result};
use crate::expr::parse_element;
use crate::linalg::determinant;
use crate::pbw::{bilex_less, tensor_check, CuspidalSet, PbwIndex};
use crate::scalar::{Rational, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Braid,
    Inverse,
    Forms,
    Orth,
    Ls,
    Twist,
    Kl,
    Tensor,
    SerreDims,
    Confluence,
    Roundtrip,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Braid,
        Suite::Inverse,
        Suite::Forms,
        Suite::Orth,
        Suite::Ls,
        Suite::Twist,
        Suite::Kl,
        Suite::Tensor,
        Suite::SerreDims,
        Suite::Confluence,
        Suite::Roundtrip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Braid => "braid",
            Suite::Inverse => "inverse",
            Suite::Forms => "forms",
            Suite::Orth => "orth",
            Suite::Ls => "ls",
            Suite::Twist => "twist",
            Suite::Kl => "kl",
            Suite::Tensor => "tensor",
            Suite::SerreDims => "serre-dims",
            Suite::Confluence => "confluence",
            Suite::Roundtrip => "roundtrip",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {:?}", s)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), pass, detail: None }
    }

    fn with(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: Some(detail.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub datum: String,
    pub parameters: BTreeMap<String, Value>,
    pub pass: bool,
    pub checks_run: usize,
    pub failures: usize,
    /// Observations that are reported but not asserted.
    pub findings: Vec<String>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub budget: Option<u32>,
    pub threads: Option<usize>,
    pub seq: Option<Vec<usize>>,
    pub seed: u64,
}

/// Label of a datum: the preset name if it is one, else `custom`.
pub fn datum_label(datum: &CartanDatum) -> String {
    CartanDatum::PRESETS
        .iter()
        .find(|p| CartanDatum::preset(p).map(|d| d == *datum).unwrap_or(false))
        .map(|p| p.to_string())
        .unwrap_or_else(|| "custom".into())
}

/// The sequence used when none is given: the alternating word of length
/// `m_12` in rank 2, otherwise `1, 2, ..., n`.
pub fn default_sequence(datum: &CartanDatum) -> Vec<usize> {
    match datum.rank() {
        1 => vec![0],
        2 => match datum.m_ij(0, 1) {
            Ok(BraidOrder::Finite(m)) => (0..m).map(|k| k % 2).collect(),
            _ => vec![0, 1],
        },
        n => (0..n).collect(),
    }
}

pub fn run(alg: &Algebra, suite: Suite, opts: &VerifyOptions) -> Result<Report> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| run_in_pool(alg, suite, opts))
}

fn run_in_pool(alg: &Algebra, suite: Suite, opts: &VerifyOptions) -> Result<Report> {
    let mut params = BTreeMap::new();
    let mut findings = Vec::new();
    let checks = match suite {
        Suite::Braid => braid_suite(alg, opts, &mut params)?,
        Suite::Inverse => inverse_suite(alg, opts, &mut params)?,
        Suite::Forms => forms_suite(alg, opts, &mut params)?,
        Suite::Orth => orth_suite(alg, opts, &mut params)?,
        Suite::Ls => ls_suite(alg, opts, &mut params)?,
        Suite::Twist => twist_suite(alg, opts, &mut params)?,
        Suite::Kl => kl_suite(alg, opts, &mut params, &mut findings)?,
        Suite::Tensor => tensor_suite(alg, opts, &mut params)?,
        Suite::SerreDims => serre_dims_suite(alg, opts, &mut params, &mut findings)?,
        Suite::Confluence => confluence_suite(alg, opts, &mut params)?,
        Suite::Roundtrip => roundtrip_suite(alg, opts, &mut params)?,
    };
    let failures = checks.iter().filter(|c| !c.pass).count();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        suite: suite.name().into(),
        datum: datum_label(alg.datum()),
        parameters: params,
        pass: failures == 0,
        checks_run: checks.len(),
        failures,
        findings,
        checks,
    })
}

/// Maps items in parallel, keeping their order; the first error wins.
fn par_checks<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<Check> + Sync + Send) -> Result<Vec<Check>> {
    items.par_iter().map(f).collect()
}

fn seq_of(alg: &Algebra, opts: &VerifyOptions) -> Result<Vec<usize>> {
    let seq = opts.seq.clone().unwrap_or_else(|| default_sequence(alg.datum()));
    for &i in &seq {
        alg.datum().check_node(i)?;
    }
    Ok(seq)
}

fn fmt_seq(seq: &[usize]) -> String {
    seq.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_u(u: &[u32]) -> String {
    format!("({})", u.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

fn braid_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let d = alg.datum();
    let default_width = if d.rank() == 2 && d.m_ij(0, 1)? == BraidOrder::Finite(6) { 0 } else { 1 };
    let width = opts.budget.unwrap_or(default_width) as i32;
    params.insert("window".into(), json!([-width, width]));
    let mut items = Vec::new();
    for i in d.nodes() {
        for j in d.nodes().filter(|&j| j > i) {
            if let BraidOrder::Finite(_) = d.m_ij(i, j)? {
                for k in d.nodes() {
                    for m in -width..=width {
                        items.push((i, j, k, m));
                    }
                }
            }
        }
    }
    par_checks(&items, |&(i, j, k, m)| {
        let (w1, w2) = braid_relation_words(d, i, j)?;
        let f = alg.gen(k, m)?;
        let a = alg.apply_braid(&BraidWord::positive(&w1), &f)?;
        let b = alg.apply_braid(&BraidWord::positive(&w2), &f)?;
        Ok(Check::new(format!("T[{}] = T[{}] on f[{},{}]", fmt_seq(&w1), fmt_seq(&w2), k + 1, m), a == b))
    })
}

fn inverse_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let width = opts.budget.unwrap_or(2) as i32;
    params.insert("window".into(), json!([-width, width]));
    let d = alg.datum();
    let mut items = Vec::new();
    for i in d.nodes() {
        for k in d.nodes() {
            for m in -width..=width {
                items.push((i, k, m));
            }
        }
    }
    par_checks(&items, |&(i, k, m)| {
        let f = alg.gen(k, m)?;
        let a = alg.t_i(i, &alg.t_i_star(i, &f)?)?;
        let b = alg.t_i_star(i, &alg.t_i(i, &f)?)?;
        Ok(Check::new(format!("T{0} T{0}* = T{0}* T{0} = id on f[{1},{2}]", i + 1, k + 1, m), a == f && b == f))
    })
}

/// Normal monomials of length at most `max_len` with levels in `[lo, hi]`.
pub fn monomials_up_to(alg: &Algebra, max_len: usize, lo: i32, hi: i32) -> Result<Vec<Monomial>> {
    let gens: Vec<Gen> = alg.datum().nodes().flat_map(|i| (lo..=hi).map(move |m| Gen::new(i, m))).collect();
    let mut all = std::collections::BTreeSet::new();
    let mut frontier = vec![Element::one()];
    all.insert(Monomial::one());
    for _ in 0..max_len {
        let mut next = Vec::new();
        for x in &frontier {
            for &g in &gens {
                let y = alg.mul_gen(x, g)?;
                for (m, _) in y.terms() {
                    if m.len() <= max_len && all.insert(m.clone()) {
                        next.push(Element::monomial(m.clone(), Scalar::one()));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(all.into_iter().collect())
}

fn forms_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let nmax = opts.budget.unwrap_or(5);
    params.insert("max_power".into(), json!(nmax));
    params.insert("invariance_window".into(), json!([-1, 1]));
    params.insert("invariance_max_degree".into(), json!(2));
    let d = alg.datum();
    let mut value_items = Vec::new();
    for i in d.nodes() {
        for p in 0..=1 {
            for n in 0..=nmax {
                value_items.push((i, p, n));
            }
        }
    }
    let mut checks = par_checks(&value_items, |&(i, p, n)| {
        let x = alg.pow(&alg.gen(i, p)?, n)?;
        let di = d.d(i) as i32;
        let mut prod = Scalar::one();
        for k in 1..=n as i32 {
            prod *= &(&Scalar::one() - &Scalar::q_pow(2 * di * k));
        }
        let h = alg.hform(&x, &x)?;
        let pr = alg.pair(&x, &x)?;
        let ok = h == prod && pr == prod.mul_v_pow(-2 * di * (n * n) as i32);
        Ok(Check::new(format!("values on f[{},{}]^{}", i + 1, p, n), ok))
    })?;
    let monos = monomials_up_to(alg, 2, -1, 1)?;
    let rank = alg.rank();
    let mut pairs = Vec::new();
    for (a, x) in monos.iter().enumerate() {
        for y in &monos[a..] {
            if x.weight(rank) == y.weight(rank) {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    params.insert("invariance_pairs_same_weight".into(), json!(pairs.len()));
    let images: Vec<Vec<Element>> = monos
        .par_iter()
        .map(|m| d.nodes().map(|i| alg.t_i(i, &Element::monomial(m.clone(), Scalar::one()))).collect())
        .collect::<Result<_>>()?;
    let index: BTreeMap<&Monomial, usize> = monos.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let inv = par_checks(&pairs, |(x, y)| {
        let ex = Element::monomial(x.clone(), Scalar::one());
        let ey = Element::monomial(y.clone(), Scalar::one());
        let h = alg.hform(&ex, &ey)?;
        let p = alg.pair(&ex, &ey)?;
        let mut ok = alg.hform(&ey, &ex)? == h;
        for i in d.nodes() {
            let tx = &images[index[x]][i];
            let ty = &images[index[y]][i];
            ok &= alg.hform(tx, ty)? == h && alg.pair(tx, ty)? == p;
        }
        Ok(Check::new(format!("invariance on ({}, {})", x, y), ok))
    })?;
    // Pairs of different weights are orthogonal on both sides by weight.
    let mut mixed = 0usize;
    for (a, x) in monos.iter().enumerate() {
        for y in &monos[a..] {
            if x.weight(rank) != y.weight(rank) {
                mixed += 1;
            }
        }
    }
    params.insert("invariance_pairs_other_weight".into(), json!(mixed));
    checks.extend(inv);
    Ok(checks)
}

fn orth_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let seq = seq_of(alg, opts)?;
    let total = opts.budget.unwrap_or(3);
    params.insert("sequence".into(), json!(fmt_seq(&seq)));
    params.insert("max_total".into(), json!(total));
    let set = CuspidalSet::new(alg, &seq)?;
    let idx = set.indices_up_to(total);
    let elements: Vec<Element> = idx.par_iter().map(|u| set.pbw_element(u)).collect::<Result<_>>()?;
    let mut items = Vec::new();
    for a in 0..idx.len() {
        for b in 0..idx.len() {
            items.push((a, b));
        }
    }
    par_checks(&items, |&(a, b)| {
        let p = alg.pair(&elements[a], &elements[b])?;
        let expected = if a == b { set.norm(&idx[a]) } else { Scalar::zero() };
        let name = format!("((P{}, P{}))", fmt_u(&idx[a]), fmt_u(&idx[b]));
        Ok(if p == expected { Check::new(name, true) } else { Check::with(name, false, p.to_q_string()) })
    })
}

fn ls_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let seq = seq_of(alg, opts)?;
    params.insert("sequence".into(), json!(fmt_seq(&seq)));
    let set = CuspidalSet::new(alg, &seq)?;
    let r = seq.len();
    let mut items = Vec::new();
    for k in 1..=r {
        for t in k + 1..=r {
            items.push((k, t));
        }
    }
    par_checks(&items, |&(k, t)| {
        let e = set.ls_commutator(k, t)?;
        let support_ok = e.coords.keys().all(|u| u.iter().enumerate().all(|(s, &x)| x == 0 || (s + 1 > k && s + 1 < t)));
        let coeff_ok = e.coords.values().all(|c| c.is_in_zq_laurent());
        let detail = e.coords.iter().map(|(u, c)| format!("{}: {}", fmt_u(u), c)).collect::<Vec<_>>().join("; ");
        Ok(Check::with(
            format!("[P{}, P{}]_q", k, t),
            support_ok && coeff_ok && e.residual.is_zero(),
            if detail.is_empty() { "0".to_string() } else { detail },
        ))
    })
}

/// A random normal element with small coefficients; deterministic in `seed`.
pub fn random_element(alg: &Algebra, seed: u64, max_terms: usize, max_len: usize, lo: i32, hi: i32) -> Result<Element> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = alg.rank();
    let terms = rng.gen_range(1..=max_terms);
    let mut words = Vec::with_capacity(terms);
    for _ in 0..terms {
        let len = rng.gen_range(0..=max_len);
        let w: Vec<Gen> = (0..len).map(|_| Gen::new(rng.gen_range(0..n), rng.gen_range(lo..=hi))).collect();
        words.push((w, random_scalar(&mut rng)));
    }
    alg.normal_form(&words)
}

fn random_scalar(rng: &mut ChaCha8Rng) -> Scalar {
    let c = Scalar::from_rational(Rational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=2).into()));
    let c = if c.is_zero() { Scalar::one() } else { c };
    let c = c.mul_v_pow(rng.gen_range(-3..=3));
    if rng.gen_bool(0.2) {
        let den = &Scalar::one() - &Scalar::q_pow(rng.gen_range(1..=2));
        c.checked_div(&den).expect("nonzero")
    } else {
        c
    }
}

fn twist_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let seq = seq_of(alg, opts)?;
    let total = opts.budget.unwrap_or(2);
    params.insert("sequence".into(), json!(fmt_seq(&seq)));
    params.insert("max_total".into(), json!(total));
    params.insert("random_elements".into(), json!(50));
    params.insert("random_window".into(), json!([0, 2]));
    let rev: Vec<usize> = seq.iter().rev().copied().collect();
    let word = BraidWord::positive(&seq);
    let word_rev = BraidWord::positive(&rev);
    let set = CuspidalSet::new(alg, &seq)?;
    let set_rev = CuspidalSet::new(alg, &rev)?;
    let idx = set.indices_up_to(total);
    let mut checks = par_checks(&idx, |u| {
        let lhs = alg.twist(&word_rev, &set.pbw_element(u)?)?;
        let urev: PbwIndex = u.iter().rev().copied().collect();
        let rhs = set_rev.pbw_element(&urev)?;
        Ok(Check::new(format!("Theta_rev(P{}) = P_rev{}", fmt_u(u), fmt_u(&urev)), lhs == rhs))
    })?;
    let ks: Vec<usize> = (1..=seq.len()).collect();
    checks.extend(par_checks(&ks, |&k| {
        let lhs = alg.twist(&word_rev, set.cuspidal(k)?)?;
        let tail: Vec<usize> = seq[k..].iter().rev().copied().collect();
        let rhs = alg.apply_braid(&BraidWord::positive(&tail), &alg.phi_gen(0, seq[k - 1])?)?;
        Ok(Check::new(format!("Theta_rev(P{}) = T[{}] phi_0(<{}>)", k, fmt_seq(&tail), seq[k - 1] + 1), lhs == rhs))
    })?);
    let mut gens = Vec::new();
    for i in alg.datum().nodes() {
        for m in -2..=2 {
            gens.push((i, m));
        }
    }
    checks.extend(par_checks(&gens, |&(i, m)| {
        let lhs = alg.twist(&BraidWord::positive(&[i]), &alg.gen(i, m)?)?;
        Ok(Check::new(format!("T{} star dbar f[{},{}] = f[{},{}]", i + 1, i + 1, m, i + 1, -m), lhs == alg.gen(i, -m)?))
    })?);
    let seeds: Vec<u64> = (0..50).collect();
    checks.extend(par_checks(&seeds, |&s| {
        let x = random_element(alg, opts.seed.wrapping_mul(1_000_003).wrapping_add(s), 3, 3, 0, 2)?;
        let y = alg.twist(&word_rev, &alg.twist(&word, &x)?)?;
        Ok(Check::new(format!("Theta_rev Theta = id on random element {}", s), y == x))
    })?);
    Ok(checks)
}

fn kl_suite(
    alg: &Algebra,
    opts: &VerifyOptions,
    params: &mut BTreeMap<String, Value>,
    findings: &mut Vec<String>,
) -> Result<Vec<Check>> {
    let seq = seq_of(alg, opts)?;
    let total = opts.budget.unwrap_or(3);
    params.insert("sequence".into(), json!(fmt_seq(&seq)));
    params.insert("max_total".into(), json!(total));
    let set = CuspidalSet::new(alg, &seq)?;
    let idx = set.indices_up_to(total);
    let results: Vec<(Check, Vec<String>)> = idx
        .par_iter()
        .map(|u| -> Result<(Check, Vec<String>)> {
            let name = format!("G{}", fmt_u(u));
            let g = match set.kl_basis(u) {
                Ok(g) => g,
                Err(Error::Consistency(msg)) => return Ok((Check::with(name, false, msg), Vec::new())),
                Err(e) => return Err(e),
            };
            let invariant = alg.c_map(&g.element)? == g.element;
            let mut ok = invariant;
            let mut notes = Vec::new();
            for (v, t) in &g.t {
                if v == u {
                    ok &= t.is_one();
                } else {
                    ok &= t.is_in_qzq() && bilex_less(v, u)?;
                }
            }
            for (v, c) in &g.g {
                if v == u {
                    ok &= c.is_one();
                } else {
                    ok &= c.is_in_qzq() && bilex_less(v, u)?;
                    if !c.has_nonnegative_coeffs() {
                        notes.push(format!("g{}{} = {} has a negative coefficient", fmt_u(u), fmt_u(v), c));
                    }
                }
            }
            let detail = g
                .t
                .iter()
                .filter(|(v, _)| *v != u)
                .map(|(v, t)| format!("t{}: {}", fmt_u(v), t))
                .collect::<Vec<_>>()
                .join("; ");
            Ok((Check::with(name, ok, if detail.is_empty() { "G = P".into() } else { detail }), notes))
        })
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut negative = 0;
    for (c, notes) in results {
        negative += notes.len();
        findings.extend(notes);
        checks.push(c);
    }
    findings.push(format!(
        "nonnegativity of the P-to-G coefficients: {}",
        if negative == 0 { "holds on every computed coefficient" } else { "fails on some coefficients" }
    ));
    Ok(checks)
}

fn tensor_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let seq = seq_of(alg, opts)?;
    let height = opts.budget.unwrap_or(3);
    let max_level = 2;
    params.insert("max_height".into(), json!(height));
    params.insert("window".into(), json!([0, max_level]));
    let words: Vec<Vec<usize>> = (1..=seq.len().min(2)).map(|k| seq[..k].to_vec()).collect();
    params.insert("words".into(), json!(words.iter().map(|w| fmt_seq(w)).collect::<Vec<_>>()));
    let mut checks = Vec::new();
    for w in &words {
        let set = CuspidalSet::new(alg, w)?;
        let reports = tensor_check(&set, max_level, height)?;
        for r in reports {
            let deg = r.fine_degree.iter().map(|d| fmt_u(d)).collect::<Vec<_>>().join(" ");
            checks.push(Check::with(
                format!("b = r[{}], degree {}", fmt_seq(w), deg),
                r.pass,
                format!(
                    "dimension {}, products {}, product rank {}, reconstructed {}",
                    r.dimension, r.products, r.product_rank, r.reconstructed
                ),
            ));
        }
    }
    Ok(checks)
}

/// Positive real roots of height at most `max_height`, by reflection closure.
pub fn positive_roots(datum: &CartanDatum, max_height: i64) -> Vec<RootVector> {
    let n = datum.rank();
    let mut seen: std::collections::BTreeSet<RootVector> = (0..n).map(|i| RootVector::simple(n, i)).collect();
    let mut frontier: Vec<RootVector> = seen.iter().cloned().collect();
    while let Some(b) = frontier.pop() {
        for i in 0..n {
            let r = datum.reflect(i, &b);
            if r.0.iter().all(|&x| x >= 0) && !r.is_zero() && r.height() <= max_height && seen.insert(r.clone()) {
                frontier.push(r);
            }
        }
    }
    seen.into_iter().collect()
}

/// Number of ways to write `mu` as a sum of the given roots.
pub fn kostant_count(roots: &[RootVector], mu: &[i64]) -> u64 {
    fn rec(roots: &[RootVector], k: usize, mu: &mut Vec<i64>, memo: &mut BTreeMap<(usize, Vec<i64>), u64>) -> u64 {
        if mu.iter().all(|&x| x == 0) {
            return 1;
        }
        if k == roots.len() {
            return 0;
        }
        if let Some(&v) = memo.get(&(k, mu.clone())) {
            return v;
        }
        let mut total = rec(roots, k + 1, mu, memo);
        let mut used = 0;
        loop {
            if roots[k].0.iter().zip(mu.iter()).any(|(r, m)| r > m) {
                break;
            }
            for (m, r) in mu.iter_mut().zip(&roots[k].0) {
                *m -= r;
            }
            used += 1;
            total += rec(roots, k + 1, mu, memo);
        }
        for (m, r) in mu.iter_mut().zip(&roots[k].0) {
            *m += r * used;
        }
        memo.insert((k, mu.clone()), total);
        total
    }
    rec(roots, 0, &mut mu.to_vec(), &mut BTreeMap::new())
}

/// Multidegrees of height `1..=max_height`.
pub fn multidegrees(rank: usize, max_height: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == cur.len() {
            if cur.iter().any(|&x| x > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for x in 0..=left {
            cur[k] = x;
            rec(k + 1, left - x, cur, out);
        }
        cur[k] = 0;
    }
    rec(0, max_height, &mut vec![0; rank], &mut out);
    out.sort_by(|a, b| (a.iter().sum::<u32>(), a).cmp(&(b.iter().sum::<u32>(), b)));
    out
}

/// Finite type: every leading principal minor of `(alpha_i, alpha_j)` is positive.
pub fn is_finite_type(datum: &CartanDatum) -> bool {
    (1..=datum.rank()).all(|k| {
        let m: Vec<Vec<Scalar>> =
            (0..k).map(|i| (0..k).map(|j| Scalar::from_int(datum.simple_form(i, j))).collect()).collect();
        let det = determinant(m);
        !det.is_zero() && det.numerator().coeff(0) > Rational::from_integer(0.into())
    })
}

fn serre_dims_suite(
    alg: &Algebra,
    opts: &VerifyOptions,
    params: &mut BTreeMap<String, Value>,
    findings: &mut Vec<String>,
) -> Result<Vec<Check>> {
    let h = opts.budget.unwrap_or(4);
    params.insert("max_height".into(), json!(h));
    if !is_finite_type(alg.datum()) {
        findings.push("the datum is not of finite type; the partition oracle counts real roots only".into());
    }
    let roots = positive_roots(alg.datum(), h as i64);
    let degrees = multidegrees(alg.rank(), h);
    par_checks(&degrees, |mu| {
        let count = alg.canonical_monomials(&[(0, mu.clone())])?.len() as u64;
        let mu_i: Vec<i64> = mu.iter().map(|&x| x as i64).collect();
        let expected = kostant_count(&roots, &mu_i);
        Ok(Check::with(format!("canonical words of degree {}", fmt_u(mu)), count == expected, format!("{} vs {}", count, expected)))
    })
}

fn confluence_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let count = opts.budget.unwrap_or(200) as u64;
    params.insert("words".into(), json!(count));
    params.insert("max_length".into(), json!(6));
    params.insert("levels".into(), json!([-2, 2]));
    let seeds: Vec<u64> = (0..count).collect();
    let n = alg.rank();
    par_checks(&seeds, |&s| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_mul(7919).wrapping_add(s));
        let len = rng.gen_range(0..=6);
        let w: Vec<Gen> = (0..len).map(|_| Gen::new(rng.gen_range(0..n), rng.gen_range(-2..=2))).collect();
        let direct = alg.normal_form(&[(w.clone(), Scalar::one())])?;
        let a = alg.normal_form_randomized(&[(w.clone(), Scalar::one())], &mut rng)?;
        let b = alg.normal_form_randomized(&[(w.clone(), Scalar::one())], &mut rng)?;
        let text = Monomial(w).to_string();
        Ok(Check::new(format!("order independence on {}", text), a == direct && b == direct))
    })
}

fn roundtrip_suite(alg: &Algebra, opts: &VerifyOptions, params: &mut BTreeMap<String, Value>) -> Result<Vec<Check>> {
    let count = opts.budget.unwrap_or(200) as u64;
    params.insert("elements".into(), json!(count));
    let seeds: Vec<u64> = (0..count).collect();
    par_checks(&seeds, |&s| {
        let x = random_element(alg, opts.seed.wrapping_mul(104_729).wrapping_add(s), 4, 4, -2, 2)?;
        let text = x.to_string();
        let back = parse_element(alg, &text)?;
        Ok(Check::new(format!("parse(print(x)) = x for element {}", s), back == x))
    })
}
