//! Exact arithmetic in the coefficient field `k = Q(v)` where `v = q^(1/2)`.
//!
//! A [`LaurentPoly`] is a dense Laurent polynomial in `v` with rational
//! coefficients. A [`Scalar`] is a reduced fraction of two of them, kept in a
//! canonical form so that structural equality coincides with equality of
//! rational functions:
//!
//! * the fraction is in lowest terms over `Q[v]`,
//! * the denominator has lowest exponent `0` and lowest coefficient `1`.
//!
//! In particular a scalar is a Laurent polynomial iff its denominator is `1`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Laurent polynomial in `v = q^(1/2)`; `coeffs[k]` multiplies `v^(low + k)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly {
    low: i32,
    coeffs: Vec<Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { low: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), 0)
    }

    pub fn monomial(c: Rational, exp: i32) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: exp, coeffs: vec![c] }
    }

    /// Builds a polynomial from `(v-exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (i32, Rational)>>(terms: I) -> Self {
        let terms: Vec<(i32, Rational)> = terms.into_iter().collect();
        if terms.is_empty() {
            return Self::zero();
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap();
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Rational::zero(); (hi - lo + 1) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_dense(lo, coeffs)
    }

    fn from_dense(low: i32, mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero();
        }
        if lead > 0 {
            coeffs.drain(..lead);
        }
        LaurentPoly { low: low + lead as i32, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.low == 0 && self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.coeffs.len() == 1
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn low_exp(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.low)
    }

    pub fn high_exp(&self) -> Option<i32> {
        (!self.is_zero()).then(|| self.low + self.coeffs.len() as i32 - 1)
    }

    pub fn coeff(&self, exp: i32) -> Rational {
        let k = exp - self.low;
        if k < 0 || k as usize >= self.coeffs.len() {
            Rational::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    /// Nonzero terms `(v-exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (self.low + k as i32, c))
    }

    pub fn shift(&self, by: i32) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low + by, coeffs: self.coeffs.clone() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// `v -> v^-1`.
    pub fn bar(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let high = self.high_exp().unwrap();
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        LaurentPoly { low: -high, coeffs }
    }

    /// Terms with strictly positive exponent.
    pub fn positive_part(&self) -> Self {
        Self::from_terms(self.terms().filter(|(e, _)| *e > 0).map(|(e, c)| (e, c.clone())))
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { -other } else { other.clone() };
        }
        let lo = self.low.min(other.low);
        let hi = self.high_exp().unwrap().max(other.high_exp().unwrap());
        let mut coeffs = vec![Rational::zero(); (hi - lo + 1) as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.low - lo) as usize + k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            let slot = &mut coeffs[(other.low - lo) as usize + k];
            if negate {
                *slot -= c;
            } else {
                *slot += c;
            }
        }
        Self::from_dense(lo, coeffs)
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if other.is_monomial() {
            let c = &other.coeffs[0];
            let mut out = if c.is_one() { self.clone() } else { self.scale(c) };
            out.low += other.low;
            return out;
        }
        if self.is_monomial() {
            return other.mul_impl(self);
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    coeffs[a + b] += x * y;
                }
            }
        }
        Self::from_dense(self.low + other.low, coeffs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { low: self.low, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_impl(rhs, false)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.add_impl(rhs, true)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.mul_impl(rhs)
    }
}

// Dense polynomials over Q indexed from degree 0, used for gcd computations.

fn poly_trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = b[db].recip();
    let mut quot = vec![Rational::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = &r[r.len() - 1] * &lead_inv;
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                r[k + j] -= &c * bj;
            }
        }
        quot[k] = c;
        r.pop();
        poly_trim(&mut r);
    }
    (quot, r)
}

fn poly_monic(mut p: Vec<Rational>) -> Vec<Rational> {
    if let Some(lead) = p.last().cloned() {
        if !lead.is_one() {
            let inv = lead.recip();
            for c in p.iter_mut() {
                *c *= &inv;
            }
        }
    }
    p
}

fn poly_gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = poly_divrem(&x, &y);
        x = y;
        y = poly_monic(r);
    }
    poly_monic(x)
}

/// Element of `Q(v)` in canonical reduced form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Scalar {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Scalar { num: LaurentPoly::one(), den: LaurentPoly::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(rat(n))
    }

    pub fn from_rational(c: Rational) -> Self {
        Scalar { num: LaurentPoly::monomial(c, 0), den: LaurentPoly::one() }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        Scalar { num: p, den: LaurentPoly::one() }
    }

    /// `v^e = q^(e/2)`.
    pub fn v_pow(e: i32) -> Self {
        Scalar::from_poly(LaurentPoly::monomial(Rational::one(), e))
    }

    /// `q^e`.
    pub fn q_pow(e: i32) -> Self {
        Self::v_pow(2 * e)
    }

    /// Builds `num / den`, reducing to canonical form.
    pub fn fraction(num: LaurentPoly, den: LaurentPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(mut num: LaurentPoly, mut den: LaurentPoly) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero();
        }
        num.low -= den.low;
        den.low = 0;
        if den.coeffs.len() > 1 {
            let g = poly_gcd(&num.coeffs, &den.coeffs);
            if g.len() > 1 {
                let (qn, rn) = poly_divrem(&num.coeffs, &g);
                let (qd, rd) = poly_divrem(&den.coeffs, &g);
                debug_assert!(rn.is_empty() && rd.is_empty());
                num = LaurentPoly::from_dense(num.low, qn);
                den = LaurentPoly::from_dense(0, qd);
            }
        }
        let c = den.coeffs[0].clone();
        if !c.is_one() {
            let inv = c.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Scalar { num, den }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// Multiplication by `v^e`, which never needs renormalisation.
    pub fn mul_v_pow(&self, e: i32) -> Self {
        Scalar { num: self.num.shift(e), den: self.den.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut out = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// The field automorphism `v -> v^-1`.
    pub fn bar(&self) -> Self {
        Self::normalize(self.num.bar(), self.den.bar())
    }

    /// True iff the scalar lies in `q Z[q]`.
    pub fn is_in_qzq(&self) -> bool {
        self.is_in_zq_laurent() && self.num.low_exp().is_none_or(|lo| lo >= 2)
    }

    /// True iff the scalar lies in `Z[q, q^-1]`.
    pub fn is_in_zq_laurent(&self) -> bool {
        self.den.is_one() && self.num.has_integer_coeffs() && self.num.terms().all(|(e, _)| e % 2 == 0)
    }

    /// True iff every coefficient of the Laurent polynomial is nonnegative.
    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.den.is_one() && self.num.terms().all(|(_, c)| !c.is_negative())
    }

    /// Rendering used in the text grammar, e.g. `q^(1/2)/(1 - q^2)`.
    pub fn to_q_string(&self) -> String {
        let num = poly_to_q_string(&self.num);
        if self.den.is_one() {
            return num;
        }
        let den = poly_to_q_string(&self.den);
        if self.num.term_count() > 1 {
            format!("({})/({})", num, den)
        } else {
            format!("{}/({})", num, den)
        }
    }

    /// True when the printed form needs parentheses inside a product.
    pub fn is_compound(&self) -> bool {
        self.num.term_count() > 1
    }
}

fn q_power_string(exp: i32) -> String {
    if exp % 2 == 0 {
        match exp / 2 {
            1 => "q".to_string(),
            k => format!("q^{}", k),
        }
    } else {
        format!("q^({}/2)", exp)
    }
}

fn rational_string(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn poly_to_q_string(p: &LaurentPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in p.terms().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        let body = if e == 0 {
            rational_string(&mag)
        } else if mag.is_one() {
            q_power_string(e)
        } else {
            format!("{}*{}", rational_string(&mag), q_power_string(e))
        };
        match (k, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    out
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&poly_to_q_string(self))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_q_string())
    }
}

// Total order on canonical forms; only used for deterministic sorting.
impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.to_q_string().cmp(&other.to_q_string())
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            if self.den.is_one() {
                return Scalar { num: &self.num + &rhs.num, den: LaurentPoly::one() };
            }
            return Scalar::normalize(&self.num + &rhs.num, self.den.clone());
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        Scalar::normalize(num, &self.den * &rhs.den)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Scalar { num: &self.num * &rhs.num, den: LaurentPoly::one() };
        }
        if rhs.num.is_monomial() && rhs.den.is_one() {
            return Scalar { num: &self.num * &rhs.num, den: self.den.clone() };
        }
        if self.num.is_monomial() && self.den.is_one() {
            return Scalar { num: &self.num * &rhs.num, den: rhs.den.clone() };
        }
        Scalar::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

/// `[n]_{q^d} = (q^{dn} - q^{-dn}) / (q^d - q^{-d})`.
pub fn q_int(n: i64, d: u32) -> Scalar {
    let sign = if n < 0 { -1 } else { 1 };
    let n = n.abs();
    let d = d as i64;
    let terms = (0..n).map(|k| ((2 * d * (n - 1 - 2 * k)) as i32, rat(sign)));
    Scalar::from_poly(LaurentPoly::from_terms(terms))
}

/// `[n]_{q^d}! = [1][2]...[n]`.
pub fn q_factorial(n: i64, d: u32) -> Result<Scalar> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("q_factorial of negative n = {}", n)));
    }
    Ok((1..=n).fold(Scalar::one(), |acc, k| &acc * &q_int(k, d)))
}

/// Gaussian binomial `[m choose n]_{q^d}` for `m >= n >= 0`.
pub fn q_binom(m: i64, n: i64, d: u32) -> Result<Scalar> {
    if n < 0 || m < n {
        return Err(Error::InvalidArgument(format!("q_binom requires m >= n >= 0, got ({}, {})", m, n)));
    }
    // q-Pascal: [m, n] = q^{-dn} [m-1, n] + q^{d(m-n)} [m-1, n-1]
    let mut row = vec![Scalar::one()];
    for mm in 1..=m {
        let mut next = Vec::with_capacity(row.len() + 1);
        for nn in 0..=mm {
            let mut s = Scalar::zero();
            if nn < mm {
                s += &row[nn as usize].mul_v_pow(-2 * d as i32 * nn as i32);
            }
            if nn > 0 {
                s += &row[nn as usize - 1].mul_v_pow(2 * d as i32 * (mm - nn) as i32);
            }
            next.push(s);
        }
        row = next;
    }
    Ok(row[n as usize].clone())
}
