//! Text grammar for elements.
//!
//! ```text
//! expr     := ['+'|'-'] term (('+'|'-') term)*
//! term     := unary (('*'|'/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)*
//! exponent := ['-'] INT | '(' ['-'] INT ['/' INT] ')'
//! atom     := INT | 'q' | 'v' | 'f[' INT ',' INT ']' | 'F[' INT ',' INT ']' | '(' expr ')'
//! ```
//!
//! `v` is `q^(1/2)`. `F[i,m]^(r)` is a divided power. Fractional exponents are
//! only allowed on `q` and `v`; division and negative powers only by scalars.
//! Nodes are 1-based.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::algebra::{Algebra, Element};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    /// `v^k`.
    VPow(i32),
    Gen { node: i64, level: i64, pos: usize },
    Divided { node: i64, level: i64, power: i64, pos: usize },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>, usize),
    Pow(Box<Expr>, i64, usize),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.pos, format!("expected '{}'", c as char)))
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(syntax(start, "expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digits parse"))
    }

    fn small_int(&mut self) -> Result<i64> {
        let pos = self.pos;
        let neg = self.eat(b'-');
        let n = self.int()?;
        let n = n.to_i64().ok_or_else(|| syntax(pos, "integer out of range"))?;
        Ok(if neg { -n } else { n })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = if self.eat(b'-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.peek() == Some(b'/') {
                let pos = self.pos;
                self.pos += 1;
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?), pos);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            let pos = self.pos;
            self.pos += 1;
            let (num, den) = self.exponent()?;
            base = match base {
                Expr::VPow(k) => {
                    let scaled = k as i64 * num / den;
                    if (k as i64 * num) % den != 0 {
                        return Err(syntax(pos, "exponent must give a power of q^(1/2)"));
                    }
                    Expr::VPow(i32::try_from(scaled).map_err(|_| syntax(pos, "exponent out of range"))?)
                }
                Expr::Divided { node, level, power: 1, pos: p } if den == 1 && num >= 0 => {
                    Expr::Divided { node, level, power: num, pos: p }
                }
                other => {
                    if den != 1 {
                        return Err(syntax(pos, "fractional exponents are only allowed on q and v"));
                    }
                    Expr::Pow(Box::new(other), num, pos)
                }
            };
        }
        Ok(base)
    }

    /// Returns the exponent as `(num, den)`.
    fn exponent(&mut self) -> Result<(i64, i64)> {
        if self.eat(b'(') {
            let num = self.small_int()?;
            let den = if self.eat(b'/') {
                let pos = self.pos;
                let d = self.small_int()?;
                if d <= 0 {
                    return Err(syntax(pos, "denominator must be positive"));
                }
                d
            } else {
                1
            };
            self.expect(b')')?;
            Ok((num, den))
        } else {
            Ok((self.small_int()?, 1))
        }
    }

    fn gen_index(&mut self) -> Result<(i64, i64)> {
        self.expect(b'[')?;
        let node = self.small_int()?;
        self.expect(b',')?;
        let level = self.small_int()?;
        self.expect(b']')?;
        Ok((node, level))
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = {
            self.skip_ws();
            self.pos
        };
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.int()?)),
            Some(b'q') => {
                self.pos += 1;
                Ok(Expr::VPow(2))
            }
            Some(b'v') => {
                self.pos += 1;
                Ok(Expr::VPow(1))
            }
            Some(b'f') => {
                self.pos += 1;
                let (node, level) = self.gen_index()?;
                Ok(Expr::Gen { node, level, pos })
            }
            Some(b'F') => {
                self.pos += 1;
                let (node, level) = self.gen_index()?;
                Ok(Expr::Divided { node, level, power: 1, pos })
            }
            Some(c) => Err(syntax(pos, format!("unexpected character '{}'", c as char))),
            None => Err(syntax(pos, "unexpected end of input")),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(syntax(p.pos, "trailing input"));
    }
    Ok(e)
}

fn node_index(alg: &Algebra, node: i64) -> Result<usize> {
    if node < 1 || node as usize > alg.rank() {
        return Err(Error::UnknownNode(node.max(0) as usize));
    }
    Ok(node as usize - 1)
}

fn level(l: i64, pos: usize) -> Result<i32> {
    i32::try_from(l).map_err(|_| syntax(pos, "level out of range"))
}

fn as_scalar(e: &Element) -> Option<Scalar> {
    match e.len() {
        0 => Some(Scalar::zero()),
        1 => {
            let (m, c) = e.terms().next().expect("one term");
            m.is_one().then(|| c.clone())
        }
        _ => None,
    }
}

/// Evaluates an expression in the algebra; the result is in normal form.
pub fn eval(alg: &Algebra, e: &Expr) -> Result<Element> {
    Ok(match e {
        Expr::Int(n) => Element::scalar(Scalar::from_rational(Rational::from_integer(n.clone()))),
        Expr::VPow(k) => Element::scalar(Scalar::v_pow(*k)),
        Expr::Gen { node, level: l, pos } => alg.gen(node_index(alg, *node)?, level(*l, *pos)?)?,
        Expr::Divided { node, level: l, power, pos } => {
            alg.divided_power_f(node_index(alg, *node)?, level(*l, *pos)?, *power)?
        }
        Expr::Neg(a) => eval(alg, a)?.neg(),
        Expr::Add(a, b) => eval(alg, a)?.add(&eval(alg, b)?),
        Expr::Sub(a, b) => eval(alg, a)?.sub(&eval(alg, b)?),
        Expr::Mul(a, b) => alg.multiply(&eval(alg, a)?, &eval(alg, b)?)?,
        Expr::Div(a, b, pos) => {
            let d = as_scalar(&eval(alg, b)?).ok_or_else(|| syntax(*pos, "can only divide by a scalar"))?;
            eval(alg, a)?.scale(&d.inv()?)
        }
        Expr::Pow(a, n, pos) => {
            let base = eval(alg, a)?;
            if *n < 0 {
                let s = as_scalar(&base).ok_or_else(|| syntax(*pos, "negative powers need a scalar base"))?;
                Element::scalar(s.pow(*n as i32)?)
            } else {
                alg.pow(&base, *n as u32)?
            }
        }
    })
}

/// Evaluates an expression that contains no generators.
pub fn eval_scalar(e: &Expr) -> Result<Scalar> {
    Ok(match e {
        Expr::Int(n) => Scalar::from_rational(Rational::from_integer(n.clone())),
        Expr::VPow(k) => Scalar::v_pow(*k),
        Expr::Gen { pos, .. } | Expr::Divided { pos, .. } => {
            return Err(syntax(*pos, "generators are not allowed in a scalar"))
        }
        Expr::Neg(a) => -eval_scalar(a)?,
        Expr::Add(a, b) => &eval_scalar(a)? + &eval_scalar(b)?,
        Expr::Sub(a, b) => &eval_scalar(a)? - &eval_scalar(b)?,
        Expr::Mul(a, b) => &eval_scalar(a)? * &eval_scalar(b)?,
        Expr::Div(a, b, _) => eval_scalar(a)?.checked_div(&eval_scalar(b)?)?,
        Expr::Pow(a, n, _) => {
            if n.abs() > i32::MAX as i64 {
                return Err(Error::InvalidArgument("exponent out of range".into()));
            }
            eval_scalar(a)?.pow(*n as i32)?
        }
    })
}

pub fn parse_element(alg: &Algebra, text: &str) -> Result<Element> {
    eval(alg, &parse_expr(text)?)
}

pub fn parse_scalar(text: &str) -> Result<Scalar> {
    eval_scalar(&parse_expr(text)?)
}

/// Canonical text of an element; `parse_element` inverts it.
pub fn print_element(x: &Element) -> String {
    x.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;

    fn a2() -> Algebra {
        Algebra::new(CartanDatum::preset("A2").unwrap())
    }

    #[test]
    fn boson_product() {
        let a = a2();
        let x = parse_element(&a, "f[1,0]*f[1,1]").unwrap();
        assert_eq!(x.to_string(), "q^2*f[1,1]*f[1,0] + (1 - q^2)");
        assert_eq!(parse_element(&a, &x.to_string()).unwrap(), x);
    }

    #[test]
    fn scalars_and_generators() {
        let a = a2();
        assert_eq!(parse_element(&a, "q^(1/2)*f[1,0]").unwrap(), a.phi_gen(0, 0).unwrap());
        assert_eq!(parse_element(&a, "v*f[1,0]").unwrap(), a.phi_gen(0, 0).unwrap());
        assert!(parse_element(&a, "f[1,0] - f[1,0]").unwrap().is_zero());
        assert_eq!(parse_element(&a, "0").unwrap().to_string(), "0");
        assert_eq!(parse_scalar("q^(1/2)/(1 - q^2)").unwrap().to_q_string(), "q^(1/2)/(1 - q^2)");
        assert_eq!(parse_scalar("(1-q^2)^-1*q^(1/2)").unwrap(), parse_scalar("q^(1/2)/(1 - q^2)").unwrap());
        assert_eq!(parse_scalar("q^-1 + 3/2").unwrap(), &Scalar::q_pow(-1) + &parse_scalar("3/2").unwrap());
        assert_eq!(parse_element(&a, "F[1,0]^(2)").unwrap(), a.divided_power_f(0, 0, 2).unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let a = a2();
        assert!(matches!(parse_element(&a, "f[1,0] * * f[2,0]"), Err(Error::Syntax { pos: 9, .. })));
        assert!(matches!(parse_element(&a, "f[1,0"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_element(&a, "f[3,0]"), Err(Error::UnknownNode(3))));
        assert!(matches!(parse_element(&a, "f[1,0]/f[2,0]"), Err(Error::Syntax { pos: 6, .. })));
        assert!(matches!(parse_element(&a, "f[1,0]^(1/2)"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_element(&a, "1/0"), Err(Error::DivisionByZero)));
        assert!(parse_scalar("f[1,0]").is_err());
        assert!(matches!(parse_element(&a, "2 3"), Err(Error::Syntax { pos: 2, .. })));
    }
}
