//! The projection `M`, the bilinear forms and the embeddings `phi_m`.

use crate::algebra::{Algebra, Element, Gen, Monomial};
use crate::error::Result;
use crate::scalar::Scalar;

/// A symbol of the dual PBW-type generators: `<i>` or `<i^n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AngPower {
    pub node: usize,
    pub exp: u32,
}

impl Algebra {
    /// Coefficient of the empty monomial.
    pub fn m_project(&self, x: &Element) -> Scalar {
        x.constant_term()
    }

    /// `<<x, y>> = M(x dbar(y))`.
    pub fn hform(&self, x: &Element, y: &Element) -> Result<Scalar> {
        let mut total = Scalar::zero();
        let ys = self.homogeneous_components(y);
        for (w, xc) in self.homogeneous_components(x) {
            if let Some(yc) = ys.get(&w) {
                total += &self.constant_of_product(&xc, &self.dbar(yc))?;
            }
        }
        Ok(total)
    }

    /// `((x, y)) = q^{-N(wt x)} <<x, y>>` on matching weight components.
    pub fn pair(&self, x: &Element, y: &Element) -> Result<Scalar> {
        let mut total = Scalar::zero();
        let ys = self.homogeneous_components(y);
        for (w, xc) in self.homogeneous_components(x) {
            if let Some(yc) = ys.get(&w) {
                let n = self.datum().n_func(&w) as i32;
                total += &self.constant_of_product(&xc, &self.dbar(yc))?.mul_v_pow(-2 * n);
            }
        }
        Ok(total)
    }

    fn constant_of_product(&self, x: &Element, y: &Element) -> Result<Scalar> {
        Ok(self.multiply(x, y)?.constant_term())
    }

    /// `phi_m(<i>) = q_i^{1/2} f_{i,m}`.
    pub fn phi_gen(&self, m: i32, i: usize) -> Result<Element> {
        Ok(self.gen(i, m)?.scale(&Scalar::v_pow(self.datum().d(i) as i32)))
    }

    /// `phi_m(<i^n>) = q_i^{n^2/2} f_{i,m}^n`.
    pub fn phi_power(&self, m: i32, i: usize, n: u32) -> Result<Element> {
        self.datum().check_node(i)?;
        let d = self.datum().d(i) as i32;
        let word = Monomial(vec![Gen::new(i, m); n as usize]);
        Ok(Element::monomial(word, Scalar::v_pow(d * (n * n) as i32)))
    }

    /// `phi_m` of a linear combination of products of `<i^n>` symbols.
    pub fn phi(&self, m: i32, expr: &[(Vec<AngPower>, Scalar)]) -> Result<Element> {
        let mut out = Element::zero();
        for (factors, c) in expr {
            let mut acc = Element::scalar(c.clone());
            for f in factors {
                acc = self.multiply(&acc, &self.phi_power(m, f.node, f.exp)?)?;
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// `phi_m(<ij>)` with `<ij> = (<i><j> - q^{-(a_i,a_j)} <j><i>) / (1 - q^{-2(a_i,a_j)})`,
    /// defined when `(a_i, a_j) < 0`.
    pub fn phi_ij(&self, m: i32, i: usize, j: usize) -> Result<Element> {
        let e = self.datum().simple_form(i, j) as i32;
        if e >= 0 {
            return Err(crate::Error::InvalidArgument(format!(
                "<{}{}> needs (alpha_{}, alpha_{}) < 0",
                i + 1,
                j + 1,
                i + 1,
                j + 1
            )));
        }
        let one = |node| AngPower { node, exp: 1 };
        let den = &Scalar::one() - &Scalar::q_pow(-2 * e);
        let expr = vec![
            (vec![one(i), one(j)], den.inv()?),
            (vec![one(j), one(i)], -&Scalar::q_pow(-e).checked_div(&den)?),
        ];
        self.phi(m, &expr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;

    fn alg(name: &str) -> Algebra {
        Algebra::new(CartanDatum::preset(name).unwrap())
    }

    fn prod(d: u32, n: u32) -> Scalar {
        let mut p = Scalar::one();
        for k in 1..=n {
            p *= &(&Scalar::one() - &Scalar::q_pow((2 * k * d) as i32));
        }
        p
    }

    #[test]
    fn projection() {
        let a = alg("A1");
        assert!(a.m_project(&Element::one()).is_one());
        assert!(a.m_project(&a.gen(0, 0).unwrap()).is_zero());
        let x = a.multiply(&a.gen(0, 0).unwrap(), &a.gen(0, 1).unwrap()).unwrap();
        assert_eq!(a.m_project(&x), a.zeta(0));
    }

    #[test]
    fn values_on_powers() {
        let a = alg("B2");
        for i in 0..2 {
            let d = a.datum().d(i);
            for n in 0..4u32 {
                let x = a.pow(&a.gen(i, 1).unwrap(), n).unwrap();
                assert_eq!(a.hform(&x, &x).unwrap(), prod(d, n));
                assert_eq!(a.pair(&x, &x).unwrap(), prod(d, n).mul_v_pow(-2 * (d * n * n) as i32));
            }
        }
        let a2 = alg("A2");
        assert!(a2.hform(&a2.gen(0, 0).unwrap(), &a2.gen(1, 0).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn pair_on_generators() {
        let a = alg("A1");
        let f = a.gen(0, 0).unwrap();
        assert_eq!(a.pair(&f, &f).unwrap(), &Scalar::q_pow(-1) - &Scalar::q_pow(1));
        let p = a.phi_gen(0, 0).unwrap();
        assert_eq!(a.pair(&p, &p).unwrap(), a.zeta(0));
    }

    #[test]
    fn phi_values() {
        let a = alg("A1");
        let x = a.phi_power(2, 0, 2).unwrap();
        assert_eq!(x, a.pow(&a.gen(0, 2).unwrap(), 2).unwrap().scale(&Scalar::q_pow(2)));
        let as_product = a.phi(2, &[(vec![AngPower { node: 0, exp: 1 }; 2], Scalar::q_pow(1))]).unwrap();
        assert_eq!(as_product, x);
    }

    #[test]
    fn pair_of_two_letter_symbol() {
        for name in ["A2", "B2", "G2"] {
            let a = alg(name);
            let x = a.phi_ij(0, 0, 1).unwrap();
            let e = a.datum().simple_form(0, 1) as i32;
            let expected = (&a.zeta(0) * &a.zeta(1))
                .checked_div(&(&Scalar::one() - &Scalar::q_pow(-2 * e)))
                .unwrap();
            assert_eq!(a.pair(&x, &x).unwrap(), expected, "{}", name);
        }
    }
}
