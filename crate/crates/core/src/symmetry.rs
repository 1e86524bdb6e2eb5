//! (Anti-)automorphisms of the algebra and the braid symmetries `T_i`, `T_i^*`.

use crate::algebra::{Algebra, Element, Gen, ImageKind};
use crate::cartan::{BraidLetter, BraidWord};
use crate::error::Result;
use crate::scalar::Scalar;

impl Algebra {
    /// Applies an anti-homomorphism given on letters, then renormalises.
    fn anti_map(&self, x: &Element, letter: impl Fn(Gen) -> Gen, scalar: impl Fn(&Scalar) -> Scalar) -> Result<Element> {
        let words: Vec<(Vec<Gen>, Scalar)> =
            x.terms().map(|(m, c)| (m.letters().iter().rev().map(|&g| letter(g)).collect(), scalar(c))).collect();
        self.normal_form(&words)
    }

    /// The k-linear anti-automorphism `f_{i,p} -> f_{i,-p}`.
    pub fn star(&self, x: &Element) -> Result<Element> {
        self.anti_map(x, |g| Gen { node: g.node, level: -g.level }, |c| c.clone())
    }

    /// The k-linear automorphism `f_{i,p} -> f_{i,p+1}`.
    pub fn dbar(&self, x: &Element) -> Element {
        x.shift_levels(1)
    }

    /// The Q-linear anti-automorphism `f_{i,p} -> f_{i,p+1}` that bars scalars.
    pub fn d_anti(&self, x: &Element) -> Result<Element> {
        self.anti_map(x, |g| Gen { node: g.node, level: g.level + 1 }, |c| c.bar())
    }

    /// The bar involution: Q-linear anti-automorphism fixing every `f_{i,p}`.
    pub fn bar_elem(&self, x: &Element) -> Result<Element> {
        self.anti_map(x, |g| g, |c| c.bar())
    }

    /// `c(x) = q^{N(wt x)} bar(x)` on each weight component.
    pub fn c_map(&self, x: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (w, comp) in self.homogeneous_components(x) {
            let n = self.datum().n_func(&w) as i32;
            out = out.add(&self.bar_elem(&comp)?.scale(&Scalar::q_pow(n)));
        }
        Ok(out)
    }

    /// `sigma(x) = q^{-N(wt x)/2} x` on each weight component.
    pub fn sigma(&self, x: &Element) -> Element {
        let mut out = Element::zero();
        for (w, comp) in self.homogeneous_components(x) {
            let n = self.datum().n_func(&w) as i32;
            out = out.add(&comp.scale(&Scalar::v_pow(-n)));
        }
        out
    }

    /// Image of `f_{j,0}` under `T_i` or `T_i^*`.
    fn braid_image(&self, kind: ImageKind, i: usize, j: usize) -> Result<std::sync::Arc<Element>> {
        if let Some(e) = self.cached_image((kind, i, j)) {
            return Ok(e);
        }
        let image = if i == j {
            let level = if kind == ImageKind::T { 1 } else { -1 };
            self.gen(i, level)?
        } else {
            let total = -self.datum().c(i, j);
            let minus_qi = -Scalar::q_pow(self.datum().d(i) as i32);
            let fj = self.gen(j, 0)?;
            let mut acc = Element::zero();
            for r in 0..=total {
                let s = total - r;
                let sign_exp = if kind == ImageKind::T { s } else { r };
                let left = self.divided_power_f(i, 0, r)?;
                let right = self.divided_power_f(i, 0, s)?;
                let term = self.multiply_all(&[&left, &fj, &right])?;
                acc = acc.add(&term.scale(&minus_qi.pow(sign_exp as i32)?));
            }
            acc
        };
        Ok(self.store_image((kind, i, j), image))
    }

    fn apply_letter_map(&self, kind: ImageKind, i: usize, x: &Element) -> Result<Element> {
        self.datum().check_node(i)?;
        let mut out = Element::zero();
        for (m, c) in x.terms() {
            let mut acc = Element::scalar(c.clone());
            for g in m.letters() {
                let image = self.braid_image(kind, i, g.node as usize)?.shift_levels(g.level);
                acc = self.multiply(&acc, &image)?;
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// The braid symmetry `T_i`.
    pub fn t_i(&self, i: usize, x: &Element) -> Result<Element> {
        self.apply_letter_map(ImageKind::T, i, x)
    }

    /// The inverse braid symmetry `T_i^*`.
    pub fn t_i_star(&self, i: usize, x: &Element) -> Result<Element> {
        self.apply_letter_map(ImageKind::TStar, i, x)
    }

    pub fn apply_letter(&self, letter: BraidLetter, x: &Element) -> Result<Element> {
        if letter.inverse {
            self.t_i_star(letter.node, x)
        } else {
            self.t_i(letter.node, x)
        }
    }

    /// `T_b = T_{i_1} ... T_{i_r}`: the rightmost letter acts first.
    pub fn apply_braid(&self, word: &BraidWord, x: &Element) -> Result<Element> {
        let mut cur = x.clone();
        for &letter in word.0.iter().rev() {
            cur = self.apply_letter(letter, &cur)?;
        }
        Ok(cur)
    }

    /// The inverse of `T_b`, i.e. `T_{b^rev}^*`.
    pub fn apply_braid_inverse(&self, word: &BraidWord, x: &Element) -> Result<Element> {
        let inverse = BraidWord(
            word.0.iter().rev().map(|l| BraidLetter { node: l.node, inverse: !l.inverse }).collect(),
        );
        self.apply_braid(&inverse, x)
    }
}
