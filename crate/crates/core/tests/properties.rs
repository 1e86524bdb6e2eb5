use proptest::prelude::*;

use bosonic::algebra::{Gen, Monomial};
use bosonic::cartan::{BraidLetter, BraidWord};
use bosonic::linalg::determinant;
use bosonic::pbw::CuspidalSet;
use bosonic::scalar::q_int;
use bosonic::{Algebra, CartanDatum, Element, RootVector, Scalar};

type Terms = Vec<(Vec<(usize, i32)>, (i64, i32))>;

fn alg(name: &str) -> Algebra {
    Algebra::new(CartanDatum::preset(name).unwrap())
}

fn coeff() -> impl Strategy<Value = (i64, i32)> {
    ((-3i64..=3).prop_filter("nonzero", |c| *c != 0), -3i32..=3)
}

fn word(rank: usize, lo: i32, hi: i32, max_len: usize) -> impl Strategy<Value = Vec<(usize, i32)>> {
    prop::collection::vec((0..rank, lo..=hi), 0..=max_len)
}

fn terms(rank: usize, lo: i32, hi: i32, max_len: usize, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((word(rank, lo, hi, max_len), coeff()), 1..=max_terms)
}

fn build(a: &Algebra, t: &Terms) -> Element {
    let words: Vec<(Vec<Gen>, Scalar)> = t
        .iter()
        .map(|(w, (c, e))| (w.iter().map(|&(i, m)| Gen::new(i, m)).collect(), Scalar::from_int(*c).mul_v_pow(*e)))
        .collect();
    a.normal_form(&words).unwrap()
}

fn word_elem(a: &Algebra, w: &[(usize, i32)]) -> Element {
    build(a, &vec![(w.to_vec(), (1, 0))])
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (prop::collection::vec((-3i64..=3, -4i32..=4), 0..4), 0usize..4).prop_map(|(num, den)| {
        let mut x = Scalar::zero();
        for (c, e) in num {
            x += &Scalar::from_int(c).mul_v_pow(e);
        }
        let d = match den {
            0 => Scalar::one(),
            1 => &Scalar::one() - &Scalar::q_pow(2),
            2 => &Scalar::one() + &Scalar::v_pow(1),
            _ => &Scalar::from_int(2) - &Scalar::q_pow(-1),
        };
        x.checked_div(&d).unwrap()
    })
}

fn preset() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["A2", "B2"])
}

fn fast() -> ProptestConfig {
    ProptestConfig::with_cases(32)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scalar_field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn bar_is_a_ring_involution(a in scalar(), b in scalar()) {
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
        prop_assert_eq!(a.bar().bar(), a);
    }

    #[test]
    fn normalisation_is_unique(a in scalar(), b in scalar()) {
        prop_assume!(!b.is_zero());
        let back = (&a * &b).checked_div(&b).unwrap();
        prop_assert_eq!(back.to_q_string(), a.to_q_string());
        prop_assert_eq!(back.numerator(), a.numerator());
        prop_assert_eq!(back.denominator(), a.denominator());
    }

    #[test]
    fn q_integer_identity(n in -12i64..=12, d in 1u32..=3) {
        let lhs = &q_int(n, d) * &(&Scalar::q_pow(d as i32) - &Scalar::q_pow(-(d as i32)));
        let rhs = &Scalar::q_pow(n as i32 * d as i32) - &Scalar::q_pow(-(n as i32) * d as i32);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn norm_is_reflection_invariant(name in prop::sample::select(CartanDatum::PRESETS.to_vec()), v in prop::collection::vec(-3i64..=3, 3)) {
        let d = CartanDatum::preset(name).unwrap();
        let a = RootVector(v[..d.rank()].to_vec());
        for i in d.nodes() {
            let mut s = a.clone();
            let pairing: i64 = d.nodes().map(|j| d.c(i, j) * a.0[j]).sum();
            s.0[i] -= pairing;
            prop_assert_eq!(d.n_func(&s), d.n_func(&a));
            prop_assert_eq!(d.reflect(i, &a), s);
        }
        for i in d.nodes() {
            let n2 = d.n_func_doubled(&RootVector::simple(d.rank(), i).scale(v[0]));
            prop_assert!(n2 >= 0 && n2 % 2 == 0);
            for j in d.nodes() {
                prop_assert_eq!(d.simple_form(i, j), d.simple_form(j, i));
                prop_assert_eq!(d.simple_form(i, j), d.d(i) as i64 * d.c(i, j));
            }
        }
    }

    #[test]
    fn reverse_is_an_anti_homomorphism(x in prop::collection::vec((0usize..2, any::<bool>()), 0..6), y in prop::collection::vec((0usize..2, any::<bool>()), 0..6)) {
        let mk = |v: &[(usize, bool)]| BraidWord(v.iter().map(|&(node, inverse)| BraidLetter { node, inverse }).collect());
        let (a, b) = (mk(&x), mk(&y));
        prop_assert_eq!(a.reverse().reverse(), a.clone());
        prop_assert_eq!(a.concat(&b).reverse(), b.reverse().concat(&a.reverse()));
    }
}

proptest! {
    #![proptest_config(fast())]

    #[test]
    fn multiplication_is_associative(name in preset(), x in terms(2, -1, 1, 2, 2), y in terms(2, -1, 1, 2, 2), z in terms(2, -1, 1, 2, 2)) {
        let a = alg(name);
        let (x, y, z) = (build(&a, &x), build(&a, &y), build(&a, &z));
        let left = a.multiply(&a.multiply(&x, &y).unwrap(), &z).unwrap();
        let right = a.multiply(&x, &a.multiply(&y, &z).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert_eq!(a.multiply(&Element::one(), &x).unwrap(), x.clone());
        prop_assert_eq!(a.multiply(&x, &Element::one()).unwrap(), x);
    }

    #[test]
    fn leibniz_rules(name in preset(), x in word(2, -1, 1, 2), y in word(2, -1, 1, 2), z in word(2, -1, 1, 2)) {
        let a = alg(name);
        let (x, y, z) = (word_elem(&a, &x), word_elem(&a, &y), word_elem(&a, &z));
        let rank = a.rank();
        let (wx, wy, wz) = (x.weight(rank).unwrap(), y.weight(rank).unwrap(), z.weight(rank).unwrap());
        let form = |p: &RootVector, q: &RootVector| Scalar::q_pow(-(a.datum().form(p, q) as i32));
        let m = |p: &Element, q: &Element| a.multiply(p, q).unwrap();
        let yz = m(&y, &z);
        let lhs = a.q_commutator(&x, &yz).unwrap();
        let rhs = m(&a.q_commutator(&x, &y).unwrap(), &z).add(&m(&y, &a.q_commutator(&x, &z).unwrap()).scale(&form(&wx, &wy)));
        prop_assert_eq!(lhs, rhs);
        let xy = m(&x, &y);
        let lhs = a.q_commutator(&xy, &z).unwrap();
        let rhs = m(&x, &a.q_commutator(&y, &z).unwrap()).add(&m(&a.q_commutator(&x, &z).unwrap(), &y).scale(&form(&wy, &wz)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn separated_levels_concatenate(name in preset(), x in terms(2, 1, 2, 3, 3), y in terms(2, -1, 0, 3, 3)) {
        let a = alg(name);
        let (x, y) = (build(&a, &x), build(&a, &y));
        let mut expected = Element::zero();
        for (mx, cx) in x.terms() {
            for (my, cy) in y.terms() {
                let w = Monomial(mx.letters().iter().chain(my.letters()).copied().collect());
                prop_assert!(expected.coeff(&w).is_zero());
                expected.add_term(w, &(cx * cy));
            }
        }
        prop_assert_eq!(a.multiply(&x, &y).unwrap(), expected);
    }

    #[test]
    fn braid_symmetries_commute_with_involutions(name in preset(), x in terms(2, -1, 1, 3, 2), i in 0usize..2) {
        let a = alg(name);
        let x = build(&a, &x);
        let t = |y: &Element| a.t_i(i, y).unwrap();
        prop_assert_eq!(a.dbar(&t(&x)), t(&a.dbar(&x)));
        prop_assert_eq!(a.star(&t(&a.star(&x).unwrap())).unwrap(), a.t_i_star(i, &x).unwrap());
        prop_assert_eq!(t(&a.bar_elem(&x).unwrap()), a.bar_elem(&t(&x)).unwrap());
        prop_assert_eq!(t(&a.c_map(&x).unwrap()), a.c_map(&t(&x)).unwrap());
    }

    #[test]
    fn braid_symmetries_twist_weights_and_windows(name in preset(), w in word(2, -1, 1, 4), i in 0usize..2) {
        let a = alg(name);
        let x = word_elem(&a, &w);
        prop_assume!(!x.is_zero());
        let tx = a.t_i(i, &x).unwrap();
        let wt = x.weight(a.rank()).unwrap();
        prop_assert_eq!(tx.weight(a.rank()).unwrap(), a.datum().reflect(i, &wt));
        if !w.is_empty() {
            let lo = w.iter().map(|g| g.1).min().unwrap();
            let hi = w.iter().map(|g| g.1).max().unwrap();
            prop_assert!(tx.in_window(lo, hi + 1));
            prop_assert!(a.t_i_star(i, &x).unwrap().in_window(lo - 1, hi));
        }
    }

    #[test]
    fn twist_is_an_involution(x in terms(2, 0, 2, 3, 2)) {
        let a = alg("A2");
        let x = build(&a, &x);
        let b = BraidWord::positive(&[0, 1, 0]);
        let back = a.twist(&b.reverse(), &a.twist(&b, &x).unwrap()).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn form_symmetry_and_adjunctions(name in preset(), x in terms(2, -1, 1, 2, 2), y in terms(2, -1, 1, 3, 2), i in 0usize..2, m in -1i32..=1) {
        let a = alg(name);
        let (x, y) = (build(&a, &x), build(&a, &y));
        let h = |p: &Element, q: &Element| a.hform(p, q).unwrap();
        let mul = |p: &Element, q: &Element| a.multiply(p, q).unwrap();
        let g = |lvl: i32| a.gen(i, lvl).unwrap();
        prop_assert_eq!(h(&x, &y), h(&y, &x));
        prop_assert_eq!(h(&mul(&g(m), &x), &y), h(&x, &mul(&y, &g(m + 1))));
        prop_assert_eq!(h(&mul(&x, &g(m)), &y), h(&x, &mul(&g(m - 1), &y)));
        prop_assert_eq!(h(&a.dbar(&x), &a.dbar(&y)), h(&x, &y));
        prop_assert_eq!(h(&a.star(&y).unwrap(), &a.star(&x).unwrap()), h(&x, &y));
    }

    #[test]
    fn e_operators_are_adjoint(name in preset(), x in terms(2, -1, 0, 2, 2), y in terms(2, -1, 0, 3, 2), u in terms(2, 0, 1, 2, 2), v in terms(2, 0, 1, 3, 2), i in 0usize..2) {
        let a = alg(name);
        let m = 0;
        let (x, y, u, v) = (build(&a, &x), build(&a, &y), build(&a, &u), build(&a, &v));
        let f = a.gen(i, m).unwrap();
        prop_assert_eq!(
            a.hform(&a.multiply(&f, &x).unwrap(), &y).unwrap(),
            a.hform(&x, &a.e_op(i, m, &y).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.hform(&u, &a.multiply(&v, &f).unwrap()).unwrap(),
            a.hform(&a.e_star_op(i, m, &u).unwrap(), &v).unwrap()
        );
    }

    #[test]
    fn forms_factor_over_levels(name in preset(), d1 in prop::collection::vec(0usize..2, 0..3), d0 in prop::collection::vec(0usize..2, 0..3), seed in any::<u64>()) {
        let a = alg(name);
        let shuffle = |v: &[usize], s: u64| {
            let mut v = v.to_vec();
            let n = v.len();
            for k in 0..n {
                v.swap(k, (s.rotate_left(7 * k as u32) as usize) % n);
            }
            v
        };
        let at = |v: &[usize], lvl: i32| word_elem(&a, &v.iter().map(|&i| (i, lvl)).collect::<Vec<_>>());
        let (x1, x0) = (at(&d1, 1), at(&d0, 0));
        let (y1, y0) = (at(&shuffle(&d1, seed), 1), at(&shuffle(&d0, seed ^ 0x5555), 0));
        let x = a.multiply(&x1, &x0).unwrap();
        let y = a.multiply(&y1, &y0).unwrap();
        let w1 = x1.weight(a.rank()).unwrap();
        let w0 = x0.weight(a.rank()).unwrap();
        let twist = Scalar::q_pow(a.datum().form(&w1, &w0) as i32);
        let h = &twist * &(&a.hform(&x1, &y1).unwrap() * &a.hform(&x0, &y0).unwrap());
        prop_assert_eq!(a.hform(&x, &y).unwrap(), h);
        let p = &a.pair(&x1, &y1).unwrap() * &a.pair(&x0, &y0).unwrap();
        prop_assert_eq!(a.pair(&x, &y).unwrap(), p);
    }

    #[test]
    fn forms_are_braid_invariant(name in preset(), x in terms(2, -1, 1, 2, 2), y in terms(2, -1, 1, 2, 2), i in 0usize..2) {
        let a = alg(name);
        let (x, y) = (build(&a, &x), build(&a, &y));
        let (tx, ty) = (a.t_i(i, &x).unwrap(), a.t_i(i, &y).unwrap());
        prop_assert_eq!(a.hform(&tx, &ty).unwrap(), a.hform(&x, &y).unwrap());
        prop_assert_eq!(a.pair(&tx, &ty).unwrap(), a.pair(&x, &y).unwrap());
    }
}

#[test]
fn gram_matrices_are_nonsingular() {
    for name in ["A2", "B2"] {
        let a = alg(name);
        for fine in [
            vec![(0, vec![1, 1])],
            vec![(0, vec![2, 1])],
            vec![(0, vec![2, 2])],
            vec![(1, vec![1, 0]), (0, vec![1, 1])],
            vec![(2, vec![0, 1]), (1, vec![1, 1]), (0, vec![1, 0])],
        ] {
            let basis = a.canonical_monomials(&fine).unwrap();
            let elems: Vec<Element> = basis.iter().map(|m| Element::monomial(m.clone(), Scalar::one())).collect();
            let gram: Vec<Vec<Scalar>> =
                elems.iter().map(|x| elems.iter().map(|y| a.hform(x, y).unwrap()).collect()).collect();
            assert!(!determinant(gram).is_zero(), "{} {:?}", name, fine);
        }
    }
}

#[test]
fn pbw_span_is_closed_under_products() {
    let a = alg("A2");
    let set = CuspidalSet::new(&a, &[0, 1, 0]).unwrap();
    let idx = set.indices_up_to(3);
    for u in &idx {
        for v in &idx {
            if u.iter().sum::<u32>() + v.iter().sum::<u32>() > 3 {
                continue;
            }
            let p = a.multiply(&set.pbw_element(u).unwrap(), &set.pbw_element(v).unwrap()).unwrap();
            let e = set.pbw_expand(&p).unwrap();
            assert!(e.residual.is_zero(), "{:?} {:?}", u, v);
            assert_eq!(set.from_coords(&e.coords).unwrap(), p);
        }
    }
}

#[test]
fn pbw_span_does_not_depend_on_the_sequence() {
    for (name, s, t) in [("A2", vec![0, 1, 0], vec![1, 0, 1]), ("B2", vec![0, 1, 0, 1], vec![1, 0, 1, 0])] {
        let a = alg(name);
        assert!(bosonic::cartan::braid_equivalent(a.datum(), &s, &t).unwrap());
        let base = CuspidalSet::new(&a, &s).unwrap();
        let other = CuspidalSet::new(&a, &t).unwrap();
        for k in 1..=other.len() {
            let e = base.pbw_expand(other.cuspidal(k).unwrap()).unwrap();
            assert!(e.residual.is_zero(), "{} P'_{}", name, k);
        }
    }
}

#[test]
fn ls_support_is_interior() {
    let cases: [(&str, Vec<usize>); 7] = [
        ("A1", vec![0, 0, 0]),
        ("A2", vec![0, 1, 0]),
        ("B2", vec![0, 1, 0]),
        ("B2", vec![1, 0, 1]),
        ("G2", vec![0, 1, 0]),
        ("A3", vec![0, 1, 0]),
        ("A3", vec![0, 1, 2]),
    ];
    for (name, seq) in cases {
        let a = alg(name);
        let set = CuspidalSet::new(&a, &seq).unwrap();
        for k in 1..=seq.len() {
            for t in k + 1..=seq.len() {
                let e = set.ls_commutator(k, t).unwrap();
                assert!(e.residual.is_zero(), "{} {:?} ({},{})", name, seq, k, t);
                for (u, c) in &e.coords {
                    for (s, &x) in u.iter().enumerate() {
                        assert!(x == 0 || (k < s + 1 && s + 1 < t), "{} {:?} ({},{}) {:?}", name, seq, k, t, u);
                    }
                    assert!(c.is_in_zq_laurent());
                }
            }
        }
    }
}

#[test]
fn twist_sends_cuspidals_to_reversed_images() {
    for (name, seq) in [("A2", vec![0, 1, 0]), ("B2", vec![0, 1, 0, 1])] {
        let a = alg(name);
        let set = CuspidalSet::new(&a, &seq).unwrap();
        let rev = BraidWord::positive(&seq.iter().rev().copied().collect::<Vec<_>>());
        for k in 1..=seq.len() {
            let tail: Vec<usize> = seq[k..].iter().rev().copied().collect();
            let expected = a.apply_braid(&BraidWord::positive(&tail), &a.phi_gen(0, seq[k - 1]).unwrap()).unwrap();
            assert_eq!(a.twist(&rev, set.cuspidal(k).unwrap()).unwrap(), expected, "{} k={}", name, k);
        }
    }
}
