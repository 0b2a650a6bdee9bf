use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

use jacobi_core::arith::{factorial, is_square, kronecker, sqrt_classes_mod, Rat};
use jacobi_core::modsym::{intersection, intersection_with_line};
use jacobi_core::qf::{enumerate_support, genus_character};
use jacobi_core::{bracket, BinaryQF, Cusp, Epsilon, HomPoly, Mat2, ModularSymbol, SupportQuery};

fn q(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

fn poly_strategy(w: usize) -> impl Strategy<Value = HomPoly> {
    prop::collection::vec((-20i64..=20, 1i64..=4), w + 1)
        .prop_map(|c| HomPoly::from_coeffs(c.into_iter().map(|(n, d)| q(n, d)).collect()))
}

fn sized_polys() -> impl Strategy<Value = (HomPoly, HomPoly)> {
    (0usize..=8).prop_flat_map(|w| (poly_strategy(w), poly_strategy(w)))
}

/// Products of `T^±1`, `S` and `diag(-1, 1)`: reaches all of `GL(2, Z)`.
fn gl2() -> impl Strategy<Value = Mat2> {
    prop::collection::vec(0u8..4, 0..8).prop_map(|steps| {
        let gens = [
            Mat2::new(1, 1, 0, 1).unwrap(),
            Mat2::new(1, -1, 0, 1).unwrap(),
            Mat2::new(0, -1, 1, 0).unwrap(),
            Mat2::new(-1, 0, 0, 1).unwrap(),
        ];
        steps.into_iter().fold(Mat2::IDENTITY, |acc, s| acc * gens[s as usize])
    })
}

fn cusp() -> impl Strategy<Value = Cusp> {
    prop_oneof![
        1 => Just(Cusp::INFINITY),
        6 => (-30i64..=30, 1i64..=12).prop_filter_map("not reduced", |(p, q)| Cusp::new(p, q).ok()),
    ]
}

fn nonsquare_form() -> impl Strategy<Value = BinaryQF> {
    (-9i64..=9, -9i64..=9, -9i64..=9)
        .prop_map(|(a, b, c)| BinaryQF::new(a, b, c))
        .prop_filter("square discriminant", |f| {
            let d = f.disc();
            !(d >= 0 && is_square(d as i64))
        })
}

fn any_poly() -> impl Strategy<Value = HomPoly> {
    (0usize..=8).prop_flat_map(poly_strategy)
}

fn even_poly() -> impl Strategy<Value = HomPoly> {
    (0usize..=3).prop_flat_map(|e| poly_strategy(2 * e))
}

fn integral((p1, p2): (HomPoly, HomPoly)) -> (HomPoly, HomPoly) {
    let ints = |c: HomPoly| {
        HomPoly::from_coeffs(c.coeffs().iter().map(|x| Rat::from_integer(x.numer().clone())).collect())
    };
    (ints(p1), ints(p2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn pairing_with_evaluator_is_evaluation(p in any_poly(), n in -30i64..=30, d in 1i64..=7) {
        let x = q(n, d);
        prop_assert_eq!(bracket(&HomPoly::evaluator(p.degree(), &x), &p).unwrap(), p.eval_at(&x));
    }

    #[test]
    fn pairing_is_graded_symmetric((p1, p2) in sized_polys()) {
        let w = p1.degree();
        let sign = if w % 2 == 0 { q(1, 1) } else { q(-1, 1) };
        prop_assert_eq!(bracket(&p1, &p2).unwrap(), bracket(&p2, &p1).unwrap() * sign);
    }

    #[test]
    fn pairing_is_invariant_under_gl2((p1, p2) in sized_polys(), a in gl2()) {
        let w = p1.degree();
        let lhs = bracket(&p1.act(&a), &p2.act(&a)).unwrap();
        let det_w = if a.det() == -1 && w % 2 == 1 { q(-1, 1) } else { q(1, 1) };
        prop_assert_eq!(lhs, bracket(&p1, &p2).unwrap() * det_w);
    }

    #[test]
    fn pairing_denominator_divides_factorial((p1, p2) in sized_polys().prop_map(integral)) {
        let v = bracket(&p1, &p2).unwrap();
        prop_assert!((factorial(p1.degree()) % v.denom()).is_zero());
    }

    #[test]
    fn action_is_a_group_action(p in any_poly(), a in gl2(), b in gl2()) {
        prop_assert_eq!(p.act(&(a * b)), p.act(&b).act(&a));
    }

    #[test]
    fn action_transports_evaluation(p in any_poly(), a in gl2(), alpha in cusp()) {
        let w = p.degree();
        let image = a.apply(&alpha);
        // P at the primitive vector (p, q); the sign of the vector only
        // matters for odd w
        let hom = |p: &HomPoly, c: &Cusp| -> Rat {
            if c.is_infinity() {
                return p.eval(c);
            }
            p.eval(c) * Rat::from_integer(BigInt::from(c.q()).pow(w as u32))
        };
        let lhs = hom(&p.act(&a), &image);
        let rhs = hom(&p, &alpha);
        if w % 2 == 0 {
            prop_assert_eq!(lhs, rhs);
        } else {
            prop_assert!(lhs == rhs || lhs == -rhs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn intersection_is_gl2_invariant(f in nonsquare_form(), a in gl2(), alpha in cusp(), beta in cusp(), p in even_poly()) {
        let before = intersection_with_line(&f, &alpha, &beta, &p).unwrap();
        let af = f.act(&a).unwrap();
        let after = intersection_with_line(&af, &a.apply(&alpha), &a.apply(&beta), &p.act(&a)).unwrap();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn symbol_sum_equals_sum_over_lines(
        f in nonsquare_form(),
        terms in prop::collection::vec((-3i64..=3, cusp()), 0..5),
    ) {
        let mut sigma = ModularSymbol::new(2, 1, Epsilon::Minus).unwrap();
        for (n, s) in &terms {
            sigma.push(*n, *s, HomPoly::one()).unwrap();
        }
        let by_lines: Rat = terms
            .iter()
            .map(|(n, s)| {
                intersection_with_line(&f, &Cusp::INFINITY, s, &HomPoly::one()).unwrap() * Rat::from_integer((*n).into())
            })
            .sum();
        prop_assert_eq!(intersection(&f, &sigma).unwrap(), by_lines);
    }

    #[test]
    fn intersection_is_additive(
        f in nonsquare_form(),
        t1 in prop::collection::vec((-3i64..=3, cusp()), 0..4),
        t2 in prop::collection::vec((-3i64..=3, cusp()), 0..4),
    ) {
        let build = |t: &[(i64, Cusp)]| {
            let mut s = ModularSymbol::new(3, 1, Epsilon::Plus).unwrap();
            for (n, c) in t {
                s.push(*n, *c, HomPoly::from_ints(&[1, -2, 3])).unwrap();
            }
            s
        };
        let (s1, s2) = (build(&t1), build(&t2));
        let sum = s1.add(&s2).unwrap();
        prop_assert_eq!(
            intersection(&f, &sum).unwrap(),
            intersection(&f, &s1).unwrap() + intersection(&f, &s2).unwrap()
        );
    }
}

const CUSPS: [(i64, i64); 7] = [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (2, 5), (-2, 5)];

/// Exhaustive search over `a, b` in a box: forms with `m | a`, discriminant
/// `d`, and `a > 0, Q(s) < 0` (first list) or `a < 0, Q(s) > 0` (second).
fn brute_support(m: i64, d: i64, s: &Cusp) -> (Vec<BinaryQF>, Vec<BinaryQF>) {
    let (p, qd) = (s.p(), s.q());
    let a_max = d * qd * qd / 4;
    let bound = d.max(a_max + 2 * a_max * p.abs() / qd + (d as f64).sqrt() as i64 + 1);
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for a in (-bound..=bound).filter(|a| *a != 0 && a % m == 0) {
        for b in -bound..=bound {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let f = BinaryQF::new(a, b, num / (4 * a));
            match (f.sign_at(&Cusp::INFINITY), f.sign_at(s)) {
                (1, -1) => pos.push(f),
                (-1, 1) => neg.push(f),
                _ => {}
            }
        }
    }
    (pos, neg)
}

#[test]
fn support_matches_brute_force() {
    for m in 1..=5 {
        for (p, qd) in CUSPS {
            let s = Cusp::new(p, qd).unwrap();
            for d in 1..=100 {
                if is_square(d) {
                    continue;
                }
                let (all, negated) = brute_support(m, d, &s);
                for r in 0..2 * m {
                    let query = SupportQuery { m, disc: d, r, s };
                    let got: BTreeSet<BinaryQF> = enumerate_support(&query).unwrap().into_iter().collect();
                    let want: BTreeSet<BinaryQF> =
                        all.iter().filter(|f| (f.b - r).rem_euclid(2 * m) == 0).copied().collect();
                    assert_eq!(got, want, "m={m} D={d} r={r} s={s}");
                    for f in &got {
                        assert_eq!(f.disc(), d as i128);
                        assert!(f.a > 0 && f.a % m == 0 && f.sign_at(&s) < 0);
                    }
                    // Q -> -Q onto the forms with both signs flipped and class -r
                    let flipped: BTreeSet<BinaryQF> = got.iter().map(BinaryQF::neg).collect();
                    let want_neg: BTreeSet<BinaryQF> =
                        negated.iter().filter(|f| (f.b + r).rem_euclid(2 * m) == 0).copied().collect();
                    assert_eq!(flipped, want_neg, "negation m={m} D={d} r={r} s={s}");
                }
            }
            for d in [-4, -3, 0, 1, 4] {
                let query = SupportQuery { m, disc: d, r: 0, s };
                match enumerate_support(&query) {
                    Ok(v) => assert!(v.is_empty()),
                    Err(_) => assert!(is_square(d)),
                }
            }
        }
    }
}

#[test]
fn support_at_index_37_matches_brute_force() {
    // s = 0 forces a <= D/4, so this support is empty
    let zero = SupportQuery { m: 37, disc: 12, r: 30, s: Cusp::new(0, 1).unwrap() };
    assert!(enumerate_support(&zero).unwrap().is_empty());
    let s = Cusp::new(-1, 34).unwrap();
    let mut nonempty = 0;
    for disc in [12i64, 21, 28, 33, 40, 44, 47, 120, 133] {
        let a_max = disc * 34 * 34 / 4;
        for r in sqrt_classes_mod(disc, 37) {
            let query = SupportQuery { m: 37, disc, r, s };
            let got: BTreeSet<BinaryQF> = enumerate_support(&query).unwrap().into_iter().collect();
            let mut want = BTreeSet::new();
            for a in (37..=a_max + 37).step_by(37) {
                let b_box = 2 * a + 34 * 34;
                for b in (-b_box..=b_box).filter(|b| (b - r).rem_euclid(74) == 0) {
                    let num = b * b - disc;
                    if num % (4 * a) == 0 {
                        let f = BinaryQF::new(a, b, num / (4 * a));
                        if f.sign_at(&s) < 0 {
                            want.insert(f);
                        }
                    }
                }
            }
            assert_eq!(got, want, "D={disc} r={r}");
            nonempty += usize::from(!got.is_empty());
        }
    }
    assert!(nonempty > 5);
}

#[test]
fn genus_character_examples() {
    assert_eq!(genus_character(37, -4, &BinaryQF::new(37, 30, 6)).unwrap(), 1);
    assert_eq!(genus_character(5, 1, &BinaryQF::new(5, 3, -7)).unwrap(), 1);
    assert_eq!(genus_character(1, -3, &BinaryQF::new(3, 3, 3)).unwrap(), 0);
}

/// Forms in `Q_m(Δ Δ0, ·)` with `a > 0` for small admissible data.
fn genus_samples() -> Vec<(i64, i64, BinaryQF)> {
    let mut out = Vec::new();
    for (m, d0) in [(1i64, -3i64), (1, -4), (1, 5), (5, -4), (6, 12), (11, 5), (11, -7), (15, 21), (37, -4), (37, -3)] {
        for delta_abs in 1..=40i64 {
            let delta = delta_abs * d0.signum();
            if sqrt_classes_mod(delta, m).is_empty() {
                continue;
            }
            let d = delta * d0;
            if is_square(d) {
                continue;
            }
            for r in sqrt_classes_mod(d, m) {
                for s in [Cusp::new(0, 1).unwrap(), Cusp::new(-1, 3).unwrap()] {
                    let query = SupportQuery { m, disc: d, r, s };
                    out.extend(enumerate_support(&query).unwrap().into_iter().take(3).map(|f| (m, d0, f)));
                }
            }
        }
    }
    out
}

fn gamma0(m: i64) -> impl Strategy<Value = Mat2> {
    prop::collection::vec(0u8..5, 0..8).prop_map(move |steps| {
        let gens = [
            Mat2::new(1, 1, 0, 1).unwrap(),
            Mat2::new(1, -1, 0, 1).unwrap(),
            Mat2::new(1, 0, m, 1).unwrap(),
            Mat2::new(1, 0, -m, 1).unwrap(),
            Mat2::new(-1, 0, 0, -1).unwrap(),
        ];
        steps.into_iter().fold(Mat2::IDENTITY, |acc, s| acc * gens[s as usize])
    })
}

#[test]
fn genus_character_is_gamma0_invariant() {
    let samples = genus_samples();
    assert!(samples.len() > 200);
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for (m, d0, f) in samples {
        let chi = genus_character(m, d0, &f).unwrap();
        for _ in 0..20 {
            let a = gamma0(m).new_tree(&mut runner).unwrap().current();
            let g = f.act(&a).unwrap();
            assert_eq!(g.a % m, 0);
            assert_eq!(genus_character(m, d0, &g).unwrap(), chi, "m={m} d0={d0} {f} -> {g}");
        }
    }
}

#[test]
fn genus_character_ignores_which_value_is_used() {
    let mut checked = 0;
    for (m, d0, f) in genus_samples() {
        let chi = genus_character(m, d0, &f).unwrap();
        let a_red = f.a / m;
        if chi == 0 {
            continue;
        }
        let mut values = BTreeSet::new();
        for n1 in (1..=m).filter(|n| m % n == 0) {
            let g = BinaryQF::new(a_red * n1, f.b, f.c * (m / n1));
            for x in -6i128..=6 {
                for y in -6i128..=6 {
                    let n = g.value(x, y);
                    if n != 0 && num_integer::Integer::gcd(&n, &(d0 as i128)) == 1 {
                        values.insert(n as i64);
                    }
                }
            }
        }
        assert!(values.len() >= 5, "{f}");
        for n in values {
            assert_eq!(kronecker(d0, n), chi, "m={m} d0={d0} {f} at n={n}");
        }
        checked += 1;
    }
    assert!(checked > 100);
}
