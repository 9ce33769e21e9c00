use std::collections::BTreeSet;

use invarprob_core::action::{
    partial_orbit_closure, symmetrize, Action, Generator, GroupWord, PermutationTable, Point, Region, SpaceSpec,
};
use invarprob_core::cone::{c0_compare, gamma_indicator, FinFn, GammaValue, IndicatorDiff, SimpleFn};
use invarprob_core::equidecomp::{equidecomposable, verify_witness};
use invarprob_core::measures::{build_level_stack_with, FinAlgebra};
use invarprob_core::popper::{exchange_from_popper, popper_from_exchange, popper_from_levels, verify_popper_axioms};
use invarprob_core::qual::{lexmax_compare, CompareVerdict};
use invarprob_core::zset::{Sparse, ZSet};
use invarprob_core::{action::FiniteSpace, int, ExtRat, Rational};
use proptest::prelude::*;

const LO: i64 = -40;
const HI: i64 = 300;

fn leaf() -> impl Strategy<Value = ZSet> {
    prop_oneof![
        prop::collection::btree_set(-20i64..40, 0..6).prop_map(ZSet::finite),
        prop::collection::btree_set(-20i64..40, 0..6).prop_map(ZSet::cofinite),
        (-10i64..10).prop_map(ZSet::left),
        (-10i64..10).prop_map(ZSet::right),
        Just(ZSet::sparse(Sparse::DoubleExp)),
        Just(ZSet::sparse(Sparse::Squares)),
    ]
}

fn zset() -> impl Strategy<Value = ZSet> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.union(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.intersection(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.difference(&b)),
            inner.clone().prop_map(|a| a.complement()),
            (inner, -6i64..6).prop_map(|(a, t)| a.translate(t)),
        ]
    })
}

fn elementary() -> impl Strategy<Value = ZSet> {
    prop_oneof![
        prop::collection::btree_set(-8i64..8, 0..5).prop_map(ZSet::finite),
        prop::collection::btree_set(-8i64..8, 0..5).prop_map(ZSet::cofinite),
    ]
}

fn fin_fn() -> impl Strategy<Value = FinFn> {
    prop::collection::vec((-5i64..5, -4i64..5), 0..5)
        .prop_map(|v| FinFn::from_pairs(v.into_iter().map(|(k, x)| (k, int(x)))))
}

fn simple_fn() -> impl Strategy<Value = SimpleFn> {
    (zset(), zset(), -3i64..4, -3i64..4).prop_map(|(a, b, x, y)| {
        SimpleFn::new([(a.difference(&b), int(x))]).add(&SimpleFn::new([(b, int(y))]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn set_ops_match_membership(a in zset(), b in zset(), t in -50i64..50) {
        let (u, i, d, c, s) = (a.union(&b), a.intersection(&b), a.difference(&b), a.complement(), a.translate(t));
        for x in LO..HI {
            let (p, q) = (a.contains(x), b.contains(x));
            prop_assert_eq!(u.contains(x), p || q);
            prop_assert_eq!(i.contains(x), p && q);
            prop_assert_eq!(d.contains(x), p && !q);
            prop_assert_eq!(c.contains(x), !p);
            prop_assert_eq!(s.contains(x), a.contains(x - t));
        }
    }

    #[test]
    fn normal_form_is_canonical(a in zset(), b in zset()) {
        // equal sets have equal representations
        let lhs = a.union(&b).complement();
        let rhs = a.complement().intersection(&b.complement());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.translate(7).translate(-7), a.clone());
        prop_assert_eq!(a.complement().complement(), a);
    }

    #[test]
    fn finite_len_matches_count(a in zset()) {
        if let Some(elems) = a.elements() {
            prop_assert_eq!(a.len(), Some(elems.len()));
            for x in elems {
                prop_assert!(a.contains(*x));
            }
            let inside = (LO..HI).filter(|x| a.contains(*x)).count();
            prop_assert!(inside <= elems.len());
        }
    }

    #[test]
    fn comparisons_commute_with_translation(a in zset(), b in zset(), t in -30i64..30) {
        let (at, bt) = (a.translate(t), b.translate(t));
        prop_assert_eq!(c0_compare(&a, &b), c0_compare(&at, &bt));
        prop_assert_eq!(gamma_indicator(&a, &b), gamma_indicator(&at, &bt));
    }

    #[test]
    fn compare_is_antisymmetric(a in zset(), b in zset()) {
        prop_assert_eq!(c0_compare(&a, &b).flip(), c0_compare(&b, &a));
    }

    #[test]
    fn finite_sets_compare_by_size(a in prop::collection::btree_set(-30i64..30, 0..8),
                                   b in prop::collection::btree_set(-30i64..30, 0..8)) {
        let expected = CompareVerdict::from_ordering(a.len().cmp(&b.len()));
        let (za, zb) = (ZSet::finite(a.iter().copied()), ZSet::finite(b.iter().copied()));
        prop_assert_eq!(c0_compare(&za, &zb), expected);
        if !b.is_empty() {
            let ratio = Rational::new(a.len().into(), b.len().into());
            prop_assert_eq!(gamma_indicator(&za, &zb), GammaValue::Value(ExtRat::finite(ratio)));
        }
    }

    #[test]
    fn equiv_means_null_class(a in zset(), b in zset()) {
        if c0_compare(&a, &b) == CompareVerdict::Equiv {
            prop_assert!(IndicatorDiff::between(&a, &b).to_simple().is_null_class());
        }
    }

    #[test]
    fn fragment_is_a_cone(f in simple_fn(), g in simple_fn(), k in 1i64..5) {
        if f.in_fragment() && g.in_fragment() {
            prop_assert!(f.add(&g).in_fragment());
            prop_assert!(f.scale(&int(k)).in_fragment());
        }
    }

    #[test]
    fn fragment_sign_conditions(a in zset()) {
        if !a.is_empty() {
            prop_assert!(SimpleFn::new([(a.clone(), int(1))]).in_fragment());
            prop_assert!(!SimpleFn::new([(a, int(-1))]).in_fragment());
        }
    }

    #[test]
    fn sum_matches_pointwise(f in simple_fn(), g in simple_fn()) {
        let h = f.add(&g);
        for x in LO..60 {
            prop_assert_eq!(h.eval(x), f.eval(x) + g.eval(x));
        }
    }

    #[test]
    fn convolution_laws(f in fin_fn(), g in fin_fn(), h in fin_fn(), t in -9i64..9) {
        prop_assert_eq!(f.convolve(&g), g.convolve(&f));
        prop_assert_eq!(f.convolve(&g).convolve(&h), f.convolve(&g.convolve(&h)));
        prop_assert_eq!(f.convolve(&FinFn::delta(0)), f.clone());
        prop_assert_eq!(f.convolve(&FinFn::delta(t)), f.translate(t));
        prop_assert_eq!(f.convolve(&g).sum(), f.sum() * g.sum());
        prop_assert_eq!(f.add(&g).convolve(&h), f.convolve(&h).add(&g.convolve(&h)));
    }

    #[test]
    fn lexmax_total_preorder(a in elementary(), b in elementary(), c in elementary()) {
        let cmp = |x: &ZSet, y: &ZSet| lexmax_compare(x, y).unwrap();
        prop_assert_ne!(cmp(&a, &b), CompareVerdict::Incomparable);
        prop_assert_eq!(cmp(&a, &b) == CompareVerdict::Equiv, a == b);
        prop_assert_eq!(cmp(&a, &b).flip(), cmp(&b, &a));
        if cmp(&a, &b).le() == Some(true) && cmp(&b, &c).le() == Some(true) {
            prop_assert_eq!(cmp(&a, &c).le(), Some(true));
        }
    }

    #[test]
    fn lexmax_commutes_with_translation(a in elementary(), b in elementary(), t in -20i64..20) {
        prop_assert_eq!(lexmax_compare(&a, &b).unwrap(), lexmax_compare(&a.translate(t), &b.translate(t)).unwrap());
    }
}

/// A random permutation of `0..n` as a generator on integer points.
fn perm(images: &[usize]) -> Generator {
    let pairs = images
        .iter()
        .enumerate()
        .filter(|(i, j)| i != *j)
        .map(|(i, &j)| (Point::Int(i as i64), Point::Int(j as i64)))
        .collect();
    Generator::PermutationTable(PermutationTable::new(pairs).unwrap())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn ints(xs: impl IntoIterator<Item = i64>) -> BTreeSet<Point> {
    xs.into_iter().map(Point::Int).collect()
}

/// Every bijection `A → B` with each pair realized by some word.
fn brute_equidecomposable(action: &Action, a: &[Point], b: &[Point], s: &[GroupWord], space: &SpaceSpec) -> bool {
    fn go(k: usize, used: &mut Vec<bool>, a: &[Point], b: &[Point], ok: &dyn Fn(&Point, &Point) -> bool) -> bool {
        if k == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if !used[j] && ok(&a[k], &b[j]) {
                used[j] = true;
                if go(k + 1, used, a, b, ok) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    if a.len() != b.len() {
        return false;
    }
    let ok = |x: &Point, y: &Point| s.iter().any(|w| action.restricted(w, x, space).as_ref() == Some(y));
    go(0, &mut vec![false; b.len()], a, b, &ok)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn matching_agrees_with_brute_force(
        p in permutation(9), q in permutation(9),
        a in prop::collection::btree_set(0i64..12, 0..6),
        b in prop::collection::btree_set(0i64..12, 0..6),
        words in prop::collection::vec(prop::collection::vec((0usize..2, any::<bool>()), 0..3), 1..4),
    ) {
        let action = Action::new(vec![perm(&p), perm(&q)]);
        let space = SpaceSpec::new("Z", Region::IntRange { lo: Some(0), hi: Some(10) });
        let s: Vec<GroupWord> = words.into_iter().map(GroupWord::from_letters).collect();
        let (a, b) = (ints(a), ints(b));
        let av: Vec<Point> = a.iter().cloned().collect();
        let bv: Vec<Point> = b.iter().cloned().collect();
        let fast = equidecomposable(&action, &a, &b, &s, &space);
        prop_assert_eq!(fast.is_some(), brute_equidecomposable(&action, &av, &bv, &s, &space));
        if let Some(w) = fast {
            prop_assert!(verify_witness(&action, &a, &b, &w, &space));
        }
    }

    #[test]
    fn closures_verify(p in permutation(8), q in permutation(8), x in 0i64..8, budget in 1usize..10) {
        let action = Action::new(vec![perm(&p), perm(&q), Generator::TranslateRational(int(1))]);
        let space = SpaceSpec::new("Z", Region::IntRange { lo: Some(0), hi: Some(9) });
        let h = symmetrize(&action.generator_words());
        let res = partial_orbit_closure(&action, &h, &Point::Int(x), &space, budget).unwrap();
        prop_assert!(res.verify(&action, &h, &space));
        let full = partial_orbit_closure(&action, &h, &Point::Int(x), &space, 100).unwrap();
        prop_assert!(full.is_finite());
        prop_assert!(full.verify(&action, &h, &space));
    }

    #[test]
    fn level_tables_round_trip(p in permutation(6), n in 2usize..6, target in 1u32..64) {
        let action = Action::new(vec![perm(&p)]);
        let omega = ints(0..n as i64);
        let space = FiniteSpace::new(&action, &omega, &action.generator_words());
        let algebra = FinAlgebra::powerset(n).unwrap();
        let first: BTreeSet<usize> = (0..n).filter(|i| target >> i & 1 == 1).collect();
        prop_assume!(!first.is_empty());
        let stack = build_level_stack_with(&space, &algebra, &first).unwrap();
        let table = popper_from_levels(&stack, &algebra).unwrap();
        prop_assert!(verify_popper_axioms(&table, 1).passed());
        let back = popper_from_exchange(&exchange_from_popper(&table), 1).unwrap();
        prop_assert_eq!(back, table);
    }
}
