use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use qendo::exact::{int, rat};
use qendo::green::{d_related, same_image, same_kernel};
use qendo::lazyorder::{cx_rigidity_probe, mask_enumeration, Code, Enumeration, LazyOrder, Rigidity};
use qendo::qset::{Atom, Signature};
use qendo::{compare, is_idempotent, rational_between, Endo, ExtReal, QInterval, QSet, Rational, Tristate};

fn arb_rational() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..9).prop_map(|(n, d)| rat(n, d))
}

fn arb_ext() -> impl Strategy<Value = ExtReal> {
    prop_oneof![
        1 => Just(ExtReal::NegInf),
        1 => Just(ExtReal::PosInf),
        4 => arb_rational().prop_map(ExtReal::Rat),
        4 => (arb_rational(), arb_rational(), prop::sample::select(vec![2u64, 3, 5, 8, 12]))
            .prop_map(|(a, b, d)| ExtReal::surd(a, b, d).unwrap()),
    ]
}

fn arb_interval() -> impl Strategy<Value = Option<QInterval>> {
    (arb_ext(), any::<bool>(), arb_ext(), any::<bool>()).prop_map(|(a, ac, b, bc)| {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        QInterval::new(a, ac, b, bc)
    })
}

fn arb_raw() -> impl Strategy<Value = Vec<QInterval>> {
    prop::collection::vec(arb_interval(), 0..5).prop_map(|v| v.into_iter().flatten().collect())
}

/// Floating point sits near the exact value, for a sanity cross-check.
fn approx(x: &ExtReal) -> f64 {
    x.to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn compare_is_a_total_order(a in arb_ext(), b in arb_ext(), c in arb_ext()) {
        prop_assert_eq!(compare(&a, &b), compare(&b, &a).reverse());
        prop_assert_eq!(compare(&a, &b) == Ordering::Equal, a == b);
        if compare(&a, &b) != Ordering::Greater && compare(&b, &c) != Ordering::Greater {
            prop_assert_ne!(compare(&a, &c), Ordering::Greater);
        }
        let (x, y) = (approx(&a), approx(&b));
        if (x - y).abs() > 1e-9 {
            prop_assert_eq!(compare(&a, &b), x.partial_cmp(&y).unwrap());
        }
    }

    #[test]
    fn between_is_strict(a in arb_ext(), b in arb_ext()) {
        match compare(&a, &b) {
            Ordering::Less => {
                let q = ExtReal::Rat(rational_between(&a, &b).unwrap());
                prop_assert!(a < q && q < b);
            }
            _ => prop_assert!(rational_between(&a, &b).is_err()),
        }
    }

    #[test]
    fn surds_never_equal_rationals(a in arb_rational(), b in arb_rational(), r in arb_rational(), d in prop::sample::select(vec![2u64, 3, 6, 7])) {
        let s = ExtReal::surd(a.clone(), b.clone(), d).unwrap();
        if b.is_zero() {
            prop_assert_eq!(s, ExtReal::Rat(a));
        } else {
            prop_assert_ne!(compare(&s, &ExtReal::Rat(r)), Ordering::Equal);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// No rational with a smaller denominator lies in the gap, and among
    /// those with the same denominator none has a smaller absolute numerator.
    #[test]
    fn between_is_simplest(a in arb_ext(), b in arb_ext()) {
        prop_assume!(a < b);
        let q = rational_between(&a, &b).unwrap();
        let den = q.denom().clone();
        let inside = |n: &BigInt, d: &BigInt| {
            let x = ExtReal::Rat(Rational::new(n.clone(), d.clone()));
            a < x && x < b
        };
        let mut d = BigInt::from(1);
        while d <= den {
            let lo = match a.floor() { Some(f) => f * &d, None => -(BigInt::from(70) * &d) };
            let hi = match b.ceil() { Some(c) => c * &d, None => BigInt::from(70) * &d };
            let mut n = lo;
            while n <= hi {
                if inside(&n, &d) {
                    prop_assert!(d == den, "{}/{} is simpler than {}", n, d, q);
                    prop_assert!(n.abs() >= q.numer().abs(), "{}/{} has a smaller numerator than {}", n, d, q);
                }
                n += 1;
            }
            d += 1;
        }
    }

    #[test]
    fn normalize_is_canonical(raw in arb_raw(), probes in prop::collection::vec(arb_rational(), 40)) {
        let x = QSet::normalize(raw.clone());
        prop_assert_eq!(QSet::normalize(x.components().to_vec()), x.clone());
        for q in &probes {
            prop_assert_eq!(x.contains(q), raw.iter().any(|i| i.contains(q)));
        }
        prop_assert_eq!(x.complement().complement(), x.clone());
        for q in &probes {
            prop_assert_ne!(x.contains(q), x.complement().contains(q));
        }
    }

    #[test]
    fn components_are_convex(raw in arb_raw(), a in arb_rational(), b in arb_rational()) {
        let x = QSet::normalize(raw);
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        for c in x.maximal_intervals() {
            if c.contains(&a) && c.contains(&b) && a < b {
                let mid = QInterval::open(ExtReal::Rat(a.clone()), ExtReal::Rat(b.clone())).unwrap();
                for p in qendo::endo::probe_points(&mid, 12) {
                    prop_assert!(x.contains(&p));
                }
            }
        }
        let comps = x.components();
        for w in comps.windows(2) {
            // distinct components have a rational gap between them
            let gap = QInterval::new(w[0].hi().clone(), !w[0].hi_closed(), w[1].lo().clone(), !w[1].lo_closed());
            prop_assert!(gap.is_some_and(|g| !g.is_singleton() || !x.contains(g.singleton_value().unwrap())));
        }
    }

    /// Applying the rewrite rules at random positions always ends in the
    /// same reduced word.
    #[test]
    fn reduction_is_confluent(word in prop::collection::vec(prop::bool::ANY, 0..14), picks in prop::collection::vec(0usize..100, 40)) {
        let word: Vec<Atom> = word.into_iter().map(|b| if b { Atom::P } else { Atom::D }).collect();
        let mut w = word.clone();
        let mut k = 0;
        loop {
            let mut sites = Vec::new();
            for i in 0..w.len() {
                if w[i..].starts_with(&[Atom::D, Atom::D]) {
                    sites.push((i, 2));
                }
                if w[i..].starts_with(&[Atom::D, Atom::P, Atom::D]) {
                    sites.push((i, 3));
                }
            }
            if sites.is_empty() {
                break;
            }
            let (i, len) = sites[picks[k % picks.len()] % sites.len()];
            k += 1;
            w.splice(i..i + len, [Atom::D]);
        }
        prop_assert!(Signature::is_reduced(&w));
        let reduced = Signature::reduce(&word);
        prop_assert_eq!(reduced.atoms(), &w[..]);
    }

    #[test]
    fn enumeration_rank_inverts(q in arb_rational(), n in 0u64..100_000, m in prop::collection::btree_set(0u64..40, 0..4)) {
        let e = mask_enumeration(&Enumeration::canonical(), &m);
        prop_assert_eq!(e.forward(&e.rank(&q)), q);
        prop_assert_eq!(e.rank(&e.forward_u64(n)), BigUint::from(n));
    }

    #[test]
    fn cx_is_a_linear_order(t in prop::collection::vec((0u64..60, 0u64..60), 3), m in prop::collection::btree_set(0u64..30, 0..3)) {
        let cx = LazyOrder::Cx(mask_enumeration(&Enumeration::canonical(), &m));
        let els: Vec<Code> = t.iter().map(|&(n, i)| Code::pair(n, i.min(n))).collect();
        let c = |a: &Code, b: &Code| cx.compare_elems(a, b).unwrap();
        for a in &els {
            prop_assert_eq!(c(a, a), Ordering::Equal);
            prop_assert!(!cx.candidates(Some(a), None).is_empty());
            prop_assert!(!cx.candidates(None, Some(a)).is_empty());
            for b in &els {
                prop_assert_eq!(c(a, b), c(b, a).reverse());
                for d in &els {
                    if c(a, b) == Ordering::Less && c(b, d) == Ordering::Less {
                        prop_assert_eq!(c(a, d), Ordering::Less);
                    }
                }
                if let (Code::Pair(x, _), Code::Pair(y, _)) = (a, b) {
                    if x != y && c(a, b) == Ordering::Less {
                        prop_assert!(cx.exists_between(a, b).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn distinct_masks_are_separated(a in prop::collection::btree_set(0u64..20, 0..3), b in prop::collection::btree_set(0u64..20, 0..3)) {
        prop_assume!(a != b);
        let e = Enumeration::canonical();
        let n = 2 * a.iter().chain(&b).max().unwrap() + 2;
        let r = cx_rigidity_probe(&mask_enumeration(&e, &a), &mask_enumeration(&e, &b), n);
        prop_assert!(matches!(r, Rigidity::Contradiction(..)));
    }

    #[test]
    fn sums_and_subsets_are_linear(x in arb_raw(), ks in prop::collection::vec((any::<bool>(), arb_rational()), 3)) {
        let x = QSet::normalize(x);
        let o = qendo::lazyorder::ordered_sum(LazyOrder::Q, LazyOrder::Subset(x.clone()));
        let els: Vec<Code> = ks
            .into_iter()
            .filter(|(left, q)| *left || x.contains(q))
            .map(|(left, q)| if left { Code::Left(Box::new(Code::Rat(q))) } else { Code::Right(Box::new(Code::Rat(q))) })
            .collect();
        for a in &els {
            for b in &els {
                let ab = o.compare_elems(a, b).unwrap();
                prop_assert_eq!(ab, o.compare_elems(b, a).unwrap().reverse());
                prop_assert_eq!(ab == Ordering::Equal, a == b);
            }
        }
    }
}

#[test]
fn constants_form_one_d_class() {
    let consts: Vec<Endo> = (-25..25).map(|k| Endo::constant(rat(k, 3))).collect();
    for f in &consts {
        assert_eq!(is_idempotent(f), Tristate::True);
        assert_eq!(f.image().signature().to_string(), "P");
    }
    for (i, f) in consts.iter().enumerate() {
        for (j, g) in consts.iter().enumerate() {
            assert_eq!(d_related(f, g), Tristate::True);
            assert_eq!(same_image(f, g), i == j);
            assert!(same_kernel(f, g));
        }
    }
    assert_eq!(d_related(&consts[0], &Endo::translation(int(1))), Tristate::False);
}
