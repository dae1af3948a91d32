use proptest::prelude::*;
use quasisum::gaplemma::{check_astels, check_newhouse};
use quasisum::setalg::{hausdorff_distance, minkowski_sum, minkowski_sum_all, thickness, ExtReal, IntervalUnion};

fn union() -> impl Strategy<Value = IntervalUnion> {
    prop::collection::vec((0i32..40, 0i32..12), 1..6).prop_map(|raw| {
        let pairs: Vec<(f64, f64)> = raw.into_iter().map(|(a, l)| (a as f64, (a + l) as f64)).collect();
        IntervalUnion::from_pairs(&pairs).unwrap()
    })
}

proptest! {
    #[test]
    fn canonical_form(k in union()) {
        for w in k.parts().windows(2) {
            prop_assert!(w[0].hi < w[1].lo);
        }
        for p in k.parts() {
            prop_assert!(p.lo <= p.hi);
        }
    }

    #[test]
    fn sum_commutes(a in union(), b in union()) {
        prop_assert_eq!(minkowski_sum(&a, &b), minkowski_sum(&b, &a));
    }

    #[test]
    fn sum_associates(a in union(), b in union(), c in union()) {
        let left = minkowski_sum(&minkowski_sum(&a, &b), &c);
        let right = minkowski_sum(&a, &minkowski_sum(&b, &c));
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(minkowski_sum_all(&[a, b, c]).unwrap(), left);
    }

    #[test]
    fn sum_hull_and_membership(a in union(), b in union()) {
        let s = minkowski_sum(&a, &b);
        prop_assert_eq!(s.inf(), a.inf() + b.inf());
        prop_assert_eq!(s.sup(), a.sup() + b.sup());
        for p in a.parts() {
            for q in b.parts() {
                prop_assert!(s.contains(p.lo + q.hi));
                prop_assert!(s.contains(p.hi + q.lo));
            }
        }
    }

    #[test]
    fn thickness_is_affine_invariant(k in union(), scale in 1u32..8, shift in -20i32..20) {
        let base = thickness(&k).tau;
        let moved = thickness(&k.affine(scale as f64, shift as f64)).tau;
        match (base, moved) {
            (ExtReal::Infinite, ExtReal::Infinite) => {}
            (ExtReal::Finite(x), ExtReal::Finite(y)) => prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0)),
            other => prop_assert!(false, "{:?}", other),
        }
        prop_assert_eq!(thickness(&k.reflect()).tau, base);
    }

    #[test]
    fn thickness_infinite_iff_interval(k in union()) {
        prop_assert_eq!(thickness(&k).tau.is_infinite(), k.is_interval());
    }

    #[test]
    fn hausdorff_is_a_metric(a in union(), b in union(), c in union()) {
        let ab = hausdorff_distance(&a, &b);
        prop_assert_eq!(ab, hausdorff_distance(&b, &a));
        prop_assert_eq!(hausdorff_distance(&a, &a), 0.0);
        prop_assert!(ab <= hausdorff_distance(&a, &c) + hausdorff_distance(&c, &b) + 1e-12);
    }

    #[test]
    fn close_gaps_only_removes_short_gaps(k in union(), tol in 0u32..6) {
        let (closed, n) = k.close_gaps(tol as f64);
        prop_assert_eq!(closed.len() + n, k.len());
        for g in closed.bounded_gaps() {
            prop_assert!(g.len() >= tol as f64);
        }
    }

    #[test]
    fn predictions_are_sound(a in union(), b in union(), c in union()) {
        let pair = [a.clone(), b.clone()];
        let sum2 = minkowski_sum(&a, &b);
        for v in [check_newhouse(&a, &b), check_astels(&pair).unwrap()] {
            if let Some(iv) = v.predicted_interval {
                prop_assert!(sum2.is_interval());
                prop_assert_eq!(sum2.hull(), iv);
            }
        }
        let triple = [a, b, c];
        let sum3 = minkowski_sum_all(&triple).unwrap();
        let v = check_astels(&triple).unwrap();
        if let Some(iv) = v.predicted_interval {
            prop_assert!(sum3.is_interval());
            prop_assert_eq!(sum3.hull(), iv);
        }
        if let Some(bound) = v.predicted_tau_lower_bound {
            prop_assert!(thickness(&sum3).tau.ge(bound * (1.0 - 1e-12)));
        }
    }
}
