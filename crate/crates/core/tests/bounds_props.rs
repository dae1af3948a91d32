use proptest::prelude::*;
use quasisum::bounds::{gap_length_bound, kappa, thickness_lower_bound, BoundParams};

fn params() -> impl Strategy<Value = BoundParams> {
    (0.05f64..2.0, 0.1f64..2.0, 0.1f64..1.0, 1.1f64..4.0, 0.1f64..3.0, 1e-3f64..1.0).prop_map(
        |(c, c_h, h, t, c_e, c_lambda)| BoundParams { c, c_h, h, t, c_e, c_lambda, ..BoundParams::default() },
    )
}

proptest! {
    #[test]
    fn kappa_round_trip(p in params(), frac in 1e-9f64..0.999) {
        let len = p.c_lambda * frac;
        let k = kappa(&p, len).unwrap();
        let back = p.c_lambda * (-p.c_e * k).exp();
        prop_assert!(((back - len) / len).abs() <= 1e-12);
    }

    #[test]
    fn bound_grows_with_dc_constant(p in params(), k in 0.01f64..20.0, scale in 1.0f64..3.0) {
        let base = thickness_lower_bound(&p, k).unwrap();
        let bigger = thickness_lower_bound(&BoundParams { c: p.c * scale, ..p.clone() }, k).unwrap();
        prop_assert!(bigger >= base);
        prop_assert!(base > 0.0);
    }

    #[test]
    fn gap_bound_decays_with_label(n in 1i64..50) {
        let p = BoundParams::default();
        let a = gap_length_bound(&p, &[n]).unwrap();
        let b = gap_length_bound(&p, &[-(n + 1)]).unwrap();
        prop_assert!(b < a);
        prop_assert_eq!(a, gap_length_bound(&p, &[-n]).unwrap());
    }
}
