use pantograph::rational::{from_f64, rat, to_f64};
use pantograph::series::{eval_float, eval_interval, sign_at, Budget, SeriesSpec};
use pantograph::transport::PeriodicField;
use pantograph::truncation;
use pantograph::{Exec, RationalInterval};
use proptest::prelude::*;

fn naive(x: f64) -> f64 {
    // direct summation is accurate for small |x|
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..60 {
        term *= x / (n as f64 * 2f64.powi(n - 1));
        sum += term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn float_value_matches_direct_sum_near_origin(x in -1.4f64..3.0) {
        let v = eval_float(x, 1e-13, &SeriesSpec::pantograph(), &Budget::default()).unwrap();
        let r = naive(x);
        prop_assert!((v - r).abs() <= 1e-12 * r.abs().max(1.0), "{v} vs {r}");
    }

    #[test]
    fn enclosures_at_different_tolerances_overlap(x in -200.0f64..50.0, k in 4i64..30) {
        let xr = from_f64(x).unwrap();
        let spec = SeriesSpec::pantograph();
        let b = Budget::default();
        let loose = eval_interval(&xr, &rat(1, 1 << 3), &spec, &b).unwrap();
        let tight = eval_interval(&xr, &rat(1, 1i64 << k), &spec, &b).unwrap();
        let a = RationalInterval::new(loose.lo(), loose.hi());
        let b = RationalInterval::new(tight.lo(), tight.hi());
        prop_assert!(a.intersects(&b));
        prop_assert!(tight.radius <= rat(1, 1i64 << k));
    }

    #[test]
    fn certified_sign_agrees_with_float(x in -60.0f64..60.0) {
        let spec = SeriesSpec::pantograph();
        let b = Budget::default();
        let v = eval_float(x, 1e-12, &spec, &b).unwrap();
        prop_assume!(v.abs() > 1e-6);
        let s = sign_at(&from_f64(x).unwrap(), &spec, &b).unwrap();
        prop_assert_eq!(s.as_i32() as f64, v.signum());
    }

    #[test]
    fn interval_division_contains_point_quotients(
        a in -50i64..50, w in 1i64..20, c in 1i64..50, v in 1i64..20, s in 0u8..8
    ) {
        let num = RationalInterval::new(rat(a, 1), rat(a + w, 1));
        let den = RationalInterval::new(rat(c, 1), rat(c + v, 1));
        let q = num.div(&den).unwrap();
        let p = rat(a * 8 + (w * s as i64), 8) / rat(c * 8 + (v * s as i64), 8);
        prop_assert!(q.contains(&p));
    }

    #[test]
    fn truncated_polynomial_derivative_identity(n in 2usize..40) {
        prop_assert!(truncation::derivative_identity_holds(n));
    }

    #[test]
    fn exec_modes_preserve_order(v in proptest::collection::vec(-1e6f64..1e6, 0..200)) {
        let a = Exec::Sequential.map(&v, |x| x * 3.0 - 1.0);
        let b = Exec::Parallel.map(&v, |x| x * 3.0 - 1.0);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn cubic_interpolation_reproduces_nodes_and_constants(c in -5.0f64..5.0, i in 0usize..64) {
        let f = PeriodicField::from_fn(64, 0.0, |x| (3.0 * x).sin() + c).unwrap();
        prop_assert!((f.interpolate(f.x(i)) - f.values[i]).abs() < 1e-14);
        let k = PeriodicField::from_fn(64, 0.0, |_| c).unwrap();
        prop_assert!((k.interpolate(0.37 * i as f64) - c).abs() < 1e-13);
    }

    #[test]
    fn dyadic_snapping_round_trips(x in -1e6f64..1e6) {
        prop_assert_eq!(to_f64(&from_f64(x).unwrap()), x);
    }
}
