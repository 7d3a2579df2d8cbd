use pantograph::fode::{
    make_builtin, residual, solve, BuiltinParams, Direction, SolveOptions,
};
use pantograph::rational::to_f64;
use pantograph::series::{eval_float, Budget, SeriesSpec};
use pantograph::zeros::locate_zero;
use pantograph::Rational;

fn f(x: f64) -> f64 {
    eval_float(x, 1e-14, &SeriesSpec::pantograph(), &Budget::default()).unwrap()
}

fn linear_like() -> pantograph::fode::PantographProblem {
    make_builtin("linear_like", &BuiltinParams::default()).unwrap()
}

#[test]
fn forward_linear_like_matches_series() {
    let p = linear_like();
    let opts = SolveOptions::with_tol(1e-8);
    let tr = solve(&p, 30.0, Direction::Forward, &opts).unwrap();
    for i in 0..=300 {
        let t = 0.1 * i as f64;
        let x = tr.evaluate(t).unwrap()[0];
        let r = f(t);
        assert!((x - r).abs() <= 10.0 * opts.tol * r.abs().max(1.0), "t = {t}: {x} vs {r}");
    }
    assert!(residual(&tr, &p, 2000) < 1e-6);
    assert_eq!(tr.stats().causality_violations, 0);
}

#[test]
fn backward_sign_changes_lie_in_certified_brackets() {
    let p = linear_like();
    let mut opts = SolveOptions::with_tol(1e-10);
    opts.blow_up_norm = 1e300;
    let tr = solve(&p, -2000.0, Direction::Backward, &opts).unwrap();
    let grid = tr.sample(400_001);
    let mut changes = Vec::new();
    for w in grid.windows(2) {
        if w[0].1[0].signum() != w[1].1[0].signum() {
            changes.push((w[0].0, w[1].0));
        }
    }
    changes.reverse();
    // zeros of f in [-2000, 0): x_1..x_8 (x_9 ≈ -2380)
    assert_eq!(changes.len(), 8, "{changes:?}");
    let budget = Budget::default();
    for (k, (lo, hi)) in changes.iter().enumerate() {
        let rec = locate_zero(k as u32 + 1, &Rational::new(1.into(), 1000.into()), &budget).unwrap();
        let (zlo, zhi) = (to_f64(&rec.lo), to_f64(&rec.hi));
        assert!(*lo <= zhi && *hi >= zlo, "zero {}: [{lo}, {hi}] vs [{zlo}, {zhi}]", k + 1);
    }
}

#[test]
fn backward_to_minus_twenty_oscillates() {
    let p = linear_like();
    let tr = solve(&p, -20.0, Direction::Backward, &SolveOptions::default()).unwrap();
    let grid = tr.sample(20_001);
    let changes = grid
        .windows(2)
        .filter(|w| w[0].1[0].signum() != w[1].1[0].signum())
        .count();
    assert_eq!(changes, 3);
    for t in [-1.0, -5.0, -12.5, -20.0] {
        let x = tr.evaluate(t).unwrap()[0];
        assert!((x - f(t)).abs() < 1e-6 * f(t).abs().max(1.0), "t = {t}");
    }
}

#[test]
fn error_shrinks_with_step_at_fourth_order_or_better() {
    let p = linear_like();
    let reference = f(4.0);
    let err = |h: f64| {
        let opts = SolveOptions {
            fixed_step: Some(h),
            ..SolveOptions::with_tol(1e-13)
        };
        let tr = solve(&p, 4.0, Direction::Forward, &opts).unwrap();
        (tr.evaluate(4.0).unwrap()[0] - reference).abs()
    };
    let e1 = err(0.2);
    let e2 = err(0.1);
    let order = (e1 / e2).log2();
    assert!(order >= 4.0, "observed order {order} ({e1:e}, {e2:e})");
}

#[test]
fn tighter_tolerance_reduces_error() {
    let p = linear_like();
    let reference = f(10.0);
    let errs: Vec<f64> = [1e-6, 1e-8, 1e-10]
        .iter()
        .map(|&tol| {
            let tr = solve(&p, 10.0, Direction::Forward, &SolveOptions::with_tol(tol)).unwrap();
            (tr.evaluate(10.0).unwrap()[0] - reference).abs() / reference
        })
        .collect();
    assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
}

#[test]
fn midpoint_agrees_with_half_tolerance_resolve() {
    let p = linear_like();
    let tol = 1e-8;
    let a = solve(&p, 8.0, Direction::Forward, &SolveOptions::with_tol(tol)).unwrap();
    let b = solve(&p, 8.0, Direction::Forward, &SolveOptions::with_tol(tol / 2.0)).unwrap();
    for st in a.steps() {
        let t = st.tau0 + st.h / 2.0;
        let xa = a.evaluate(t).unwrap()[0];
        let xb = b.evaluate(t).unwrap()[0];
        assert!((xa - xb).abs() <= 5.0 * tol * xa.abs().max(1.0), "t = {t}");
    }
}

#[test]
fn wave_mode_integrates_and_is_consistent() {
    let p = make_builtin(
        "wave_mode",
        &BuiltinParams {
            lambda: Some(2.0),
            ..Default::default()
        },
    )
    .unwrap();
    let tr = solve(&p, 6.0, Direction::Forward, &SolveOptions::default()).unwrap();
    assert!(residual(&tr, &p, 500) < 1e-6);
    // u = 1 - 2t² + t⁴/6 + … for λ = 2
    let u = tr.evaluate(1e-2).unwrap()[0];
    assert!((u - (1.0 - 2.0 * 1e-4)).abs() < 1e-8);
}

#[test]
fn delayed_builtins_reach_far_horizons() {
    for name in ["linear_like", "riccati_like"] {
        let p = make_builtin(name, &BuiltinParams::default()).unwrap();
        let end = if name == "riccati_like" { 20.0 } else { 40.0 };
        assert!(solve(&p, end, Direction::Forward, &SolveOptions::default()).is_ok(), "{name}");
    }
}

#[test]
fn distinct_problems_solve_concurrently() {
    let probs: Vec<_> = [0.5, 1.0, 2.0]
        .iter()
        .map(|&x0| {
            make_builtin(
                "linear_like",
                &BuiltinParams {
                    x0: Some(vec![x0]),
                    ..Default::default()
                },
            )
            .unwrap()
        })
        .collect();
    let handles: Vec<_> = probs
        .into_iter()
        .map(|p| std::thread::spawn(move || solve(&p, 5.0, Direction::Forward, &SolveOptions::default())))
        .collect();
    let values: Vec<f64> = handles
        .into_iter()
        .map(|h| h.join().unwrap().unwrap().evaluate(5.0).unwrap()[0])
        .collect();
    assert!((values[1] - 2.0 * values[0]).abs() < 1e-9 * values[1]);
    assert!((values[2] - 2.0 * values[1]).abs() < 1e-9 * values[2]);
}
