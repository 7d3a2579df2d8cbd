use pantograph::transport::{classical_burgers, functional_burgers, ClassicalOutcome};
use pantograph::Exec;

fn smooth(t: f64) -> (pantograph::transport::PeriodicField, f64) {
    match classical_burgers(t, 512, Exec::default()).unwrap() {
        ClassicalOutcome::Smooth {
            field, max_gradient, ..
        } => (field, max_gradient),
        o => panic!("unexpected {o:?}"),
    }
}

#[test]
fn classical_gradient_follows_inverse_law() {
    for t in [0.25, 0.5, 0.75] {
        let (_, g) = smooth(t);
        assert!((g * (1.0 - t) - 1.0).abs() < 0.02, "t = {t}: {g}");
    }
    match classical_burgers(1.01, 512, Exec::default()).unwrap() {
        ClassicalOutcome::ShockFormed { shock_time, .. } => {
            assert!((shock_time - 1.0).abs() < 0.02)
        }
        o => panic!("{o:?}"),
    }
}

#[test]
fn classical_solution_satisfies_characteristic_relation() {
    let (u, _) = smooth(0.6);
    for (i, v) in u.values.iter().enumerate() {
        assert!((v - (u.x(i) - 0.6 * v).sin()).abs() < 1e-13);
    }
}

#[test]
fn functional_agrees_with_classical_at_early_times() {
    let run = functional_burgers(0.1, 512, 0.01, Exec::default()).unwrap();
    let (c, _) = smooth(0.1);
    let d = c.max_abs_diff(run.history.latest());
    assert!(d < 0.01, "{d}");
}

#[test]
fn functional_conserves_mean() {
    let run = functional_burgers(1.0, 256, 0.01, Exec::default()).unwrap();
    assert!(run.mean_drift < 1e-12, "{}", run.mean_drift);
}

#[test]
fn functional_is_second_order_in_time() {
    let at = |h: f64| {
        functional_burgers(1.0, 512, h, Exec::default())
            .unwrap()
            .history
            .latest()
            .clone()
    };
    let (a, b, c) = (at(0.02), at(0.01), at(0.005));
    let ratio = a.max_abs_diff(&b) / b.max_abs_diff(&c);
    assert!((3.0..5.0).contains(&ratio), "{ratio}");
}

#[test]
fn functional_trace_covers_every_step() {
    let run = functional_burgers(0.5, 128, 0.05, Exec::default()).unwrap();
    assert_eq!(run.gradient_trace.len(), 11);
    assert!((run.gradient_trace[0].1 - 1.0).abs() < 1e-3);
    assert!((run.gradient_trace[10].0 - 0.5).abs() < 1e-12);
    // a lagged coefficient steepens more slowly than the classical flow
    let (_, g) = smooth(0.5);
    assert!(run.gradient_trace[10].1 < g);
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let a = functional_burgers(0.3, 256, 0.01, Exec::Sequential).unwrap();
    let b = functional_burgers(0.3, 256, 0.01, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
