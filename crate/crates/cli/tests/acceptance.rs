//! One PASS/FAIL line per acceptance criterion, then a single verdict.

use std::io::Write;
use std::time::{Duration, Instant};

use pantograph::fode::{self, BuiltinParams, Direction, FodeError, SolveOptions};
use pantograph::heat::{self, InitialDatum, Stencil, UniformGrid};
use pantograph::rational::{from_f64, int, rat, to_f64};
use pantograph::series::{eval_float, SeriesSpec};
use pantograph::transport::{self, ClassicalOutcome};
use pantograph::truncation;
use pantograph::zeros::{self, ComplexBox, WindingOptions};
use pantograph::{Budget, CertifiedSign, Exec, Rational};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let e = start.elapsed();
    (e < limit, format!("{:.2}s of {}s", e.as_secs_f64(), limit.as_secs()))
}

fn budget() -> Budget {
    Budget::default()
}

fn f(x: f64) -> f64 {
    eval_float(x, 1e-14, &SeriesSpec::pantograph(), &budget()).unwrap()
}

fn sign_pattern() -> Outcome {
    let st = Instant::now();
    let v = zeros::sign_pattern_check(15, &budget(), Exec::default());
    let failed: Vec<u32> = v.iter().filter(|x| !x.passed()).map(|x| x.k).collect();
    let (fast, t) = within(Duration::from_secs(10), st);
    check(
        v.len() == 15 && failed.is_empty() && fast,
        format!("k = 1..15 certified, failures {failed:?}, {t}"),
    )
}

fn zero_law() -> Outcome {
    let st = Instant::now();
    let recs = zeros::locate_zeros(20, &rat(1, 1_000_000), &budget(), Exec::default()).unwrap();
    let theta_ok = recs
        .iter()
        .all(|r| r.theta.strictly_inside(&int(0), &int(1)));
    let chain_ok = recs.windows(2).all(|w| zeros::chain_holds(&w[0], &w[1]));
    let (fast, t) = within(Duration::from_secs(60), st);
    check(
        recs.len() == 20 && theta_ok && chain_ok && fast,
        format!("theta in (0,1): {theta_ok}, x_(n+1) < 2x_n: {chain_ok}, {t}"),
    )
}

fn asymptotic_constant() -> Outcome {
    let c = zeros::limit_constant(8).unwrap();
    let h = zeros::limit_constant_conjecture(&rat(2, 1), 12).unwrap();
    let agree = c.enclosure.intersects(&h.enclosure);
    let near = |iv: &pantograph::RationalInterval| iv.lo > rat(2743, 1000) && iv.hi < rat(2745, 1000);
    let consts_ok = agree && near(&c.enclosure) && near(&h.enclosure);
    let entries = zeros::theta_sequence(20, &rat(1, 1_000_000), 15, &budget(), Exec::default()).unwrap();
    let cm = c.enclosure.mid_f64();
    let tail: Vec<_> = entries.iter().filter(|e| e.n >= 15).collect();
    let worst = tail
        .iter()
        .map(|e| (e.n_theta.mid_f64() - cm).abs())
        .fold(0.0, f64::max);
    let window_ok = tail.iter().all(|e| e.window == Some(true));
    let n_theta: Vec<String> = tail.iter().map(|e| format!("{:.4}", e.n_theta.mid_f64())).collect();
    check(
        consts_ok && worst <= 0.2 && window_ok,
        format!(
            "C = {cm:.6} (enclosures agree: {agree}), n*theta_n for n = 15..20 = [{}], max |n*theta_n - C| = {worst:.3}, window held: {window_ok}",
            n_theta.join(", ")
        ),
    )
}

fn extrema() -> Outcome {
    let mut bad = Vec::new();
    for n in 1..=15u32 {
        let e = zeros::extremum_value(n, &budget()).unwrap();
        if e.sign != CertifiedSign::alternating(n as u64) || !e.amplitude_bound_holds {
            bad.push(n);
        }
    }
    let mut envelope_fail = 0;
    for i in 0..200 {
        // geometric samples on [-0.01, -5000]
        let x = -0.01 * (5e5f64).powf(i as f64 / 199.0);
        let xr: Rational = from_f64(x).unwrap();
        match zeros::gronwall_envelope_holds(&xr, &budget()).unwrap() {
            Some(true) => {}
            _ => envelope_fail += 1,
        }
    }
    check(
        bad.is_empty() && envelope_fail == 0,
        format!("extremum failures {bad:?}, envelope failures {envelope_fail}/200"),
    )
}

fn truncated_polys() -> Outcome {
    let st = Instant::now();
    let inv = truncation::analyze_range(3..=25, &rat(1, 1 << 20), Exec::default());
    let mut bad = Vec::new();
    for (i, r) in inv.iter().enumerate() {
        let n = i + 3;
        let ok = r.as_ref().is_ok_and(|r| {
            r.sturm_count == n - 2
                && r.real_roots.len() == n - 2
                && r.root_bounds_hold()
                && r.modulus_bound_holds()
        });
        if !ok {
            bad.push(n);
        }
    }
    let disc_ok = (3..=12).all(|n| {
        truncation::derivative_cubic_discriminant(n)
            .unwrap()
            .matches_closed_form()
    });
    let (fast, t) = within(Duration::from_secs(60), st);
    check(
        bad.is_empty() && disc_ok && fast,
        format!("N = 3..25 failures {bad:?}, discriminant identity n = 3..12: {disc_ok}, {t}"),
    )
}

fn off_axis() -> Outcome {
    let opts = WindingOptions::default();
    let count = |bx: ComplexBox, n: usize| zeros::count_zeros_in_box(&bx, n, &opts).map(|r| r.zeros);
    let a = count(ComplexBox::new(int(-100), int(-1), rat(1, 10), int(5)), 20);
    let b = count(ComplexBox::new(int(-256), int(-16), rat(1, 2), int(8)), 24);
    let c = count(ComplexBox::new(int(-2), int(-1), rat(-1, 2), rat(1, 2)), 20);
    check(
        matches!(a, Ok(0)) && matches!(b, Ok(0)) && matches!(c, Ok(1)),
        format!("[-100,-1]x[0.1,5]i: {a:?}, [-256,-16]x[0.5,8]i: {b:?}, box around x_1: {c:?}"),
    )
}

fn ode_solver() -> Outcome {
    let st = Instant::now();
    let opts = SolveOptions::default();
    let lin = fode::make_builtin("linear_like", &BuiltinParams::default()).unwrap();
    let tr = fode::solve(&lin, 10.0, Direction::Forward, &opts).unwrap();
    let lin_err = (0..=1000)
        .map(|i| {
            let t = 0.01 * i as f64;
            let r = f(t);
            (tr.evaluate(t).unwrap()[0] - r).abs() / r.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    let ric = fode::make_builtin("riccati_like", &BuiltinParams::default()).unwrap();
    let tr = fode::solve(&ric, 5.0, Direction::Forward, &opts).unwrap();
    let ric_err = (0..=500)
        .map(|i| {
            let t = 0.01 * i as f64;
            (tr.evaluate(t).unwrap()[0] - t.exp()).abs() / t.exp()
        })
        .fold(0.0, f64::max);
    let cr = fode::make_builtin("classical_riccati", &BuiltinParams::default()).unwrap();
    let blow = match fode::solve(&cr, 2.0, Direction::Forward, &opts) {
        Err(FodeError::BlowUp { t, .. }) => Some(t),
        _ => None,
    };
    let blow_ok = blow.is_some_and(|t| (t - 1.0).abs() <= 0.002);
    let back = fode::solve(&lin, -20.0, Direction::Backward, &opts).unwrap();
    let grid = back.sample(20_001);
    let mut changes: Vec<(f64, f64)> = grid
        .windows(2)
        .filter(|w| w[0].1[0].signum() != w[1].1[0].signum())
        .map(|w| (w[0].0.min(w[1].0), w[0].0.max(w[1].0)))
        .collect();
    changes.sort_by(|a, b| b.0.total_cmp(&a.0));
    let brackets_ok = changes.len() == 3
        && changes.iter().enumerate().all(|(k, (lo, hi))| {
            let z = zeros::bracket_for(k as u32 + 1, &budget()).unwrap();
            *lo <= to_f64(&z.hi) && *hi >= to_f64(&z.lo)
        });
    let (fast, t) = within(Duration::from_secs(30), st);
    check(
        lin_err <= 1e-6 && ric_err <= 1e-6 && blow_ok && brackets_ok && fast,
        format!(
            "linear-like err {lin_err:.1e}, riccati-like err {ric_err:.1e}, blow-up at {blow:?}, backward sign changes {} in brackets: {brackets_ok}, {t}",
            changes.len()
        ),
    )
}

fn functional_heat() -> Outcome {
    let st = Instant::now();
    let tol = 1e-9;
    let g = UniformGrid::new(-6.0, 6.0, 201).unwrap();
    let sd = heat::spectral_density(&InitialDatum::gaussian(1.0), 1.01, tol).unwrap();
    let u0 = heat::evolve(&sd, 0.0, &g, tol, Exec::default()).unwrap();
    let init_err = g
        .points()
        .iter()
        .zip(&u0.field.values)
        .map(|(x, u)| (u - (-x * x).exp()).abs())
        .fold(0.0, f64::max);
    let res: Vec<f64> = [0.1, 1.0]
        .iter()
        .map(|&t| heat::residual_check(&sd, t, &g, 1e-3, tol, Stencil::Central5, Exec::default()).unwrap())
        .collect();
    let z = heat::spectrum_zeros(1.0, 2.0, 1e-10).unwrap();
    let x1 = zeros::locate_zero(1, &rat(1, 1_000_000_000), &budget()).unwrap();
    let root = to_f64(&x1.midpoint()).abs().sqrt();
    let zero_err = z.first().map_or(f64::INFINITY, |z| (z.mid() - root).abs());
    let (fast, t) = within(Duration::from_secs(60), st);
    check(
        init_err < 1e-6 && res.iter().all(|r| *r < 1e-4) && zero_err < 1e-4 && fast,
        format!(
            "|u(0) - exp(-x^2)| = {init_err:.1e}, residual at t = 0.1, 1: {:.1e}, {:.1e}, first spectrum zero off sqrt|x_1| by {zero_err:.1e}, {t}",
            res[0], res[1]
        ),
    )
}

fn burgers_contrast() -> Outcome {
    let st = Instant::now();
    let mut law = Vec::new();
    for t in [0.25, 0.5, 0.75] {
        match transport::classical_burgers(t, 512, Exec::default()).unwrap() {
            ClassicalOutcome::Smooth { max_gradient, .. } => law.push(max_gradient * (1.0 - t)),
            ClassicalOutcome::ShockFormed { .. } => law.push(f64::NAN),
        }
    }
    let law_ok = law.iter().all(|r| (r - 1.0).abs() < 0.02);
    let before = matches!(
        transport::classical_burgers(0.98, 512, Exec::default()).unwrap(),
        ClassicalOutcome::Smooth { .. }
    );
    let shock = match transport::classical_burgers(1.02, 512, Exec::default()).unwrap() {
        ClassicalOutcome::ShockFormed { shock_time, .. } => Some(shock_time),
        _ => None,
    };
    let shock_ok = before && shock.is_some_and(|s| (s - 1.0).abs() <= 0.02);
    let run = transport::functional_burgers(3.0, 512, 0.01, Exec::default()).unwrap();
    let peak = run.max_gradient();
    let first = run.first_exceeding(2.0);
    let (fast, t) = within(Duration::from_secs(60), st);
    check(
        law_ok && shock_ok && peak <= 2.0 && fast,
        format!(
            "classical max|u_x|(1-t) = {law:.4?}, shock at {shock:?}, functional max|u_x| on [0,3] = {peak:.2} (first above 2 at t = {first:?}), {t}"
        ),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_pantograph");
    let cases: [&[&str]; 5] = [
        &["zeros", "--n-max", "8", "--tol", "1e-9"],
        &["figures", "--range", "-20", "0", "--points", "400"],
        &["heat", "--times", "0", "0.5", "--points", "41", "--format", "json"],
        &["burgers", "--t-end", "0.5", "--points", "128", "--h", "0.05"],
        &["truncpoly", "--n-max", "10"],
    ];
    let mut bad = Vec::new();
    for args in cases {
        let runs: Vec<_> = (0..2)
            .map(|_| std::process::Command::new(bin).args(args).output().unwrap())
            .collect();
        let serial = std::process::Command::new(bin)
            .args(args)
            .args(["--threads", "1"])
            .output()
            .unwrap();
        let ok = runs[0].status.success()
            && !runs[0].stdout.is_empty()
            && runs[0].stdout == runs[1].stdout
            && runs[0].stdout == serial.stdout;
        if !ok {
            bad.push(args[0]);
        }
    }
    check(bad.is_empty(), format!("{} commands, parallel/parallel/sequential byte-identical, mismatches {bad:?}", cases.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("sign pattern", sign_pattern),
        ("zero law", zero_law),
        ("asymptotic constant", asymptotic_constant),
        ("extrema", extrema),
        ("truncated polynomials", truncated_polys),
        ("no off-axis zeros", off_axis),
        ("ode solver", ode_solver),
        ("functional heat", functional_heat),
        ("burgers contrast", burgers_contrast),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    let stdout = std::io::stdout();
    writeln!(stdout.lock()).unwrap();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let mut lock = stdout.lock();
        writeln!(
            lock,
            "criterion {:>2} [{}] {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        )
        .unwrap();
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
