//! One function per subcommand, each producing a [`Table`].

use std::fmt::Display;

use pantograph::fode::{self, BuiltinParams, Direction, SolveOptions};
use pantograph::heat::{self, InitialDatum, UniformGrid};
use pantograph::rational::{from_f64, pow2, rat, to_f64};
use pantograph::series::{self, SeriesSpec};
use pantograph::transport::{self, ClassicalOutcome};
use pantograph::truncation;
use pantograph::zeros::{self, ComplexBox, WindingOptions, ZeroRecord};
use pantograph::{Budget, Exec, Rational};

use crate::args::*;
use crate::emit::{Cell, Table};
use crate::CliError;

/// Settings shared by every subcommand.
pub struct Ctx {
    pub tol: f64,
    pub budget: Budget,
    pub exec: Exec,
}

fn compute<E: Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn exact(x: f64, what: &str) -> Result<Rational, CliError> {
    from_f64(x).ok_or_else(|| usage(format!("{what} must be finite, got {x}")))
}

fn uniform(a: f64, b: f64, n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 || a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
        return Err(usage(format!("need A < B and at least 2 points, got [{a}, {b}] with {n}")));
    }
    let h = (b - a) / (n - 1) as f64;
    Ok((0..n).map(|i| if i + 1 == n { b } else { a + i as f64 * h }).collect())
}

fn width_tol(ctx: &Ctx) -> Result<Rational, CliError> {
    exact(ctx.tol, "--tol")
}

pub fn eval(a: &EvalArgs, ctx: &Ctx) -> Result<Table, CliError> {
    let spec = SeriesSpec::new(exact(a.alpha, "--alpha")?).map_err(|e| usage(e.to_string()))?;
    let mut xs = a.x.clone();
    if let Some(r) = &a.range {
        xs.extend(uniform(r[0], r[1], a.points)?);
    }
    if xs.is_empty() {
        return Err(usage("eval needs --x or --range"));
    }
    let rows = ctx.exec.map(&xs, |&x| -> Result<Vec<Cell>, CliError> {
        let v = series::eval_float(x, ctx.tol, &spec, &ctx.budget).map_err(compute)?;
        let abs = exact(ctx.tol * v.abs().max(f64::MIN_POSITIVE), "--tol")?;
        let iv = series::eval_interval(&exact(x, "--x")?, &abs, &spec, &ctx.budget)
            .map_err(compute)?;
        Ok(vec![x.into(), v.into(), to_f64(&iv.lo()).into(), to_f64(&iv.hi()).into()])
    });
    let mut t = Table::new(["x", "f", "lo", "hi"]);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

fn zero_row(r: &ZeroRecord) -> Vec<Cell> {
    vec![
        r.n.into(),
        to_f64(&r.lo).into(),
        to_f64(&r.hi).into(),
        r.theta.lo_f64().into(),
        r.theta.hi_f64().into(),
    ]
}

pub fn zeros(a: &ZerosArgs, ctx: &Ctx) -> Result<Table, CliError> {
    let tol = width_tol(ctx)?;
    let recs = match a.x_min {
        Some(x) => zeros::zeros_in_range(&exact(x, "--x-min")?, &tol, &ctx.budget, ctx.exec),
        None => zeros::locate_zeros(a.n_max, &tol, &ctx.budget, ctx.exec),
    }
    .map_err(compute)?;
    let mut t = Table::new(["n", "lo", "hi", "theta_lo", "theta_hi"]);
    for r in &recs {
        t.push(zero_row(r));
    }
    Ok(t)
}

pub fn theta(a: &ThetaArgs, ctx: &Ctx) -> Result<Table, CliError> {
    let entries = zeros::theta_sequence(a.n_max, &width_tol(ctx)?, a.window_from, &ctx.budget, ctx.exec)
        .map_err(compute)?;
    let c = zeros::limit_constant(a.pairs).map_err(compute)?;
    let cc = zeros::limit_constant_conjecture(&rat(2, 1), a.terms).map_err(compute)?;
    let c_mid = c.enclosure.mid_f64();
    let mut t = Table::new([
        "n",
        "theta_lo",
        "theta_hi",
        "n_theta_lo",
        "n_theta_hi",
        "window",
        "distance_to_c",
        "c_lo",
        "c_hi",
        "c_h_lo",
        "c_h_hi",
    ]);
    for e in &entries {
        t.push(vec![
            e.n.into(),
            e.theta.lo_f64().into(),
            e.theta.hi_f64().into(),
            e.n_theta.lo_f64().into(),
            e.n_theta.hi_f64().into(),
            e.window.into(),
            (e.n_theta.mid_f64() - c_mid).abs().into(),
            c.enclosure.lo_f64().into(),
            c.enclosure.hi_f64().into(),
            cc.enclosure.lo_f64().into(),
            cc.enclosure.hi_f64().into(),
        ]);
    }
    Ok(t)
}

/// Smallest `N` with `R/((N+1)·2^N) ≤ 1/2`, plus a margin for the tail.
fn auto_truncation(bx: &ComplexBox) -> usize {
    let re = to_f64(&bx.re_lo).abs().max(to_f64(&bx.re_hi).abs());
    let im = to_f64(&bx.im_lo).abs().max(to_f64(&bx.im_hi).abs());
    let r = re.hypot(im).ceil();
    let mut n = 1usize;
    while r / ((n + 1) as f64 * 2f64.powi(n as i32)) > 0.5 {
        n += 1;
    }
    n + 8
}

pub fn boxcount(a: &BoxArgs, _ctx: &Ctx) -> Result<Table, CliError> {
    if !(a.re_lo < a.re_hi && a.im_lo < a.im_hi) {
        return Err(usage("box needs re-lo < re-hi and im-lo < im-hi"));
    }
    let bx = ComplexBox::new(
        exact(a.re_lo, "--re-lo")?,
        exact(a.re_hi, "--re-hi")?,
        exact(a.im_lo, "--im-lo")?,
        exact(a.im_hi, "--im-hi")?,
    );
    let n = a.n_trunc.unwrap_or_else(|| auto_truncation(&bx));
    let opts = WindingOptions {
        initial_segments: a.segments,
        max_depth: a.depth,
    };
    let r = zeros::count_zeros_in_box(&bx, n, &opts).map_err(compute)?;
    let mut t = Table::new([
        "re_lo", "re_hi", "im_lo", "im_hi", "n_trunc", "zeros", "samples", "min_modulus_log2", "tail_log2",
    ]);
    t.push(vec![
        a.re_lo.into(),
        a.re_hi.into(),
        a.im_lo.into(),
        a.im_hi.into(),
        n.into(),
        r.zeros.into(),
        r.samples.into(),
        r.min_modulus_log2.into(),
        r.tail_log2.into(),
    ]);
    Ok(t)
}

pub fn truncpoly(a: &TruncArgs, ctx: &Ctx) -> Result<Table, CliError> {
    if a.n_min > a.n_max {
        return Err(usage("need n-min ≤ n-max"));
    }
    if a.discriminant {
        let mut t = Table::new(["n", "cardano", "classical", "closed_form", "matches"]);
        for n in a.n_min..=a.n_max {
            let d = truncation::derivative_cubic_discriminant(n as u32).map_err(compute)?;
            t.push(vec![
                n.into(),
                d.cardano.to_string().into(),
                d.classical.to_string().into(),
                pow2(6 * n as i64 - 12).to_string().into(),
                d.matches_closed_form().into(),
            ]);
        }
        return Ok(t);
    }
    let invs = truncation::analyze_range(a.n_min..=a.n_max, &width_tol(ctx)?, ctx.exec);
    let mut t = Table::new([
        "N",
        "sturm_count",
        "real_roots",
        "count_ok",
        "roots",
        "root_bounds_ok",
        "modulus_sq_lo",
        "modulus_sq_hi",
        "modulus_ok",
    ]);
    for inv in invs {
        let inv = inv.map_err(compute)?;
        let roots: Vec<String> = inv
            .real_roots
            .iter()
            .map(|r| format!("{}:{}", crate::emit::format_float(to_f64(&r.lo)), crate::emit::format_float(to_f64(&r.hi))))
            .collect();
        t.push(vec![
            inv.degree.into(),
            inv.sturm_count.into(),
            inv.real_roots.len().into(),
            (inv.sturm_count + 2 == inv.degree).into(),
            roots.join(";").into(),
            inv.root_bounds_hold().into(),
            inv.complex_pair_modulus_sq.lo_f64().into(),
            inv.complex_pair_modulus_sq.hi_f64().into(),
            inv.modulus_bound_holds().into(),
        ]);
    }
    Ok(t)
}

pub fn ode(a: &OdeArgs, ctx: &Ctx) -> Result<Table, CliError> {
    let params = BuiltinParams {
        x0: a.x0.clone(),
        lambda: a.lambda,
        alpha: a.alpha,
    };
    let p = fode::make_builtin(&a.problem, &params).map_err(|e| match e {
        fode::FodeError::UnknownBuiltin(_) | fode::FodeError::InvalidArgument(_) => usage(e.to_string()),
        e => compute(e),
    })?;
    if a.t_end == 0.0 || !a.t_end.is_finite() {
        return Err(usage("--t-end must be finite and non-zero"));
    }
    let dir = if a.t_end > 0.0 { Direction::Forward } else { Direction::Backward };
    let mut opts = SolveOptions::with_tol(ctx.tol);
    opts.blow_up_norm = a.blow_up_norm;
    let traj = fode::solve(&p, a.t_end, dir, &opts).map_err(compute)?;
    let (lo, hi) = if a.t_end > 0.0 { (0.0, a.t_end) } else { (a.t_end, 0.0) };
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=p.dim()).map(|i| format!("x_{i}")));
    let mut t = Table::new(cols);
    for s in uniform(lo, hi, a.points)? {
        let x = traj.evaluate(s).map_err(compute)?;
        let mut row = vec![Cell::from(s)];
        row.extend(x.iter().map(|&v| Cell::from(v)));
        t.push(row);
    }
    Ok(t)
}

fn time_label(prefix: &str, t: f64) -> String {
    format!("{prefix}(t={t})")
}

pub fn heat(a: &HeatArgs, ctx: &Ctx) -> Result<Table, CliError> {
    if a.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(usage("--times must be finite and non-negative"));
    }
    let datum = match a.datum {
        Datum::Gaussian => InitialDatum::gaussian(a.param),
        Datum::Lorentzian => InitialDatum::Lorentzian { gamma: a.param },
        Datum::Triangle => InitialDatum::Triangle { half_width: a.param },
    };
    let grid = UniformGrid::new(a.x_min, a.x_max, a.points).map_err(|e| usage(e.to_string()))?;
    let t_max = a.times.iter().cloned().fold(0.0, f64::max);
    let sd = heat::spectral_density(&datum, t_max, ctx.tol).map_err(compute)?;
    let evs = a
        .times
        .iter()
        .map(|&t| heat::evolve(&sd, t, &grid, ctx.tol, ctx.exec).map_err(compute))
        .collect::<Result<Vec<_>, _>>()?;
    if a.spectrum {
        let mut t = Table::new([
            "t", "lambda", "weight", "transform_re", "transform_im", "kernel", "mode_re", "mode_im",
        ]);
        for ev in &evs {
            for m in &ev.modes {
                t.push(vec![
                    ev.field.t.into(),
                    m.lambda.into(),
                    m.weight.into(),
                    m.transform.re.into(),
                    m.transform.im.into(),
                    m.kernel.into(),
                    m.mode.re.into(),
                    m.mode.im.into(),
                ]);
            }
        }
        return Ok(t);
    }
    let mut cols = vec!["x".to_string()];
    cols.extend(a.times.iter().map(|&t| time_label("u", t)));
    let mut t = Table::new(cols);
    for (i, x) in grid.points().into_iter().enumerate() {
        let mut row = vec![Cell::from(x)];
        row.extend(evs.iter().map(|ev| Cell::from(ev.field.values[i])));
        t.push(row);
    }
    Ok(t)
}

fn classical_field(t: f64, p: usize, exec: Exec) -> Result<Option<(transport::PeriodicField, f64, f64)>, CliError> {
    Ok(match transport::classical_burgers(t, p, exec).map_err(compute)? {
        ClassicalOutcome::Smooth {
            field,
            max_gradient,
            max_gradient_exact,
        } => Some((field, max_gradient, max_gradient_exact)),
        ClassicalOutcome::ShockFormed { .. } => None,
    })
}

pub fn burgers(a: &BurgersArgs, ctx: &Ctx) -> Result<Table, CliError> {
    let want_c = a.mode != BurgersMode::Functional;
    let want_f = a.mode != BurgersMode::Classical;
    if !(a.h > 0.0 && a.t_end >= 0.0) {
        return Err(usage("need h > 0 and t-end ≥ 0"));
    }
    let run = if want_f {
        Some(transport::functional_burgers(a.t_end, a.points, a.h, ctx.exec).map_err(compute)?)
    } else {
        None
    };
    let times: Vec<f64> = match (&a.times, &run) {
        (Some(ts), _) => ts.clone(),
        (None, Some(r)) => r.gradient_trace.iter().map(|g| g.0).collect(),
        (None, None) => {
            let n = (a.t_end / a.h).round() as usize;
            (0..=n).map(|k| k as f64 * a.h).collect()
        }
    };
    if let Some(ts) = &a.times {
        if ts.iter().any(|t| !(*t >= 0.0 && *t <= a.t_end)) {
            return Err(usage("--times must lie in [0, t-end]"));
        }
        let classical: Vec<_> = if want_c {
            ts.iter().map(|&t| classical_field(t, a.points, ctx.exec)).collect::<Result<_, _>>()?
        } else {
            Vec::new()
        };
        let functional: Vec<_> = match &run {
            Some(r) => ts.iter().map(|&t| r.history.at(t).map_err(compute)).collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        let mut cols = vec!["x".to_string()];
        for &t in ts {
            if want_c {
                cols.push(time_label("classical", t));
            }
            if want_f {
                cols.push(time_label("functional", t));
            }
        }
        let mut table = Table::new(cols);
        let dx = 2.0 * std::f64::consts::PI / a.points as f64;
        for i in 0..a.points {
            let mut row = vec![Cell::from(i as f64 * dx)];
            for k in 0..ts.len() {
                if want_c {
                    row.push(classical[k].as_ref().map(|c| c.0.values[i]).into());
                }
                if want_f {
                    row.push(functional[k].values[i].into());
                }
            }
            table.push(row);
        }
        return Ok(table);
    }
    let mut table = Table::new(["t", "functional_max_grad", "classical_max_grad", "classical_max_grad_exact"]);
    for (k, &t) in times.iter().enumerate() {
        let fg = run.as_ref().map(|r| r.gradient_trace[k].1);
        let (cg, ce) = if want_c {
            match classical_field(t, a.points, ctx.exec)? {
                Some((_, g, e)) => (Some(g), Some(e)),
                None => (None, None),
            }
        } else {
            (None, None)
        };
        table.push(vec![t.into(), fg.into(), cg.into(), ce.into()]);
    }
    Ok(table)
}

pub fn figures(a: &FiguresArgs, ctx: &Ctx) -> Result<Table, CliError> {
    let (lo, hi) = match &a.range {
        Some(r) => (r[0], r[1]),
        None => match a.figure {
            1 => (-20.0, 0.0),
            2 => (-1000.0, 0.0),
            _ => (-5000.0, 0.0),
        },
    };
    let spec = SeriesSpec::pantograph();
    let xs = uniform(lo, hi, a.points)?;
    let vals = ctx.exec.map(&xs, |&x| series::eval_float(x, ctx.tol, &spec, &ctx.budget));
    let mut t = Table::new(["t", "f"]);
    for (x, v) in xs.iter().zip(vals) {
        t.push(vec![(*x).into(), v.map_err(compute)?.into()]);
    }
    Ok(t)
}
