use nalgebra::DVector;

use super::{Delay, FodeError, PantographProblem};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Mixed absolute/relative local error tolerance.
    pub tol: f64,
    /// State norm that counts as blow-up.
    pub blow_up_norm: f64,
    pub max_steps: usize,
    /// Fixed-point sweeps allowed per step before the step is halved.
    pub max_fixed_point_iters: usize,
    /// Use this step size without error control (convergence studies).
    pub fixed_step: Option<f64>,
    /// Upper bound on the adaptive step; keeps the dense output (one order below the
    /// step) at the accuracy of the nodes.
    pub max_step: f64,
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Default::default()
        }
    }
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            blow_up_norm: 1e12,
            max_steps: 5_000_000,
            max_fixed_point_iters: 25,
            fixed_step: None,
            max_step: 0.1,
        }
    }
}

/// Counters collected while solving.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    pub fixed_point_sweeps: usize,
    pub fixed_point_failures: usize,
    /// Delayed lookups served from already accepted steps.
    pub history_lookups: usize,
    /// Delayed lookups inside the step being computed.
    pub in_step_lookups: usize,
    /// Lookups at or beyond the stage time; stays 0 for a valid problem.
    pub causality_violations: usize,
}

/// One accepted step in reflected time `τ = ±t`, with its dense-output coefficients.
#[derive(Clone, Debug)]
pub struct Step {
    pub tau0: f64,
    pub h: f64,
    pub y0: DVector<f64>,
    pub y1: DVector<f64>,
    rc: [DVector<f64>; 5],
}

impl Step {
    fn eval(&self, theta: f64) -> DVector<f64> {
        let [r1, r2, r3, r4, r5] = &self.rc;
        let u = 1.0 - theta;
        r1 + (r2 + (r3 + (r4 + r5 * u) * theta) * u) * theta
    }

    /// `dy/dτ` at `θ`.
    fn deriv(&self, theta: f64) -> DVector<f64> {
        let [_, r2, r3, r4, r5] = &self.rc;
        let u = 1.0 - theta;
        let g = r3 + (r4 + r5 * u) * theta;
        let dg = r4 + r5 * (1.0 - 2.0 * theta);
        (r2 + g * (1.0 - 2.0 * theta) + dg * (theta * u)) / self.h
    }
}

/// A solved trajectory on `[t_lo, t_hi] ∋ 0`; immutable once built.
#[derive(Clone, Debug)]
pub struct DenseTrajectory {
    direction: Direction,
    x0: DVector<f64>,
    tau_end: f64,
    steps: Vec<Step>,
    stats: SolveStats,
}

impl DenseTrajectory {
    pub fn t_lo(&self) -> f64 {
        match self.direction {
            Direction::Forward => 0.0,
            Direction::Backward => -self.tau_end,
        }
    }

    pub fn t_hi(&self) -> f64 {
        match self.direction {
            Direction::Forward => self.tau_end,
            Direction::Backward => 0.0,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Node times in `t`, starting at 0.
    pub fn nodes(&self) -> Vec<f64> {
        let s = self.direction.sign();
        std::iter::once(0.0)
            .chain(self.steps.iter().map(|st| s * (st.tau0 + st.h)))
            .collect()
    }

    fn tau_of(&self, t: f64) -> Result<f64, FodeError> {
        let tau = self.direction.sign() * t;
        let slack = 1e-12 * self.tau_end.max(1.0);
        if !(tau >= -slack && tau <= self.tau_end + slack) {
            return Err(FodeError::OutOfRange {
                t,
                lo: self.t_lo(),
                hi: self.t_hi(),
            });
        }
        Ok(tau.clamp(0.0, self.tau_end))
    }

    fn locate(&self, tau: f64) -> Option<(&Step, f64)> {
        locate(&self.steps, tau)
    }

    pub fn evaluate(&self, t: f64) -> Result<DVector<f64>, FodeError> {
        let tau = self.tau_of(t)?;
        Ok(history(&self.steps, &self.x0, tau))
    }

    pub fn derivative(&self, t: f64) -> Result<DVector<f64>, FodeError> {
        let tau = self.tau_of(t)?;
        let s = self.direction.sign();
        match self.locate(tau) {
            Some((st, th)) => Ok(st.deriv(th) * s),
            None => Err(FodeError::OutOfRange {
                t,
                lo: self.t_lo(),
                hi: self.t_hi(),
            }),
        }
    }

    /// `(t, x(t))` on `n` uniformly spaced points covering the solved interval.
    pub fn sample(&self, n: usize) -> Vec<(f64, DVector<f64>)> {
        let (lo, hi) = (self.t_lo(), self.t_hi());
        (0..n)
            .map(|i| {
                let t = if n == 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                };
                let x = self.evaluate(t).expect("grid within the solved interval");
                (t, x)
            })
            .collect()
    }
}

fn locate(steps: &[Step], tau: f64) -> Option<(&Step, f64)> {
    if steps.is_empty() {
        return None;
    }
    let i = steps.partition_point(|s| s.tau0 <= tau).max(1) - 1;
    let st = &steps[i];
    Some((st, ((tau - st.tau0) / st.h).clamp(0.0, 1.0)))
}

fn history(steps: &[Step], x0: &DVector<f64>, tau: f64) -> DVector<f64> {
    if tau <= 0.0 {
        return x0.clone();
    }
    match locate(steps, tau) {
        None => x0.clone(),
        Some((st, th)) if th >= 1.0 => st.y1.clone(),
        Some((st, th)) => st.eval(th),
    }
}

/// Source of in-step delayed values for the current fixed-point sweep.
enum Guess<'a> {
    Linear { y: &'a DVector<f64>, k: &'a DVector<f64>, tau: f64 },
    Extrapolate(&'a Step),
    Iterate(Box<Step>),
}

impl Guess<'_> {
    fn eval(&self, tau: f64) -> DVector<f64> {
        match self {
            Guess::Linear { y, k, tau: t0 } => *y + *k * (tau - t0),
            Guess::Extrapolate(s) => s.eval((tau - s.tau0) / s.h),
            Guess::Iterate(s) => s.eval((tau - s.tau0) / s.h),
        }
    }
}

struct Ctx<'a> {
    p: &'a PantographProblem,
    sign: f64,
    steps: &'a [Step],
    stats: &'a mut SolveStats,
}

impl Ctx<'_> {
    fn delayed(
        &mut self,
        d: &Delay,
        tau_s: f64,
        y: &DVector<f64>,
        tau_n: f64,
        guess: &Guess<'_>,
        in_step: &mut bool,
    ) -> DVector<f64> {
        if d.is_identity() {
            return y.clone();
        }
        let tau_d = self.sign * d.apply(self.sign * tau_s);
        if tau_s > 0.0 && tau_d >= tau_s {
            self.stats.causality_violations += 1;
        }
        if tau_d <= tau_n {
            self.stats.history_lookups += 1;
            history(self.steps, self.p.x0(), tau_d)
        } else {
            self.stats.in_step_lookups += 1;
            *in_step = true;
            guess.eval(tau_d)
        }
    }

    fn rhs(
        &mut self,
        tau_s: f64,
        y: &DVector<f64>,
        tau_n: f64,
        guess: &Guess<'_>,
        in_step: &mut bool,
    ) -> DVector<f64> {
        self.stats.rhs_evals += 1;
        let x_phi = self.delayed(self.p.phi(), tau_s, y, tau_n, guess, in_step);
        let x_psi = self.delayed(self.p.psi(), tau_s, y, tau_n, guess, in_step);
        self.p.rhs(self.sign * tau_s, y, &x_phi, &x_psi) * self.sign
    }
}

struct Attempt {
    step: Step,
    k7: DVector<f64>,
    err: f64,
}

fn scaled_max(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs() / (1.0 + y.abs()))
        .fold(0.0, f64::max)
}

fn attempt(
    ctx: &mut Ctx<'_>,
    tau_n: f64,
    y0: &DVector<f64>,
    k1: &DVector<f64>,
    h: f64,
    opts: &SolveOptions,
) -> Option<Attempt> {
    let prev = ctx.steps.last();
    let mut guess = match prev {
        Some(s) => Guess::Extrapolate(s),
        None => Guess::Linear {
            y: y0,
            k: k1,
            tau: tau_n,
        },
    };
    let mut last_y1: Option<DVector<f64>> = None;
    for _ in 0..opts.max_fixed_point_iters.max(1) {
        ctx.stats.fixed_point_sweeps += 1;
        let mut in_step = false;
        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        k.push(k1.clone());
        let rows: [&[f64]; 5] = [&A2, &A3, &A4, &A5, &A6];
        for (i, row) in rows.iter().enumerate() {
            let mut y = y0.clone();
            for (a, kj) in row.iter().zip(&k) {
                y.axpy(h * a, kj, 1.0);
            }
            let ki = ctx.rhs(tau_n + C[i + 1] * h, &y, tau_n, &guess, &mut in_step);
            k.push(ki);
        }
        let mut y1 = y0.clone();
        for (b, kj) in B.iter().zip(&k) {
            y1.axpy(h * b, kj, 1.0);
        }
        let k7 = ctx.rhs(tau_n + h, &y1, tau_n, &guess, &mut in_step);
        k.push(k7);

        let mut e = DVector::zeros(y0.len());
        let mut r5 = DVector::zeros(y0.len());
        for j in 0..7 {
            e.axpy(h * E[j], &k[j], 1.0);
            r5.axpy(h * D[j], &k[j], 1.0);
        }
        let r2 = &y1 - y0;
        let r3 = &k[0] * h - &r2;
        let r4 = &r2 - &k[6] * h - &r3;
        let step = Step {
            tau0: tau_n,
            h,
            y0: y0.clone(),
            y1: y1.clone(),
            rc: [y0.clone(), r2, r3, r4, r5],
        };
        let k7 = k.pop().unwrap();
        let converged = match &last_y1 {
            _ if !in_step => true,
            Some(prev) => scaled_max(&y1, prev) < opts.tol / 10.0,
            None => false,
        };
        if converged {
            let err = if y0.is_empty() {
                0.0
            } else {
                let s: f64 = e
                    .iter()
                    .zip(y0.iter().zip(y1.iter()))
                    .map(|(ei, (a, b))| {
                        let sc = opts.tol * (1.0 + a.abs().max(b.abs()));
                        (ei / sc).powi(2)
                    })
                    .sum();
                (s / y0.len() as f64).sqrt()
            };
            return Some(Attempt {
                step,
                k7,
                err: if err.is_finite() { err } else { f64::INFINITY },
            });
        }
        last_y1 = Some(y1);
        guess = Guess::Iterate(Box::new(step));
    }
    ctx.stats.fixed_point_failures += 1;
    None
}

/// Integrates `p` from `t = 0` to `t_end` (positive forward, negative backward).
pub fn solve(
    p: &PantographProblem,
    t_end: f64,
    direction: Direction,
    opts: &SolveOptions,
) -> Result<DenseTrajectory, FodeError> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(FodeError::InvalidArgument("tol must be positive".into()));
    }
    if opts.max_step.is_nan() || opts.max_step <= 0.0 {
        return Err(FodeError::InvalidArgument("max_step must be positive".into()));
    }
    let sign = direction.sign();
    let tau_end = sign * t_end;
    if !(tau_end > 0.0 && tau_end.is_finite()) {
        return Err(FodeError::InvalidArgument(format!(
            "t_end = {t_end} does not match the {direction:?} direction"
        )));
    }
    if direction == Direction::Backward {
        if let Some((which, t)) = p.backward_delays_valid() {
            return Err(FodeError::InvalidDelay { which, t });
        }
    }
    let mut steps: Vec<Step> = Vec::new();
    let mut stats = SolveStats::default();
    let mut tau = 0.0;
    let mut y = p.x0().clone();
    let mut k1 = {
        let mut ctx = Ctx {
            p,
            sign,
            steps: &steps,
            stats: &mut stats,
        };
        let g = Guess::Linear {
            y: &y,
            k: &y,
            tau: 0.0,
        };
        ctx.rhs(0.0, &y, 0.0, &g, &mut false)
    };
    let f0 = k1.amax();
    let mut h = match opts.fixed_step {
        Some(hf) if hf > 0.0 => hf,
        Some(_) => return Err(FodeError::InvalidArgument("fixed step must be positive".into())),
        None => (opts.tol.powf(0.2) / f0.max(1.0)).min(opts.max_step),
    }
    .min(tau_end);

    while tau < tau_end {
        if steps.len() >= opts.max_steps {
            return Err(FodeError::MaxSteps(opts.max_steps));
        }
        let last = tau + h >= tau_end * (1.0 - 1e-14);
        let h_try = if last { tau_end - tau } else { h };
        let h_min = 1e-13 * tau.max(1.0);
        if h_try < h_min && !last {
            let norm = y.amax();
            if norm > opts.blow_up_norm.sqrt() {
                return Err(FodeError::BlowUp { t: sign * tau, norm });
            }
            return Err(FodeError::StepTooSmall { t: sign * tau, h: h_try });
        }
        let res = {
            let mut ctx = Ctx {
                p,
                sign,
                steps: &steps,
                stats: &mut stats,
            };
            attempt(&mut ctx, tau, &y, &k1, h_try, opts)
        };
        let Some(att) = res else {
            h = h_try / 2.0;
            continue;
        };
        if opts.fixed_step.is_some() || att.err <= 1.0 {
            let norm = att.step.y1.amax();
            let t_new = if last { tau_end } else { tau + h_try };
            if !norm.is_finite() || norm > opts.blow_up_norm {
                return Err(FodeError::BlowUp {
                    t: sign * t_new,
                    norm,
                });
            }
            stats.accepted += 1;
            y = att.step.y1.clone();
            k1 = att.k7;
            steps.push(att.step);
            tau = t_new;
            if opts.fixed_step.is_none() {
                let fac = if att.err == 0.0 {
                    5.0
                } else {
                    (0.9 * att.err.powf(-0.2)).clamp(0.2, 5.0)
                };
                h = (h_try * fac).min(opts.max_step);
            }
        } else {
            stats.rejected += 1;
            h = h_try * (0.9 * att.err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(DenseTrajectory {
        direction,
        x0: p.x0().clone(),
        tau_end,
        steps,
        stats,
    })
}

/// Largest mixed residual `|x'(t) - RHS(t)| / (1 + |x(t)|)` over `sample_count` uniform
/// points of the trajectory, using the interpolated derivative and delayed lookups.
pub fn residual(traj: &DenseTrajectory, p: &PantographProblem, sample_count: usize) -> f64 {
    let (lo, hi) = (traj.t_lo(), traj.t_hi());
    let lookup = |d: &Delay, t: f64, x: &DVector<f64>| -> DVector<f64> {
        if d.is_identity() {
            x.clone()
        } else {
            traj.evaluate(d.apply(t)).expect("delayed time inside the trajectory")
        }
    };
    (0..sample_count)
        .map(|i| {
            let t = if sample_count == 1 {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (sample_count - 1) as f64
            };
            let x = traj.evaluate(t).unwrap();
            let dx = traj.derivative(t).unwrap();
            let r = p.rhs(t, &x, &lookup(p.phi(), t, &x), &lookup(p.psi(), t, &x));
            (dx - r).amax() / (1.0 + x.amax())
        })
        .fold(0.0, f64::max)
}
