//! Classical Burgers `u_t + u u_x = 0` against the functional variant
//! `u_t + u(t/2, x) u_x = 0`, both from `u(0, x) = sin x` on the circle.

use std::f64::consts::PI;

use thiserror::Error;

use crate::exec::Exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("step too large: departure displacement {displacement:.3} exceeds half the domain at t = {t}")]
    StepTooLarge { t: f64, displacement: f64 },
    #[error("time {t} outside the stored history [0, {latest}]")]
    OutsideHistory { t: f64, latest: f64 },
    #[error("non-finite value at t = {0}")]
    NonFinite(f64),
}

/// Samples on `x_i = 2πi/P`, `P` a power of two.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicField {
    pub t: f64,
    pub values: Vec<f64>,
}

impl PeriodicField {
    pub fn new(t: f64, values: Vec<f64>) -> Result<Self, TransportError> {
        if values.len() < 8 || !values.len().is_power_of_two() {
            return Err(TransportError::InvalidArgument(format!(
                "grid size must be a power of two ≥ 8, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(TransportError::NonFinite(t));
        }
        Ok(Self { t, values })
    }

    pub fn from_fn(p: usize, t: f64, g: impl Fn(f64) -> f64) -> Result<Self, TransportError> {
        let dx = 2.0 * PI / p as f64;
        Self::new(t, (0..p).map(|i| g(i as f64 * dx)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    fn at(&self, i: isize) -> f64 {
        let p = self.len() as isize;
        self.values[i.rem_euclid(p) as usize]
    }

    /// Periodic cubic Lagrange interpolation through the four surrounding nodes.
    pub fn interpolate(&self, x: f64) -> f64 {
        let s = x / self.dx();
        let i = s.floor();
        let r = s - i;
        let i = i as isize;
        let (f0, f1, f2, f3) = (self.at(i - 1), self.at(i), self.at(i + 1), self.at(i + 2));
        let w0 = -r * (r - 1.0) * (r - 2.0) / 6.0;
        let w1 = (r + 1.0) * (r - 1.0) * (r - 2.0) / 2.0;
        let w2 = -(r + 1.0) * r * (r - 2.0) / 2.0;
        let w3 = (r + 1.0) * r * (r - 1.0) / 6.0;
        w0 * f0 + w1 * f1 + w2 * f2 + w3 * f3
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn max_abs_diff(&self, other: &PeriodicField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// `max |u_x|` by fourth-order centred differences.
pub fn gradient_sup(field: &PeriodicField) -> f64 {
    let h12 = 12.0 * field.dx();
    (0..field.len() as isize)
        .map(|i| {
            let d = -field.at(i + 2) + 8.0 * field.at(i + 1) - 8.0 * field.at(i - 1) + field.at(i - 2);
            (d / h12).abs()
        })
        .fold(0.0, f64::max)
}

/// Snapshots at `t = 0, h, 2h, …`, read back with linear interpolation in time.
#[derive(Clone, Debug, PartialEq)]
pub struct HistoryStore {
    h: f64,
    snapshots: Vec<PeriodicField>,
}

impl HistoryStore {
    pub fn new(h: f64, initial: PeriodicField) -> Result<Self, TransportError> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(TransportError::InvalidArgument(format!("h must be positive, got {h}")));
        }
        Ok(Self {
            h,
            snapshots: vec![initial],
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn latest(&self) -> &PeriodicField {
        self.snapshots.last().expect("history is never empty")
    }

    pub fn latest_time(&self) -> f64 {
        (self.snapshots.len() - 1) as f64 * self.h
    }

    pub fn snapshots(&self) -> &[PeriodicField] {
        &self.snapshots
    }

    fn push(&mut self, mut f: PeriodicField) {
        f.t = self.snapshots.len() as f64 * self.h;
        self.snapshots.push(f);
    }

    /// `u(τ, ·)` for `τ ∈ [0, latest]`.
    pub fn at(&self, tau: f64) -> Result<PeriodicField, TransportError> {
        let latest = self.latest_time();
        let slack = 1e-12 * self.h;
        if !(tau >= -slack && tau <= latest + slack) {
            return Err(TransportError::OutsideHistory { t: tau, latest });
        }
        let s = (tau / self.h).clamp(0.0, (self.snapshots.len() - 1) as f64);
        let i = (s.floor() as usize).min(self.snapshots.len() - 1);
        let r = s - i as f64;
        if r <= 0.0 || i + 1 >= self.snapshots.len() {
            let mut f = self.snapshots[i].clone();
            f.t = tau;
            return Ok(f);
        }
        let (a, b) = (&self.snapshots[i], &self.snapshots[i + 1]);
        Ok(PeriodicField {
            t: tau,
            values: a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| x * (1.0 - r) + y * r)
                .collect(),
        })
    }
}

/// Result of the exact-characteristics classical solve.
#[derive(Clone, Debug, PartialEq)]
pub enum ClassicalOutcome {
    Smooth {
        field: PeriodicField,
        /// `max |u_x|` by fourth-order differences on the grid.
        max_gradient: f64,
        /// `max |cos ξ / (1 + t cos ξ)|` at the grid's characteristic feet.
        max_gradient_exact: f64,
    },
    /// Characteristics have crossed: `1 + t cos ξ ≤ 0` for some foot `ξ`.
    ShockFormed { t: f64, shock_time: f64 },
}

/// Solves `u = sin(x - t u)` pointwise by Newton's method safeguarded with bisection
/// on `[-1, 1]`.
pub fn classical_burgers(t: f64, p: usize, exec: Exec) -> Result<ClassicalOutcome, TransportError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(TransportError::InvalidArgument(format!("t must be ≥ 0, got {t}")));
    }
    if p < 8 || !p.is_power_of_two() {
        return Err(TransportError::InvalidArgument(format!(
            "grid size must be a power of two ≥ 8, got {p}"
        )));
    }
    // for sin data min_ξ (1 + t cos ξ) = 1 - t
    let shock_time = 1.0;
    if t >= shock_time {
        return Ok(ClassicalOutcome::ShockFormed { t, shock_time });
    }
    let dx = 2.0 * PI / p as f64;
    let solved = exec.map_range(p, |i| {
        let x = i as f64 * dx;
        let u = solve_characteristic(x, t);
        let xi = x - t * u;
        let c = xi.cos();
        (u, (c / (1.0 + t * c)).abs())
    });
    let values: Vec<f64> = solved.iter().map(|s| s.0).collect();
    let exact = solved.iter().map(|s| s.1).fold(0.0, f64::max);
    let field = PeriodicField::new(t, values)?;
    let max_gradient = gradient_sup(&field);
    Ok(ClassicalOutcome::Smooth {
        field,
        max_gradient,
        max_gradient_exact: exact,
    })
}

fn solve_characteristic(x: f64, t: f64) -> f64 {
    let g = |u: f64| u - (x - t * u).sin();
    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut u = x.sin();
    for _ in 0..100 {
        let gu = g(u);
        if gu == 0.0 {
            return u;
        }
        if gu < 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let dg = 1.0 + t * (x - t * u).cos();
        let newton = u - gu / dg;
        let next = if dg > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - u).abs() < 1e-15 {
            return next;
        }
        u = next;
    }
    u
}

/// Output of [`functional_burgers`].
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalRun {
    pub history: HistoryStore,
    /// `(t, max |u_x|)` after every step, starting at `t = 0`.
    pub gradient_trace: Vec<(f64, f64)>,
    /// `max_t |mean u(t) - mean u(0)|`.
    pub mean_drift: f64,
}

impl FunctionalRun {
    pub fn max_gradient(&self) -> f64 {
        self.gradient_trace.iter().map(|g| g.1).fold(0.0, f64::max)
    }

    /// First time the gradient exceeds `bound`, if any.
    pub fn first_exceeding(&self, bound: f64) -> Option<f64> {
        self.gradient_trace.iter().find(|g| g.1 > bound).map(|g| g.0)
    }
}

fn average(a: &PeriodicField, b: &PeriodicField) -> PeriodicField {
    PeriodicField {
        t: 0.5 * (a.t + b.t),
        values: a
            .values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| 0.5 * (x + y))
            .collect(),
    }
}

/// Semi-Lagrangian step of `u_t + a(x) u_x = 0` with the coefficient frozen over the
/// step; the departure point solves `d = h·a(x - d/2)` by fixed-point iteration.
fn advect(
    u: &PeriodicField,
    a: &PeriodicField,
    h: f64,
    exec: Exec,
) -> Result<PeriodicField, TransportError> {
    let p = u.len();
    let out = exec.map_range(p, |i| {
        let x = u.x(i);
        let mut d = h * a.values[i];
        for _ in 0..4 {
            d = h * a.interpolate(x - 0.5 * d);
        }
        (u.interpolate(x - d), d)
    });
    if let Some(&(_, d)) = out.iter().find(|o| o.1.abs() > PI) {
        return Err(TransportError::StepTooLarge {
            t: u.t,
            displacement: d.abs(),
        });
    }
    PeriodicField::new(u.t + h, out.into_iter().map(|o| o.0).collect())
}

/// Integrates the functional equation to `T` with step `h` on a `P`-point grid.
pub fn functional_burgers(
    t_end: f64,
    p: usize,
    h: f64,
    exec: Exec,
) -> Result<FunctionalRun, TransportError> {
    if !(h > 0.0 && t_end >= 0.0 && t_end.is_finite()) {
        return Err(TransportError::InvalidArgument(format!(
            "need h > 0 and T ≥ 0, got h = {h}, T = {t_end}"
        )));
    }
    let steps_f = t_end / h;
    let steps = steps_f.round();
    if (steps_f - steps).abs() > 1e-9 * steps.max(1.0) {
        return Err(TransportError::InvalidArgument(format!(
            "T = {t_end} is not a multiple of h = {h}"
        )));
    }
    let steps = steps as usize;
    let u0 = PeriodicField::from_fn(p, 0.0, f64::sin)?;
    let mean0 = u0.mean();
    let mut trace = vec![(0.0, gradient_sup(&u0))];
    let mut history = HistoryStore::new(h, u0)?;
    let mut drift = 0.0f64;
    for k in 0..steps {
        let t = k as f64 * h;
        let u = history.latest().clone();
        let a_old = history.at(t / 2.0)?;
        let a_new = if (t + h) / 2.0 <= history.latest_time() + 1e-12 * h {
            history.at((t + h) / 2.0)?
        } else {
            // first step: (t+h)/2 is ahead of the history; predict it
            let guess = advect(&u, &a_old, h, exec)?;
            average(&u, &guess)
        };
        let a = average(&a_old, &a_new);
        let next = advect(&u, &a, h, exec)?;
        drift = drift.max((next.mean() - mean0).abs());
        trace.push(((k + 1) as f64 * h, gradient_sup(&next)));
        history.push(next);
    }
    Ok(FunctionalRun {
        history,
        gradient_trace: trace,
        mean_drift: drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_known_fields() {
        let s = PeriodicField::from_fn(256, 0.0, f64::sin).unwrap();
        assert!((gradient_sup(&s) - 1.0).abs() < 1e-4);
        let c = PeriodicField::from_fn(64, 0.0, |_| 3.0).unwrap();
        assert_eq!(gradient_sup(&c), 0.0);
        let s2 = PeriodicField::from_fn(256, 0.0, |x| (2.0 * x).sin()).unwrap();
        assert!((gradient_sup(&s2) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn cubic_interpolation_is_periodic_and_accurate() {
        let s = PeriodicField::from_fn(128, 0.0, f64::cos).unwrap();
        for x in [-0.3, 0.01, 3.3, 6.2, 7.0] {
            assert!((s.interpolate(x) - x.cos()).abs() < 1e-6, "x = {x}");
        }
    }

    #[test]
    fn classical_gradient_law() {
        for t in [0.0, 0.25, 0.5, 0.75, 0.99] {
            match classical_burgers(t, 512, Exec::Sequential).unwrap() {
                ClassicalOutcome::Smooth {
                    max_gradient_exact, ..
                } => {
                    let want = 1.0 / (1.0 - t);
                    assert!((max_gradient_exact / want - 1.0).abs() < 1e-9, "t = {t}");
                }
                o => panic!("{o:?}"),
            }
        }
        assert!(matches!(
            classical_burgers(1.01, 512, Exec::Sequential).unwrap(),
            ClassicalOutcome::ShockFormed { .. }
        ));
    }

    #[test]
    fn history_interpolates_linearly() {
        let f0 = PeriodicField::from_fn(8, 0.0, |_| 0.0).unwrap();
        let mut hs = HistoryStore::new(0.5, f0).unwrap();
        hs.push(PeriodicField::from_fn(8, 0.0, |_| 2.0).unwrap());
        assert_eq!(hs.at(0.25).unwrap().values[3], 1.0);
        assert_eq!(hs.at(0.5).unwrap().values[0], 2.0);
        assert!(hs.at(0.75).is_err());
    }

    #[test]
    fn zero_horizon_keeps_initial_data() {
        let run = functional_burgers(0.0, 64, 0.1, Exec::Sequential).unwrap();
        assert_eq!(run.history.snapshots().len(), 1);
        assert!(functional_burgers(0.25, 64, 0.1, Exec::Sequential).is_err());
    }

    #[test]
    fn oversized_step_rejected() {
        assert!(matches!(
            functional_burgers(4.0, 64, 4.0, Exec::Sequential),
            Err(TransportError::StepTooLarge { .. })
        ));
    }
}
