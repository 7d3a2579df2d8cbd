//! Proportional-delay ODE systems
//! `x'(t) = A(t)x(t) + F(x(φ(t)))·x(t) + G(x(ψ(t)))` with `0 < φ(t), ψ(t) < t`.
//!
//! Solutions are integrated forward on `t ≥ 0` or backward onto `t < 0` by an adaptive
//! Dormand–Prince 5(4) pair whose dense output serves every delayed lookup.

mod solver;

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use solver::{residual, solve, DenseTrajectory, Direction, SolveOptions, SolveStats, Step};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FodeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("delay {which} violates the ordering contract at t = {t}")]
    InvalidDelay { which: &'static str, t: f64 },
    #[error("unknown builtin problem `{0}`")]
    UnknownBuiltin(String),
    #[error("blow-up detected at t≈{t:.6} (|x| = {norm:.3e})")]
    BlowUp { t: f64, norm: f64 },
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepTooSmall { t: f64, h: f64 },
    #[error("step limit {0} reached")]
    MaxSteps(usize),
    #[error("t = {t} outside the solved interval [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
}

pub type TimeMatrix = Arc<dyn Fn(f64) -> DMatrix<f64> + Send + Sync>;
pub type StateMatrix = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
pub type StateField = Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>;

/// The delayed coupling `F`, either multiplying the current state or added directly.
#[derive(Clone)]
pub enum Coupling {
    /// `F(x(φ(t)))·x(t)`
    Multiplicative(StateMatrix),
    /// `F(x(φ(t)))`
    Additive(StateField),
}

/// A delay map `t ↦ φ(t)`.
#[derive(Clone)]
pub enum Delay {
    /// `t / α` with `α > 1`.
    Proportional(f64),
    /// `φ(t) = t`: no delay, the current state is used directly.
    Identity,
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Delay {
    pub fn apply(&self, t: f64) -> f64 {
        match self {
            Delay::Proportional(a) => t / a,
            Delay::Identity => t,
            Delay::Custom(f) => f(t),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Delay::Identity)
    }
}

impl fmt::Debug for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delay::Proportional(a) => write!(f, "t/{a}"),
            Delay::Identity => write!(f, "t"),
            Delay::Custom(_) => write!(f, "custom"),
        }
    }
}

/// A proportional-delay initial value problem.
#[derive(Clone)]
pub struct PantographProblem {
    pub name: String,
    dim: usize,
    a: Option<TimeMatrix>,
    f: Option<Coupling>,
    g: Option<StateField>,
    phi: Delay,
    psi: Delay,
    x0: DVector<f64>,
}

impl fmt::Debug for PantographProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PantographProblem")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("phi", &self.phi)
            .field("psi", &self.psi)
            .field("x0", &self.x0.as_slice())
            .finish()
    }
}

/// Builder for [`PantographProblem`]; every term defaults to absent.
pub struct ProblemBuilder {
    name: String,
    x0: DVector<f64>,
    a: Option<TimeMatrix>,
    f: Option<Coupling>,
    g: Option<StateField>,
    phi: Delay,
    psi: Delay,
}

impl ProblemBuilder {
    pub fn new(name: impl Into<String>, x0: DVector<f64>) -> Self {
        Self {
            name: name.into(),
            x0,
            a: None,
            f: None,
            g: None,
            phi: Delay::Proportional(2.0),
            psi: Delay::Proportional(2.0),
        }
    }

    pub fn linear(mut self, a: impl Fn(f64) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        self.a = Some(Arc::new(a));
        self
    }

    pub fn coupling(mut self, f: Coupling) -> Self {
        self.f = Some(f);
        self
    }

    pub fn forcing(
        mut self,
        g: impl Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        self.g = Some(Arc::new(g));
        self
    }

    pub fn phi(mut self, d: Delay) -> Self {
        self.phi = d;
        self
    }

    pub fn psi(mut self, d: Delay) -> Self {
        self.psi = d;
        self
    }

    /// Validates dimensions on `x0` and the delay contract on a sample grid.
    pub fn build(self) -> Result<PantographProblem, FodeError> {
        let dim = self.x0.len();
        let p = PantographProblem {
            name: self.name,
            dim,
            a: self.a,
            f: self.f,
            g: self.g,
            phi: self.phi,
            psi: self.psi,
            x0: self.x0,
        };
        for (which, d) in [("phi", &p.phi), ("psi", &p.psi)] {
            if let Delay::Proportional(a) = d {
                if !(a.is_finite() && *a > 1.0) {
                    return Err(FodeError::InvalidArgument(format!(
                        "proportional delay needs α > 1, got {a}"
                    )));
                }
            }
            if d.is_identity() {
                continue;
            }
            for i in 1..=64 {
                let t = 1e-3 * 1.25f64.powi(i);
                let fwd = d.apply(t);
                if !(fwd > 0.0 && fwd < t) {
                    return Err(FodeError::InvalidDelay { which, t });
                }
            }
        }
        let probe = p.rhs(0.0, &p.x0, &p.x0, &p.x0);
        if probe.len() != dim {
            return Err(FodeError::InvalidArgument(format!(
                "right-hand side has dimension {} but x0 has {dim}",
                probe.len()
            )));
        }
        Ok(p)
    }
}

impl PantographProblem {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    pub fn phi(&self) -> &Delay {
        &self.phi
    }

    pub fn psi(&self) -> &Delay {
        &self.psi
    }

    /// Whether the backward contract `t < φ(t), ψ(t) < 0` holds on a sample grid.
    pub fn backward_delays_valid(&self) -> Option<(&'static str, f64)> {
        for (which, d) in [("phi", &self.phi), ("psi", &self.psi)] {
            if d.is_identity() {
                continue;
            }
            for i in 1..=64 {
                let t = -1e-3 * 1.25f64.powi(i);
                let v = d.apply(t);
                if !(v < 0.0 && v > t) {
                    return Some((which, t));
                }
            }
        }
        None
    }

    /// Right-hand side given the current state and the two delayed states.
    pub fn rhs(
        &self,
        t: f64,
        x: &DVector<f64>,
        x_phi: &DVector<f64>,
        x_psi: &DVector<f64>,
    ) -> DVector<f64> {
        let mut out = match &self.a {
            Some(a) => a(t) * x,
            None => DVector::zeros(self.dim),
        };
        match &self.f {
            Some(Coupling::Multiplicative(m)) => out += m(x_phi) * x,
            Some(Coupling::Additive(v)) => out += v(x_phi),
            None => {}
        }
        if let Some(g) = &self.g {
            out += g(x_psi);
        }
        out
    }
}

/// Parameters for [`make_builtin`].
#[derive(Clone, Debug, Default)]
pub struct BuiltinParams {
    /// Initial state; defaults to `1` (or `(1, 0)` for `wave_mode`).
    pub x0: Option<Vec<f64>>,
    /// Fourier frequency of `wave_mode`.
    pub lambda: Option<f64>,
    /// Delay ratio; defaults to 2.
    pub alpha: Option<f64>,
}

pub const BUILTINS: [&str; 5] = [
    "linear_like",
    "riccati_like",
    "classical_riccati",
    "classical_linear",
    "wave_mode",
];

/// One of the reference problems:
///
/// - `linear_like`: `x' = x(t/α)`
/// - `riccati_like`: `x' = x(t/α)²`
/// - `classical_riccati`: `x' = x²`
/// - `classical_linear`: `x' = x`
/// - `wave_mode`: `u'' = -λ² u(t/α)` as the system `(u, u')`
pub fn make_builtin(name: &str, params: &BuiltinParams) -> Result<PantographProblem, FodeError> {
    let alpha = params.alpha.unwrap_or(2.0);
    let scalar_x0 = |default: f64| -> Result<DVector<f64>, FodeError> {
        match &params.x0 {
            None => Ok(DVector::from_element(1, default)),
            Some(v) if v.len() == 1 => Ok(DVector::from_column_slice(v)),
            Some(v) => Err(FodeError::InvalidArgument(format!(
                "`{name}` is one-dimensional, got x0 of length {}",
                v.len()
            ))),
        }
    };
    let delayed = Delay::Proportional(alpha);
    match name {
        "linear_like" => ProblemBuilder::new(name, scalar_x0(1.0)?)
            .psi(delayed)
            .forcing(|y| y.clone())
            .build(),
        "riccati_like" => ProblemBuilder::new(name, scalar_x0(1.0)?)
            .psi(delayed)
            .forcing(|y| y.map(|v| v * v))
            .build(),
        "classical_riccati" => ProblemBuilder::new(name, scalar_x0(1.0)?)
            .psi(Delay::Identity)
            .forcing(|y| y.map(|v| v * v))
            .build(),
        "classical_linear" => ProblemBuilder::new(name, scalar_x0(1.0)?)
            .linear(|_| DMatrix::identity(1, 1))
            .build(),
        "wave_mode" => {
            let lambda = params.lambda.ok_or_else(|| {
                FodeError::InvalidArgument("wave_mode requires the λ parameter".into())
            })?;
            let x0 = match &params.x0 {
                None => DVector::from_vec(vec![1.0, 0.0]),
                Some(v) if v.len() == 2 => DVector::from_column_slice(v),
                Some(v) => {
                    return Err(FodeError::InvalidArgument(format!(
                        "wave_mode is two-dimensional, got x0 of length {}",
                        v.len()
                    )))
                }
            };
            let l2 = lambda * lambda;
            ProblemBuilder::new(name, x0)
                .linear(|_| DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]))
                .psi(delayed)
                .forcing(move |y| DVector::from_vec(vec![0.0, -l2 * y[0]]))
                .build()
        }
        other => Err(FodeError::UnknownBuiltin(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_shapes() {
        let p = make_builtin("linear_like", &BuiltinParams::default()).unwrap();
        assert_eq!(p.dim(), 1);
        let x = DVector::from_element(1, 3.0);
        let y = DVector::from_element(1, 2.0);
        assert_eq!(p.rhs(1.0, &x, &y, &y)[0], 2.0);
        let r = make_builtin("riccati_like", &BuiltinParams::default()).unwrap();
        assert_eq!(r.rhs(1.0, &x, &y, &y)[0], 4.0);
        let w = make_builtin(
            "wave_mode",
            &BuiltinParams {
                lambda: Some(3.0),
                ..Default::default()
            },
        )
        .unwrap();
        let s = DVector::from_vec(vec![1.0, 2.0]);
        assert_eq!(w.rhs(0.5, &s, &s, &s).as_slice(), &[2.0, -9.0]);
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(
            make_builtin("nope", &BuiltinParams::default()),
            Err(FodeError::UnknownBuiltin(_))
        ));
        assert!(make_builtin("wave_mode", &BuiltinParams::default()).is_err());
        assert!(make_builtin(
            "linear_like",
            &BuiltinParams {
                alpha: Some(0.5),
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn delay_contract_checked() {
        let bad = ProblemBuilder::new("bad", DVector::from_element(1, 1.0))
            .psi(Delay::Custom(Arc::new(|t| 2.0 * t)))
            .forcing(|y| y.clone())
            .build();
        assert!(matches!(bad, Err(FodeError::InvalidDelay { which: "psi", .. })));
    }
}
