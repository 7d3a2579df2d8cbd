//! The functional heat equation `u_t(t, x) = u_xx(t/2, x)` on the line.
//!
//! With `φ̂(λ) = ∫ φ(x) e^{-iλx} dx` the solution is the inverse transform of
//! `φ̂(λ)·f(-λ²t)`, where `f` is the pantograph series:
//!
//! `u(t, x) = (1/π) ∫_0^Λ Re(φ̂(λ) e^{iλx}) f(-λ²t) dλ`
//!
//! for real data. The cutoff `Λ` is certified against the amplitude envelope
//! `|f(-s)| ≤ 2^{½L² + 2L}`, `L = max(0, log₂ s)`.

pub mod quadrature;

use std::f64::consts::PI;

use nalgebra::Complex;
use thiserror::Error;

use crate::exec::Exec;
use crate::rational;
use crate::series::{self, Budget, SeriesError, SeriesSpec};
use crate::zeros::{self, ZeroError};

#[derive(Debug, Error, Clone)]
pub enum HeatError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("initial datum violates the integrability/continuity hypotheses: {0}")]
    HypothesisFailed(String),
    #[error("transform decay insufficient: {0}")]
    InsufficientDecay(String),
    #[error("quadrature did not converge after {levels} refinements (last change {diff:e})")]
    QuadratureNotConverged { levels: u32, diff: f64 },
    #[error("t = {t} lies beyond the certified horizon t_max = {t_max}")]
    BeyondCertificate { t: f64, t_max: f64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Zero(#[from] ZeroError),
}

/// Samples of `φ` at `x_min + j·dx`, interpolated piecewise linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDatum {
    pub x_min: f64,
    pub dx: f64,
    pub values: Vec<f64>,
}

/// Initial data `φ` with its transform.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialDatum {
    /// `e^{-a x²}`, `φ̂ = √(π/a) e^{-λ²/4a}`.
    Gaussian { a: f64 },
    /// `γ² / (γ² + x²)`, `φ̂ = πγ e^{-γ|λ|}`.
    Lorentzian { gamma: f64 },
    /// `max(0, 1 - |x|/w)`, `φ̂ = w·sinc²(λw/2)`.
    Triangle { half_width: f64 },
    Sampled(SampledDatum),
    /// `cos(λ₀ x)`: a single Fourier mode. Not integrable; a test hook for
    /// the mode factorisation, bypassing quadrature.
    CosineMode { lambda: f64 },
}

/// How the transform bound decays, which decides the tail certificate.
#[derive(Clone, Copy, Debug)]
enum Decay {
    /// `|φ̂| ≤ c e^{-λ²/4a}`
    Gaussian { a: f64 },
    /// `|φ̂| ≤ c e^{-rλ}`
    Exponential { rate: f64 },
    /// `|φ̂| ≤ c/λ²`
    Algebraic { c: f64 },
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-8 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

impl InitialDatum {
    pub fn gaussian(a: f64) -> Self {
        Self::Gaussian { a }
    }

    pub fn sampled(x_min: f64, dx: f64, values: Vec<f64>) -> Self {
        Self::Sampled(SampledDatum { x_min, dx, values })
    }

    /// Samples `g` on `count` points over `[x_min, x_max]`.
    pub fn sample_fn(x_min: f64, x_max: f64, count: usize, g: impl Fn(f64) -> f64) -> Self {
        let dx = (x_max - x_min) / (count - 1) as f64;
        Self::sampled(x_min, dx, (0..count).map(|j| g(x_min + j as f64 * dx)).collect())
    }

    /// `φ(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { a } => (-a * x * x).exp(),
            Self::Lorentzian { gamma } => gamma * gamma / (gamma * gamma + x * x),
            Self::Triangle { half_width } => (1.0 - x.abs() / half_width).max(0.0),
            Self::Sampled(s) => {
                let u = (x - s.x_min) / s.dx;
                if u < 0.0 || u > (s.values.len() - 1) as f64 {
                    return 0.0;
                }
                let j = (u.floor() as usize).min(s.values.len() - 2);
                let r = u - j as f64;
                s.values[j] * (1.0 - r) + s.values[j + 1] * r
            }
            Self::CosineMode { lambda } => (lambda * x).cos(),
        }
    }

    /// `φ̂(λ)`.
    pub fn transform(&self, lambda: f64) -> Complex<f64> {
        let re = |v: f64| Complex::new(v, 0.0);
        match self {
            Self::Gaussian { a } => re((PI / a).sqrt() * (-lambda * lambda / (4.0 * a)).exp()),
            Self::Lorentzian { gamma } => re(PI * gamma * (-gamma * lambda.abs()).exp()),
            Self::Triangle { half_width: w } => re(w * sinc(lambda * w / 2.0).powi(2)),
            Self::Sampled(s) => {
                let mut acc = Complex::new(0.0, 0.0);
                for (j, v) in s.values.iter().enumerate() {
                    let x = s.x_min + j as f64 * s.dx;
                    acc += Complex::from_polar(*v, -lambda * x);
                }
                acc * (s.dx * sinc(lambda * s.dx / 2.0).powi(2))
            }
            Self::CosineMode { .. } => re(0.0),
        }
    }

    fn validate(&self, tol: f64) -> Result<(), HeatError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(HeatError::HypothesisFailed(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            Self::Gaussian { a } => positive("a", *a),
            Self::Lorentzian { gamma } => positive("gamma", *gamma),
            Self::Triangle { half_width } => positive("half_width", *half_width),
            Self::CosineMode { lambda } => positive("lambda", *lambda),
            Self::Sampled(s) => {
                positive("dx", s.dx)?;
                if s.values.len() < 3 {
                    return Err(HeatError::HypothesisFailed("need at least 3 samples".into()));
                }
                if s.values.iter().any(|v| !v.is_finite()) {
                    return Err(HeatError::HypothesisFailed("non-finite sample".into()));
                }
                let edge = s.values[0].abs().max(s.values[s.values.len() - 1].abs());
                if edge > tol {
                    return Err(HeatError::HypothesisFailed(format!(
                        "samples do not decay at the grid boundary (|φ| = {edge:e} > {tol:e})"
                    )));
                }
                Ok(())
            }
        }
    }

    fn decay(&self) -> Decay {
        match self {
            Self::Gaussian { a } => Decay::Gaussian { a: *a },
            Self::Lorentzian { gamma } => Decay::Exponential { rate: *gamma },
            Self::Triangle { half_width: w } => Decay::Algebraic { c: 4.0 / w },
            Self::Sampled(s) => Decay::Algebraic {
                c: 4.0 * self.transform_sup() / (s.dx * s.dx),
            },
            Self::CosineMode { .. } => Decay::Exponential { rate: f64::INFINITY },
        }
    }

    /// `sup |φ̂|`.
    fn transform_sup(&self) -> f64 {
        match self {
            Self::Gaussian { a } => (PI / a).sqrt(),
            Self::Lorentzian { gamma } => PI * gamma,
            Self::Triangle { half_width } => *half_width,
            Self::Sampled(s) => s.dx * s.values.iter().map(|v| v.abs()).sum::<f64>(),
            Self::CosineMode { .. } => 0.0,
        }
    }

    /// Largest panel width that resolves `φ̂`.
    fn transform_scale(&self) -> f64 {
        match self {
            Self::Gaussian { a } => a.sqrt(),
            Self::Lorentzian { gamma } => 0.5 / gamma,
            Self::Triangle { half_width } => 1.0 / half_width,
            Self::Sampled(s) => {
                let reach = s.x_min.abs().max((s.x_min + s.dx * (s.values.len() - 1) as f64).abs());
                PI / (4.0 * reach.max(1.0))
            }
            Self::CosineMode { .. } => f64::INFINITY,
        }
    }

    /// `max |φ̂(-λ) - conj φ̂(λ)|` over `lambdas`.
    pub fn hermitian_defect(&self, lambdas: &[f64]) -> f64 {
        lambdas
            .iter()
            .map(|&l| (self.transform(-l) - self.transform(l).conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// `log₂` of the amplitude envelope `2^{½L²+2L}`, `L = max(0, log₂ s)`.
pub fn log2_envelope(s: f64) -> f64 {
    let l = if s > 1.0 { s.log2() } else { 0.0 };
    0.5 * l * l + 2.0 * l
}

/// `φ̂` with a cutoff `Λ` certified for every `t ≤ t_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDensity {
    pub datum: InitialDatum,
    pub t_max: f64,
    pub tol: f64,
    pub cutoff: f64,
    /// Bound on `(1/π)∫_Λ^∞ |φ̂(λ)|·sup_{t≤t_max}|f(-λ²t)| dλ`, i.e. on the error in
    /// `u` from truncating at `Λ`.
    pub tail_bound: f64,
}

impl SpectralDensity {
    pub fn transform(&self, lambda: f64) -> Complex<f64> {
        self.datum.transform(lambda)
    }
}

/// Ceiling on the cutoff; beyond it the tail is treated as undominated.
pub const MAX_CUTOFF: f64 = 1e4;

fn ln_envelope(l2: f64, t_max: f64) -> f64 {
    if t_max == 0.0 {
        0.0
    } else {
        log2_envelope(l2 * t_max) * std::f64::consts::LN_2
    }
}

/// Builds `φ̂` for `ic` and certifies a cutoff `Λ` with tail error at most `tol/2`
/// uniformly in `t ∈ [0, t_max]`.
pub fn spectral_density(
    ic: &InitialDatum,
    t_max: f64,
    tol: f64,
) -> Result<SpectralDensity, HeatError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(HeatError::InvalidArgument("tol must be positive".into()));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(HeatError::InvalidArgument("t_max must be finite and ≥ 0".into()));
    }
    ic.validate(tol)?;
    let target = tol / 2.0;
    let sup = ic.transform_sup();
    let (cutoff, tail_bound) = match (ic, ic.decay()) {
        (InitialDatum::CosineMode { lambda }, _) => (*lambda, 0.0),
        (_, Decay::Algebraic { c }) => {
            if t_max > 0.0 {
                return Err(HeatError::InsufficientDecay(format!(
                    "|φ̂(λ)| decays only like λ⁻², which never dominates the growth \
                     2^{{½(log₂ λ²t)² + 2 log₂ λ²t}} of f(-λ²t) for t_max = {t_max}"
                )));
            }
            let l = c / (PI * target);
            if l > MAX_CUTOFF {
                return Err(HeatError::InsufficientDecay(format!(
                    "algebraic tail needs Λ = {l:e} > {MAX_CUTOFF:e} for tol = {tol:e}"
                )));
            }
            (l, c / (PI * l))
        }
        (_, decay) => {
            // log of |φ̂| bound and its λ-derivative
            let ln_hat = |l: f64| match decay {
                Decay::Gaussian { a } => sup.ln() - l * l / (4.0 * a),
                Decay::Exponential { rate } => sup.ln() - rate * l,
                Decay::Algebraic { .. } => unreachable!(),
            };
            let d_ln_hat = |l: f64| match decay {
                Decay::Gaussian { a } => -l / (2.0 * a),
                Decay::Exponential { rate } => -rate,
                Decay::Algebraic { .. } => unreachable!(),
            };
            // Beyond log₂(λ²t_max) ≥ 1 the envelope's log-derivative 2(L+2)/λ decreases,
            // so the integrand is log-concave and ∫_Λ^∞ g ≤ g(Λ)/|D(Λ)|.
            let start = if t_max > 0.0 { (2.0 / t_max).sqrt() } else { 0.0 };
            let mut lam = start.max(1e-3);
            loop {
                let l2 = lam * lam;
                let d_env = if t_max > 0.0 {
                    2.0 * ((l2 * t_max).log2() + 2.0) / lam
                } else {
                    0.0
                };
                let d = d_ln_hat(lam) + d_env;
                if d < 0.0 {
                    let g = (ln_hat(lam) + ln_envelope(l2, t_max)).exp();
                    let bound = g / (-d) / PI;
                    if bound <= target {
                        break (lam, bound);
                    }
                }
                lam *= 1.01;
                if lam > MAX_CUTOFF {
                    return Err(HeatError::InsufficientDecay(format!(
                        "no cutoff below {MAX_CUTOFF:e} certifies tol = {tol:e} up to t_max = {t_max}"
                    )));
                }
            }
        }
    };
    Ok(SpectralDensity {
        datum: ic.clone(),
        t_max,
        tol,
        cutoff,
        tail_bound,
    })
}

/// Uniform grid on `[x_min, x_max]` with `count ≥ 2` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(x_min: f64, x_max: f64, count: usize) -> Result<Self, HeatError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min && count >= 2) {
            return Err(HeatError::InvalidArgument(format!(
                "bad grid [{x_min}, {x_max}] with {count} points"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            count,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    /// Same interval, spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            count: 2 * self.count - 1,
            ..*self
        }
    }
}

/// `u(t, ·)` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub t: f64,
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

/// One quadrature node of the inversion integral.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeWeight {
    pub lambda: f64,
    /// Quadrature weight, including `1/π`.
    pub weight: f64,
    pub transform: Complex<f64>,
    /// `f(-λ²t)`.
    pub kernel: f64,
    /// `φ̂(λ)·f(-λ²t)`, the evolved spectrum.
    pub mode: Complex<f64>,
}

/// Evolved field plus the quadrature it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub field: GridFunction,
    pub modes: Vec<ModeWeight>,
    /// Panel multiplier of the accepted level.
    pub refinement: u32,
}

/// Gauss–Legendre nodes per panel.
pub const GL_ORDER: usize = 16;
const MAX_LEVELS: u32 = 6;

fn panel_breaks(sd: &SpectralDensity, t: f64, x_reach: f64, mult: usize, budget: &Budget) -> Result<Vec<f64>, HeatError> {
    let lam = sd.cutoff;
    let mut cuts = vec![0.0];
    if t > 0.0 {
        let x_min = rational::from_f64(-lam * lam * t).expect("finite");
        let width = rational::from_f64(1e-6 * (lam * lam * t).max(1.0)).expect("finite");
        for z in zeros::zeros_in_range(&x_min, &width, budget, Exec::Sequential)? {
            let r = (rational::to_f64(&z.midpoint()).abs() / t).sqrt();
            if r > 0.0 && r < lam {
                cuts.push(r);
            }
        }
    }
    cuts.push(lam);
    let h_max = (PI / (4.0 * x_reach)).min(sd.datum.transform_scale());
    let mut breaks = vec![0.0];
    for seg in cuts.windows(2) {
        let len = seg[1] - seg[0];
        let base = ((len / h_max).ceil() as usize).max(2);
        let n = base * mult;
        for k in 1..=n {
            breaks.push(if k == n {
                seg[1]
            } else {
                seg[0] + len * k as f64 / n as f64
            });
        }
    }
    Ok(breaks)
}

fn modes_at(
    sd: &SpectralDensity,
    t: f64,
    breaks: &[f64],
    rule: &(Vec<f64>, Vec<f64>),
    budget: &Budget,
    exec: Exec,
) -> Result<Vec<ModeWeight>, HeatError> {
    let nodes = quadrature::composite(breaks, rule);
    let abs_tol = sd.tol * PI / (10.0 * sd.cutoff * sd.datum.transform_sup().max(1e-300));
    let spec = SeriesSpec::pantograph();
    let kernels = exec.map(&nodes, |(l, _)| {
        series::eval_float_abs(-l * l * t, abs_tol, &spec, budget)
    });
    nodes
        .iter()
        .zip(kernels)
        .map(|(&(lambda, w), k)| {
            let kernel = k?;
            let transform = sd.transform(lambda);
            Ok(ModeWeight {
                lambda,
                weight: w / PI,
                transform,
                kernel,
                mode: transform * kernel,
            })
        })
        .collect()
}

fn synthesize(modes: &[ModeWeight], xs: &[f64], exec: Exec) -> Vec<f64> {
    exec.map(xs, |&x| {
        modes
            .iter()
            .map(|m| {
                let (s, c) = (m.lambda * x).sin_cos();
                m.weight * (m.mode.re * c - m.mode.im * s)
            })
            .sum()
    })
}

/// `u(t, ·)` on `grid`, with adaptive panel refinement until two levels agree to `tol/2`.
pub fn evolve(
    sd: &SpectralDensity,
    t: f64,
    grid: &UniformGrid,
    tol: f64,
    exec: Exec,
) -> Result<Evolution, HeatError> {
    evolve_with(sd, t, grid, tol, &Budget::default(), exec)
}

pub fn evolve_with(
    sd: &SpectralDensity,
    t: f64,
    grid: &UniformGrid,
    tol: f64,
    budget: &Budget,
    exec: Exec,
) -> Result<Evolution, HeatError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(HeatError::InvalidArgument(format!("t must be ≥ 0, got {t}")));
    }
    if t > sd.t_max {
        return Err(HeatError::BeyondCertificate { t, t_max: sd.t_max });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(HeatError::InvalidArgument("tol must be positive".into()));
    }
    let xs = grid.points();
    if let InitialDatum::CosineMode { lambda } = sd.datum {
        let kernel = series::eval_float_abs(-lambda * lambda * t, tol / 10.0, &SeriesSpec::pantograph(), budget)?;
        let m = ModeWeight {
            lambda,
            weight: 1.0,
            transform: Complex::new(1.0, 0.0),
            kernel,
            mode: Complex::new(kernel, 0.0),
        };
        let values = synthesize(std::slice::from_ref(&m), &xs, exec);
        return Ok(Evolution {
            field: GridFunction {
                t,
                grid: *grid,
                values,
            },
            modes: vec![m],
            refinement: 1,
        });
    }
    let rule = quadrature::gauss_legendre(GL_ORDER);
    let reach = grid.x_min.abs().max(grid.x_max.abs()).max(1.0);
    let mut mult = 1usize;
    let mut prev: Option<Vec<f64>> = None;
    let mut last_diff = f64::INFINITY;
    for level in 0..=MAX_LEVELS {
        let breaks = panel_breaks(sd, t, reach, mult, budget)?;
        let modes = modes_at(sd, t, &breaks, &rule, budget, exec)?;
        let values = synthesize(&modes, &xs, exec);
        if let Some(p) = &prev {
            last_diff = p
                .iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if last_diff <= tol / 2.0 {
                return Ok(Evolution {
                    field: GridFunction {
                        t,
                        grid: *grid,
                        values,
                    },
                    modes,
                    refinement: level,
                });
            }
        }
        prev = Some(values);
        mult *= 2;
    }
    Err(HeatError::QuadratureNotConverged {
        levels: MAX_LEVELS,
        diff: last_diff,
    })
}

/// Second-derivative stencil in `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Stencil {
    /// `(u₋ - 2u + u₊)/dx²`, second order.
    Central3,
    /// `(-u₋₂ + 16u₋ - 30u + 16u₊ - u₊₂)/12dx²`, fourth order.
    #[default]
    Central5,
}

/// `max |u_t(t, x) - u_xx(t/2, x)|` over the interior of `grid`: central difference
/// in `t` with step `dt`, `stencil` in `x`.
pub fn residual_check(
    sd: &SpectralDensity,
    t: f64,
    grid: &UniformGrid,
    dt: f64,
    tol: f64,
    stencil: Stencil,
    exec: Exec,
) -> Result<f64, HeatError> {
    if !(dt > 0.0 && t - dt > 0.0) {
        return Err(HeatError::InvalidArgument(format!(
            "need 0 < dt < t, got t = {t}, dt = {dt}"
        )));
    }
    let up = evolve(sd, t + dt, grid, tol, exec)?.field.values;
    let um = evolve(sd, t - dt, grid, tol, exec)?.field.values;
    let uh = evolve(sd, t / 2.0, grid, tol, exec)?.field.values;
    let dx2 = grid.spacing().powi(2);
    let k = match stencil {
        Stencil::Central3 => 1,
        Stencil::Central5 => 2,
    };
    let mut worst = 0.0f64;
    for i in k..grid.count - k {
        let ut = (up[i] - um[i]) / (2.0 * dt);
        let uxx = match stencil {
            Stencil::Central3 => (uh[i - 1] - 2.0 * uh[i] + uh[i + 1]) / dx2,
            Stencil::Central5 => {
                (-uh[i - 2] + 16.0 * uh[i - 1] - 30.0 * uh[i] + 16.0 * uh[i + 1] - uh[i + 2])
                    / (12.0 * dx2)
            }
        };
        worst = worst.max((ut - uxx).abs());
    }
    Ok(worst)
}

/// A zero `λ_n(t) = √(|x_n|/t)` of the evolved spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumZero {
    pub n: u32,
    pub lo: f64,
    pub hi: f64,
}

impl SpectrumZero {
    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Positive zeros of `λ ↦ f(-λ²t)` in `(0, λ_max]`, mapped from certified zeros of `f`.
pub fn spectrum_zeros(t: f64, lambda_max: f64, tol: f64) -> Result<Vec<SpectrumZero>, HeatError> {
    if !(t > 0.0 && lambda_max > 0.0 && tol > 0.0) {
        return Err(HeatError::InvalidArgument("need t, λ_max, tol > 0".into()));
    }
    let x_min = rational::from_f64(-lambda_max * lambda_max * t).expect("finite");
    let width = rational::from_f64(2.0 * tol * t.sqrt()).expect("finite");
    let recs = zeros::zeros_in_range(&x_min, &width, &Budget::default(), Exec::default())?;
    Ok(recs
        .into_iter()
        .map(|r| SpectrumZero {
            n: r.n,
            lo: (rational::to_f64(&r.hi).abs() / t).sqrt(),
            hi: (rational::to_f64(&r.lo).abs() / t).sqrt(),
        })
        .filter(|z| z.lo <= lambda_max)
        .collect())
}
