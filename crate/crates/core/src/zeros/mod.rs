//! Certified localization of the real zeros of `f(x) = Σ xⁿ / (n! 2^{n(n-1)/2})`.
//!
//! The `n`-th zero lies in the lattice bracket `(-(n+1)·2^{n-1}, -n·2^{n-1})`, with
//! alternating endpoint signs. Zeros are refined by bisection on certified signs and
//! reported in the normal form `x_n = -(n + θ_n)·2^{n-1}`.

mod constant;
mod winding;

use num_traits::Signed;
use thiserror::Error;

use crate::exec::Exec;
use crate::rational::{self, int, pow2, rat, Rational, RationalInterval};
use crate::series::{self, Budget, CertifiedSign, IntervalValue, SeriesError, SeriesSpec};

pub use constant::{
    conjecture_ratio, limit_constant, limit_constant_conjecture, limit_ratio, ConstantEnclosure,
};
pub use winding::{count_zeros_in_box, ComplexBox, WindingOptions, WindingReport};

#[derive(Debug, Error, Clone)]
pub enum ZeroError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("sign pattern violated at {what}")]
    SignPatternViolated { what: String },
    #[error("bisection stalled for n = {n}: {reason}")]
    BisectionStalled { n: u32, reason: String },
    #[error("extremum for n = {n} not certified: {reason}")]
    ExtremumUncertified { n: u32, reason: String },
    #[error("series enclosure failed: {0}")]
    NotEnclosed(String),
    #[error("inconclusive, increase N_trunc: {0}")]
    Inconclusive(String),
    #[error("argument step too coarse after refinement: {0}")]
    StepTooCoarse(String),
}

/// n-th lattice point `ξ_k = -(k+1)·2^{k-1}`.
pub fn lattice_point(k: u32) -> Rational {
    -(int(k as i64 + 1) * pow2(k as i64 - 1))
}

/// Inner endpoint `-n·2^{n-1}` of the `n`-th bracket.
pub fn inner_point(n: u32) -> Rational {
    -(int(n as i64) * pow2(n as i64 - 1))
}

/// The initial bracket of the `n`-th zero with certified endpoint signs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroBracket {
    pub n: u32,
    pub lo: Rational,
    pub hi: Rational,
    pub sign_lo: CertifiedSign,
    pub sign_hi: CertifiedSign,
}

/// Certified enclosure of the `n`-th real zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroRecord {
    pub n: u32,
    pub lo: Rational,
    pub hi: Rational,
    pub width: Rational,
    /// `θ_n = -x_n / 2^{n-1} - n`.
    pub theta: RationalInterval,
}

impl ZeroRecord {
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn bracket(&self) -> RationalInterval {
        RationalInterval::new(self.lo.clone(), self.hi.clone())
    }

    /// `n·θ_n` as an interval.
    pub fn n_theta(&self) -> RationalInterval {
        self.theta.scale(&int(self.n as i64))
    }
}

/// Certified value of `f` at the critical point `2·x_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremumRecord {
    pub n: u32,
    pub location: RationalInterval,
    pub value: IntervalValue,
    pub sign: CertifiedSign,
    /// `log2 |f(2x_n)| < n²/2 + 2n` certified.
    pub amplitude_bound_holds: bool,
}

impl ExtremumRecord {
    /// Midpoint estimate of `log2 |f(2x_n)|`.
    pub fn log2_abs_value(&self) -> f64 {
        rational::log2_abs(&self.value.center)
    }
}

/// Per-`k` outcome of the endpoint sign pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPatternVerdict {
    pub k: u32,
    /// `(-1)^k f(-k·2^{k-1}) < 0`.
    pub inner_ok: bool,
    /// `(-1)^k f(-(k+1)·2^{k-1}) > 0`.
    pub outer_ok: bool,
    pub diagnostics: Option<String>,
}

impl SignPatternVerdict {
    pub fn passed(&self) -> bool {
        self.inner_ok && self.outer_ok
    }
}

/// One row of the θ study.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaEntry {
    pub n: u32,
    pub theta: RationalInterval,
    pub n_theta: RationalInterval,
    /// `66/25 < n·θ_n < 2167/789`, evaluated from `window_from` on.
    pub window: Option<bool>,
}

/// Lower end of the asymptotic `n·θ_n` window.
pub fn window_lo() -> Rational {
    rat(66, 25)
}

/// Upper end of the asymptotic `n·θ_n` window.
pub fn window_hi() -> Rational {
    rat(2167, 789)
}

/// Index from which the `n·θ_n` window is checked by default.
pub const WINDOW_FROM: u32 = 15;

fn spec() -> SeriesSpec {
    SeriesSpec::pantograph()
}

/// Lattice bracket `(-(n+1)·2^{n-1}, -n·2^{n-1})` with both endpoint signs
/// certified against the alternation `(-1)^n f(hi) < 0 < (-1)^n f(lo)`.
pub fn bracket_for(n: u32, budget: &Budget) -> Result<ZeroBracket, ZeroError> {
    if n == 0 {
        return Err(ZeroError::InvalidArgument("zero index starts at 1".into()));
    }
    let hi = inner_point(n);
    let lo = lattice_point(n);
    let sign_hi = series::sign_at(&hi, &spec(), budget)?;
    let sign_lo = series::sign_at(&lo, &spec(), budget)?;
    let expect_lo = CertifiedSign::alternating(n as u64);
    if sign_lo != expect_lo || sign_hi != expect_lo.flip() {
        return Err(ZeroError::SignPatternViolated {
            what: format!("bracket n = {n}"),
        });
    }
    Ok(ZeroBracket {
        n,
        lo,
        hi,
        sign_lo,
        sign_hi,
    })
}

/// Certifies the endpoint sign pattern for `k = 1..=k_max`.
pub fn sign_pattern_check(k_max: u32, budget: &Budget, exec: Exec) -> Vec<SignPatternVerdict> {
    exec.map_range(k_max as usize, |i| {
        let k = i as u32 + 1;
        let expect_outer = CertifiedSign::alternating(k as u64);
        let mut diag = Vec::new();
        let inner = series::sign_at(&inner_point(k), &spec(), budget);
        let outer = series::sign_at(&lattice_point(k), &spec(), budget);
        let inner_ok = match inner {
            Ok(s) => s == expect_outer.flip(),
            Err(e) => {
                diag.push(format!("inner: {e}"));
                false
            }
        };
        let outer_ok = match outer {
            Ok(s) => s == expect_outer,
            Err(e) => {
                diag.push(format!("outer: {e}"));
                false
            }
        };
        SignPatternVerdict {
            k,
            inner_ok,
            outer_ok,
            diagnostics: (!diag.is_empty()).then(|| diag.join("; ")),
        }
    })
}

fn theta_of(n: u32, lo: &Rational, hi: &Rational) -> RationalInterval {
    let scale = pow2(n as i64 - 1);
    let nn = int(n as i64);
    RationalInterval::new(-(hi / &scale) - &nn, -(lo / &scale) - nn)
}

/// Bisects the lattice bracket of the `n`-th zero down to `width ≤ width_tol`.
///
/// Midpoints are dyadic. If a midpoint's sign cannot be certified within the
/// budget, the interval is split once at the off-centre ratio 5/11 instead.
pub fn locate_zero(n: u32, width_tol: &Rational, budget: &Budget) -> Result<ZeroRecord, ZeroError> {
    if !width_tol.is_positive() {
        return Err(ZeroError::InvalidArgument("width tolerance must be positive".into()));
    }
    let b = bracket_for(n, budget)?;
    refine_bracket(n, b.lo, b.hi, b.sign_lo, width_tol, budget)
}

fn refine_bracket(
    n: u32,
    mut lo: Rational,
    mut hi: Rational,
    sign_lo: CertifiedSign,
    width_tol: &Rational,
    budget: &Budget,
) -> Result<ZeroRecord, ZeroError> {
    let two = int(2);
    while &hi - &lo > *width_tol {
        let mid = (&lo + &hi) / &two;
        let (pt, s) = match series::sign_at(&mid, &spec(), budget) {
            Ok(s) => (mid, s),
            Err(SeriesError::Indeterminate { .. }) => {
                let alt = &lo + (&hi - &lo) * rat(5, 11);
                match series::sign_at(&alt, &spec(), budget) {
                    Ok(s) => (alt, s),
                    Err(e) => {
                        return Err(ZeroError::BisectionStalled {
                            n,
                            reason: e.to_string(),
                        })
                    }
                }
            }
            Err(e) => return Err(e.into()),
        };
        if s == sign_lo {
            lo = pt;
        } else {
            hi = pt;
        }
    }
    let theta = theta_of(n, &lo, &hi);
    Ok(ZeroRecord {
        n,
        width: &hi - &lo,
        lo,
        hi,
        theta,
    })
}

/// The zeros `x_1..=x_{n_max}`, localized independently.
pub fn locate_zeros(
    n_max: u32,
    width_tol: &Rational,
    budget: &Budget,
    exec: Exec,
) -> Result<Vec<ZeroRecord>, ZeroError> {
    exec.map_range(n_max as usize, |i| locate_zero(i as u32 + 1, width_tol, budget))
        .into_iter()
        .collect()
}

/// `θ_n` and `n·θ_n` for `n = 1..=n_max`, with the window verdict from
/// `window_from` on.
pub fn theta_sequence(
    n_max: u32,
    width_tol: &Rational,
    window_from: u32,
    budget: &Budget,
    exec: Exec,
) -> Result<Vec<ThetaEntry>, ZeroError> {
    if n_max == 0 {
        return Err(ZeroError::InvalidArgument("n_max must be at least 1".into()));
    }
    let records = locate_zeros(n_max, width_tol, budget, exec)?;
    let (wlo, whi) = (window_lo(), window_hi());
    Ok(records
        .into_iter()
        .map(|r| {
            let n_theta = r.n_theta();
            let window = (r.n >= window_from).then(|| n_theta.strictly_inside(&wlo, &whi));
            ThetaEntry {
                n: r.n,
                theta: r.theta,
                n_theta,
                window,
            }
        })
        .collect())
}

/// Certified enclosure of `f` at the critical point `2·x_n`.
///
/// With `x_n ∈ [lo, hi]`, `|2x_n - 2·mid| ≤ hi - lo` and `|f'(s)| = |f(s/2)|` is at
/// most `Σ |lo|ⁿ cₙ` there, which widens the value at `2·mid`. The zero is
/// re-refined when the enclosure is too wide to certify the sign or the bound.
pub fn extremum_value(n: u32, budget: &Budget) -> Result<ExtremumRecord, ZeroError> {
    let b = bracket_for(n, budget)?;
    let mut width = pow2(n as i64 - 1) * pow2(-24);
    let expect = CertifiedSign::alternating(n as u64);
    // 2^{n² + 4n} bounds |f|² strictly
    let bound_sq = pow2((n as i64) * (n as i64) + 4 * n as i64);
    let mut rec = refine_bracket(n, b.lo.clone(), b.hi.clone(), b.sign_lo, &width, budget)?;
    for _ in 0..6 {
        let location = RationalInterval::new(&rec.lo * int(2), &rec.hi * int(2));
        let deriv_bound = series::abs_series_bound(&rec.lo, &spec(), budget)?;
        let slack = &rec.width * deriv_bound;
        let center_pt = location.midpoint();
        let tol = (&slack).max(&pow2(-60)).clone();
        let value = series::eval_interval(&center_pt, &tol, &spec(), budget)?.widen(&slack);
        if let Some(sign) = value.sign() {
            if sign != expect {
                return Err(ZeroError::ExtremumUncertified {
                    n,
                    reason: format!("sign {} contradicts (-1)^n", sign.as_i32()),
                });
            }
            let hi_sq = value.abs_hi() * value.abs_hi();
            let lo_sq = value.abs_lo() * value.abs_lo();
            if hi_sq < bound_sq {
                return Ok(ExtremumRecord {
                    n,
                    location,
                    value,
                    sign,
                    amplitude_bound_holds: true,
                });
            }
            if lo_sq >= bound_sq {
                return Ok(ExtremumRecord {
                    n,
                    location,
                    value,
                    sign,
                    amplitude_bound_holds: false,
                });
            }
        }
        width *= pow2(-32);
        rec = refine_bracket(n, rec.lo, rec.hi, b.sign_lo, &width, budget)?;
    }
    Err(ZeroError::ExtremumUncertified {
        n,
        reason: "enclosure still straddles the sign or the amplitude bound".into(),
    })
}

/// Certified `log2 |f(x)| < |x|·log2 e` (`|f(x)| < e^{|x|}`) for `x < 0`.
///
/// Returns `None` when the interval around `f(x)` contains zero.
pub fn gronwall_envelope_holds(x: &Rational, budget: &Budget) -> Result<Option<bool>, ZeroError> {
    let iv = series::eval_interval(x, &pow2(-40), &spec(), budget)?;
    if iv.contains_zero() {
        return Ok(None);
    }
    // e^{|x|} > 1 + |x| + ... ; use the exact lower bound Σ_{k≤K} |x|^k/k!
    let ax = x.abs();
    let mut term = int(1);
    let mut sum = int(1);
    let mut k = 1;
    while k < 400 {
        term = term * &ax / int(k);
        sum += &term;
        if sum > iv.abs_hi() {
            return Ok(Some(true));
        }
        k += 1;
    }
    Ok(Some(false))
}

/// Certified `log2 |f(x)| < ½(log2|x|)² + 2·log2|x|` for `|x| ≥ 2`.
///
/// Compares against `2^{⌊B⌋}` where `B` is the bound evaluated at the certified
/// lower integer part of `log2 |x|`, so `true` is always rigorous.
pub fn sharp_envelope_holds(x: &Rational, budget: &Budget) -> Result<Option<bool>, ZeroError> {
    let iv = series::eval_interval(x, &pow2(-40), &spec(), budget)?;
    if iv.contains_zero() {
        return Ok(None);
    }
    let e = rational::floor_log2(x) as f64; // ≤ log2|x|
    if e < 1.0 {
        return Err(ZeroError::InvalidArgument("sharp envelope needs |x| ≥ 2".into()));
    }
    let bound_bits = (0.5 * e * e + 2.0 * e).floor() as i64;
    Ok(Some(iv.abs_hi() < pow2(bound_bits)))
}

/// Certified records of every zero in `[x_min, 0)`.
pub fn zeros_in_range(
    x_min: &Rational,
    width_tol: &Rational,
    budget: &Budget,
    exec: Exec,
) -> Result<Vec<ZeroRecord>, ZeroError> {
    // bracket n has its right end at -n·2^{n-1}; stop once that passes x_min
    let mut n_max = 0u32;
    while inner_point(n_max + 1) >= *x_min {
        n_max += 1;
    }
    let recs = locate_zeros(n_max, width_tol, budget, exec)?;
    Ok(recs.into_iter().filter(|r| r.hi >= *x_min).collect())
}

/// Certifies `x_{n+1} < 2·x_n < x_n` from consecutive records `a` (index n) and
/// `b` (index n+1).
pub fn chain_holds(a: &ZeroRecord, b: &ZeroRecord) -> bool {
    a.n + 1 == b.n && b.hi < &a.lo * int(2) && a.hi.is_negative()
}
