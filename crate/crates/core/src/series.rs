//! Certified evaluation of `f_α(x) = Σ_{n≥0} xⁿ / (n! · α^{n(n-1)/2})`.
//!
//! Partial sums are formed in exact rational arithmetic, so the catastrophic
//! cancellation between terms of size `~2^{n²/2}` near a zero costs nothing in
//! accuracy. The neglected tail is bounded once consecutive term ratios drop to
//! `½`: from that index on each term is at most half the previous one, so the
//! tail is at most twice the first omitted term.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{self, int, Rational};

#[derive(Debug, Error, Clone)]
pub enum SeriesError {
    #[error("delay ratio must exceed 1, got {0}")]
    InvalidAlpha(String),
    #[error("tolerance must be positive")]
    NonPositiveTolerance,
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("sign indeterminate at x = {x}: last interval {last}")]
    Indeterminate { x: String, last: Box<IntervalValue> },
    #[error("argument {0} outside the configured range")]
    OutOfRange(f64),
}

/// The delay ratio `α > 1` of the kernel `y'(x) = y(x/α)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    alpha: Rational,
}

impl SeriesSpec {
    pub fn new(alpha: Rational) -> Result<Self, SeriesError> {
        if alpha <= int(1) {
            return Err(SeriesError::InvalidAlpha(alpha.to_string()));
        }
        Ok(Self { alpha })
    }

    /// `α = 2`, the half-time equation.
    pub fn pantograph() -> Self {
        Self { alpha: int(2) }
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }
}

impl Default for SeriesSpec {
    fn default() -> Self {
        Self::pantograph()
    }
}

/// Work limits for certified evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Budget {
    /// Largest truncation order `N` an evaluation may use.
    pub max_terms: usize,
    /// Largest bit size of the common denominator of a partial sum.
    pub max_bits: u64,
    /// Tolerance refinements `sign_at` / `eval_float` may take.
    pub max_refinements: usize,
    /// Largest `|x|` accepted by [`eval_float`].
    pub max_abs_float: f64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_terms: 512,
            max_bits: 1_000_000,
            max_refinements: 2048,
            max_abs_float: 1e15,
        }
    }
}

/// A certified scalar: the true value lies in `[center - radius, center + radius]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalValue {
    pub center: Rational,
    pub radius: Rational,
}

impl std::fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:.17e} ± {:.3e}",
            rational::to_f64(&self.center),
            rational::to_f64(&self.radius)
        )
    }
}

/// A sign proven by interval evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CertifiedSign {
    Negative,
    Positive,
}

impl CertifiedSign {
    /// `+1` or `-1`.
    pub fn as_i32(self) -> i32 {
        match self {
            CertifiedSign::Negative => -1,
            CertifiedSign::Positive => 1,
        }
    }

    /// `(-1)^k`.
    pub fn alternating(k: u64) -> Self {
        if k.is_multiple_of(2) {
            CertifiedSign::Positive
        } else {
            CertifiedSign::Negative
        }
    }

    pub fn flip(self) -> Self {
        match self {
            CertifiedSign::Negative => CertifiedSign::Positive,
            CertifiedSign::Positive => CertifiedSign::Negative,
        }
    }
}

impl IntervalValue {
    pub fn exact(v: Rational) -> Self {
        Self {
            center: v,
            radius: Rational::zero(),
        }
    }

    pub fn lo(&self) -> Rational {
        &self.center - &self.radius
    }

    pub fn hi(&self) -> Rational {
        &self.center + &self.radius
    }

    pub fn contains_zero(&self) -> bool {
        self.center.abs() <= self.radius
    }

    pub fn contains(&self, v: &Rational) -> bool {
        (&self.center - v).abs() <= self.radius
    }

    /// The certified sign, or `None` when zero is inside the interval.
    pub fn sign(&self) -> Option<CertifiedSign> {
        if self.contains_zero() {
            None
        } else if self.center.is_positive() {
            Some(CertifiedSign::Positive)
        } else {
            Some(CertifiedSign::Negative)
        }
    }

    /// Upper bound on `|value|`.
    pub fn abs_hi(&self) -> Rational {
        self.center.abs() + &self.radius
    }

    /// Lower bound on `|value|` (zero when the interval straddles zero).
    pub fn abs_lo(&self) -> Rational {
        let d = self.center.abs() - &self.radius;
        if d.is_negative() {
            Rational::zero()
        } else {
            d
        }
    }

    pub fn widen(&self, extra: &Rational) -> Self {
        Self {
            center: self.center.clone(),
            radius: &self.radius + extra,
        }
    }

    pub fn center_f64(&self) -> f64 {
        rational::to_f64(&self.center)
    }

    pub fn radius_f64(&self) -> f64 {
        rational::to_f64(&self.radius)
    }
}

/// Smallest `N` such that `x_abs / ((N+1) α^N) ≤ ½` and
/// `2 · x_abs^{N+1} / ((N+1)! α^{N(N+1)/2}) ≤ tol`.
///
/// Both conditions are monotone in `|x|`, so the order is valid for every
/// `|x| ≤ x_abs`. Panics if `tol ≤ 0`.
pub fn truncation_order(x_abs: &Rational, tol: &Rational, spec: &SeriesSpec) -> usize {
    assert!(tol.is_positive(), "tolerance must be positive");
    let xp = x_abs.numer().abs();
    let xq = x_abs.denom();
    let ap = spec.alpha().numer();
    let aq = spec.alpha().denom();
    let (tol_n, tol_d) = (tol.numer(), tol.denom());
    // term_n = tn/td with tn = xp^n aq^{n(n-1)/2}, td = xq^n n! ap^{n(n-1)/2}
    let mut tn = BigInt::one();
    let mut td = BigInt::one();
    let mut ap_n = BigInt::one();
    let mut aq_n = BigInt::one();
    let mut n = 0usize;
    loop {
        let step_n = &xp * &aq_n;
        let step_d = xq * BigInt::from(n + 1) * &ap_n;
        let next_n = &tn * &step_n;
        let next_d = &td * &step_d;
        if BigInt::from(2) * &step_n <= step_d
            && BigInt::from(2) * &next_n * tol_d <= tol_n * &next_d
        {
            return n;
        }
        tn = next_n;
        td = next_d;
        ap_n *= ap;
        aq_n *= aq;
        n += 1;
    }
}

/// The first omitted term's bound `2 · |x|^{N+1} / ((N+1)! α^{N(N+1)/2})`.
pub fn tail_bound(x_abs: &Rational, order: usize, spec: &SeriesSpec) -> Rational {
    let xp = x_abs.numer().abs();
    let xq = x_abs.denom();
    let ap = spec.alpha().numer();
    let aq = spec.alpha().denom();
    let mut tn = BigInt::from(2);
    let mut td = BigInt::one();
    let mut ap_n = BigInt::one();
    let mut aq_n = BigInt::one();
    for n in 0..=order {
        tn *= &xp * &aq_n;
        td *= xq * BigInt::from(n + 1) * &ap_n;
        ap_n *= ap;
        aq_n *= aq;
    }
    BigRational::new(tn, td)
}

/// Exact partial sum `Σ_{n=0}^{order} xⁿ / (n! α^{n(n-1)/2})`.
///
/// Nested (Horner) form with a running common denominator, so no gcd work happens
/// until the final reduction.
pub fn partial_sum(
    x: &Rational,
    order: usize,
    spec: &SeriesSpec,
    budget: &Budget,
) -> Result<Rational, SeriesError> {
    if order > budget.max_terms {
        return Err(SeriesError::Budget(format!(
            "truncation order {order} exceeds max_terms {}",
            budget.max_terms
        )));
    }
    let xp = x.numer();
    let xq = x.denom();
    let ap = spec.alpha().numer();
    let aq = spec.alpha().denom();
    let n = order as u64;
    // bits of xq^N · N! · ap^{N(N-1)/2}
    let est = n * xq.bits()
        + n * (64 - n.max(1).leading_zeros() as u64)
        + n * n.saturating_sub(1) / 2 * ap.bits();
    if est > budget.max_bits {
        return Err(SeriesError::Budget(format!(
            "partial sum needs ~{est} bits, max_bits is {}",
            budget.max_bits
        )));
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in (1..=order).rev() {
        let e = (k - 1) as u32;
        let step_den = xq * BigInt::from(k) * ap.pow(e);
        let new_den = &den * step_den;
        let new_num = &new_den + xp * aq.pow(e) * &num;
        num = new_num;
        den = new_den;
    }
    Ok(BigRational::new(num, den))
}

/// Certified value of `f_α(x)` with radius at most `tol`.
pub fn eval_interval(
    x: &Rational,
    tol: &Rational,
    spec: &SeriesSpec,
    budget: &Budget,
) -> Result<IntervalValue, SeriesError> {
    if !tol.is_positive() {
        return Err(SeriesError::NonPositiveTolerance);
    }
    if x.is_zero() {
        return Ok(IntervalValue::exact(Rational::one()));
    }
    let order = truncation_order(x, tol, spec);
    let center = partial_sum(x, order, spec, budget)?;
    let radius = tail_bound(x, order, spec);
    Ok(IntervalValue { center, radius })
}

/// Certified sign of `f_α(x)`, refining the tolerance until zero is excluded.
pub fn sign_at(
    x: &Rational,
    spec: &SeriesSpec,
    budget: &Budget,
) -> Result<CertifiedSign, SeriesError> {
    let mut tol = Rational::one();
    let mut last = None;
    for _ in 0..budget.max_refinements {
        let iv = eval_interval(x, &tol, spec, budget)?;
        if let Some(s) = iv.sign() {
            return Ok(s);
        }
        let mut next = &tol / int(2);
        if !iv.center.is_zero() {
            let guess = iv.center.abs() / int(4);
            if guess < next {
                next = guess;
            }
        }
        tol = next;
        last = Some(iv);
    }
    Err(SeriesError::Indeterminate {
        x: format!("{:.17e}", rational::to_f64(x)),
        last: Box::new(last.unwrap_or_else(|| IntervalValue::exact(Rational::zero()))),
    })
}

/// `f_α(x)` rounded to `f64`, with relative error at most `rel_tol` plus one rounding.
///
/// The argument is snapped to the exact dyadic rational it represents.
pub fn eval_float(
    x: f64,
    rel_tol: f64,
    spec: &SeriesSpec,
    budget: &Budget,
) -> Result<f64, SeriesError> {
    if !x.is_finite() || x.abs() > budget.max_abs_float {
        return Err(SeriesError::OutOfRange(x));
    }
    let rel = rational::from_f64(rel_tol)
        .filter(|r| r.is_positive())
        .ok_or(SeriesError::NonPositiveTolerance)?;
    let xq = rational::from_f64(x).expect("finite");
    let mut tol = rel.clone().min(Rational::one());
    let mut last = None;
    for _ in 0..budget.max_refinements {
        let iv = eval_interval(&xq, &tol, spec, budget)?;
        let target = &rel * iv.center.abs();
        if iv.radius <= target {
            return Ok(iv.center_f64());
        }
        let mut next = &tol / int(2);
        if target.is_positive() && target < next {
            next = target / int(2);
        }
        tol = next;
        last = Some(iv);
    }
    Err(SeriesError::Indeterminate {
        x: format!("{x:.17e}"),
        last: Box::new(last.unwrap_or_else(|| IntervalValue::exact(Rational::zero()))),
    })
}

/// `f_α(x)` to an absolute tolerance, rounded to `f64`.
pub fn eval_float_abs(
    x: f64,
    abs_tol: f64,
    spec: &SeriesSpec,
    budget: &Budget,
) -> Result<f64, SeriesError> {
    if !x.is_finite() || x.abs() > budget.max_abs_float {
        return Err(SeriesError::OutOfRange(x));
    }
    let tol = rational::from_f64(abs_tol)
        .filter(|r| r.is_positive())
        .ok_or(SeriesError::NonPositiveTolerance)?;
    let xq = rational::from_f64(x).expect("finite");
    Ok(eval_interval(&xq, &tol, spec, budget)?.center_f64())
}

/// Upper bound on `Σ |x|ⁿ / (n! α^{n(n-1)/2})`, i.e. on `max_{|z| ≤ |x|} |f_α(z)|`.
pub fn abs_series_bound(
    x_abs: &Rational,
    spec: &SeriesSpec,
    budget: &Budget,
) -> Result<Rational, SeriesError> {
    let iv = eval_interval(&x_abs.abs(), &Rational::one(), spec, budget)?;
    Ok(iv.hi())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{from_f64, pow2, rat};

    fn f2() -> SeriesSpec {
        SeriesSpec::pantograph()
    }

    /// Independent oracle: sum terms one by one in reduced rationals far past the
    /// truncation point.
    fn brute_sum(x: &Rational, terms: usize) -> Rational {
        let mut s = Rational::zero();
        let mut t = Rational::one();
        for n in 0..terms {
            s += &t;
            t = t * x / (int(n as i64 + 1) * pow2(n as i64));
        }
        s
    }

    #[test]
    fn order_at_zero_is_zero() {
        assert_eq!(truncation_order(&int(0), &rat(1, 1_000_000), &f2()), 0);
    }

    #[test]
    fn order_at_one_matches_enumeration() {
        let tol = Rational::new(BigInt::one(), BigInt::from(10).pow(30));
        // enumerate the two conditions directly on exact terms
        let mut expected = None;
        for n in 0..60usize {
            let ratio = int(1) / (int(n as i64 + 1) * pow2(n as i64));
            let mut fact = BigInt::one();
            for k in 1..=(n as i64 + 1) {
                fact *= k;
            }
            let e = (n * (n + 1) / 2) as i64;
            let term = Rational::new(BigInt::one(), fact) / pow2(e);
            if ratio <= rat(1, 2) && int(2) * term <= tol {
                expected = Some(n);
                break;
            }
        }
        let n = truncation_order(&int(1), &tol, &f2());
        assert_eq!(Some(n), expected);
        assert!(n <= 40);
        assert_eq!(n, 12);
    }

    #[test]
    fn order_at_zero_five_scale() {
        let x = int(96);
        let tol = pow2(-64);
        let n = truncation_order(&x, &tol, &f2());
        // term N+1 satisfies the bound, term N does not (or the ratio fails at N-1)
        assert!(tail_bound(&x, n, &f2()) <= tol);
        let ratio_prev = &x / (int(n as i64) * pow2(n as i64 - 1));
        assert!(tail_bound(&x, n - 1, &f2()) > tol || ratio_prev > rat(1, 2));
        assert_eq!(n, 16);
    }

    #[test]
    fn value_at_zero_exact() {
        let iv = eval_interval(&int(0), &rat(1, 10), &f2(), &Budget::default()).unwrap();
        assert_eq!(iv.center, int(1));
        assert!(iv.radius.is_zero());
    }

    #[test]
    fn value_at_two_matches_brute_force() {
        let iv = eval_interval(&int(2), &rat(1, 10_000), &f2(), &Budget::default()).unwrap();
        let reference = brute_sum(&int(2), 80);
        assert!(iv.contains(&reference));
        assert!(iv.radius <= rat(1, 10_000));
        assert!((iv.center_f64() - 4.177346474807434).abs() < 1e-4);
    }

    #[test]
    fn positive_at_minus_one() {
        let iv = eval_interval(&int(-1), &rat(1, 1000), &f2(), &Budget::default()).unwrap();
        assert!(iv.lo().is_positive());
        assert_eq!(
            sign_at(&int(-1), &f2(), &Budget::default()).unwrap(),
            CertifiedSign::Positive
        );
    }

    #[test]
    fn negative_at_minus_four() {
        assert_eq!(
            sign_at(&int(-4), &f2(), &Budget::default()).unwrap(),
            CertifiedSign::Negative
        );
        assert_eq!(
            sign_at(&int(-2), &f2(), &Budget::default()).unwrap(),
            CertifiedSign::Negative
        );
    }

    #[test]
    fn float_wrapper_values() {
        let b = Budget::default();
        assert_eq!(eval_float(0.0, 1e-12, &f2(), &b).unwrap(), 1.0);
        let one = eval_float(1.0, 1e-15, &f2(), &b).unwrap();
        let oracle = rational::to_f64(&brute_sum(&int(1), 60));
        assert!((one - oracle).abs() <= 4.0 * f64::EPSILON * oracle);
        assert!((one - 2.271492555501061).abs() < 1e-12);
        assert!(eval_float(-1.488, 1e-6, &f2(), &b).unwrap().abs() < 1e-3);
    }

    #[test]
    fn budget_errors_are_explicit() {
        let tiny = Budget {
            max_terms: 4,
            ..Budget::default()
        };
        let err = eval_interval(&int(-1000), &rat(1, 1000), &f2(), &tiny).unwrap_err();
        assert!(matches!(err, SeriesError::Budget(_)));
        let few = Budget {
            max_refinements: 1,
            ..Budget::default()
        };
        let x = from_f64(-1.4880785456).unwrap();
        assert!(matches!(
            sign_at(&x, &f2(), &few),
            Err(SeriesError::Indeterminate { .. })
        ));
        assert!(matches!(
            eval_float(f64::NAN, 1e-6, &f2(), &Budget::default()),
            Err(SeriesError::OutOfRange(_))
        ));
    }

    #[test]
    fn alpha_must_exceed_one() {
        assert!(SeriesSpec::new(int(1)).is_err());
        assert!(SeriesSpec::new(rat(3, 2)).is_ok());
    }

    #[test]
    fn general_alpha_partial_sum_matches_direct_terms() {
        let spec = SeriesSpec::new(rat(3, 2)).unwrap();
        let x = rat(-7, 3);
        let order = 25;
        let fast = partial_sum(&x, order, &spec, &Budget::default()).unwrap();
        let mut s = Rational::zero();
        let mut t = Rational::one();
        let mut ap = Rational::one();
        for n in 0..=order {
            s += &t;
            t = t * &x / (int(n as i64 + 1) * &ap);
            ap *= spec.alpha();
        }
        assert_eq!(fast, s);
    }
}
