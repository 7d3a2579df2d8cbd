//! Exact rational helpers shared by the certified modules.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^k` for any signed exponent.
pub fn pow2(k: i64) -> Rational {
    let p = BigInt::one() << k.unsigned_abs();
    if k >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// The exact dyadic value of a finite `f64`.
pub fn from_f64(x: f64) -> Option<Rational> {
    if x == 0.0 {
        return Some(Rational::zero());
    }
    Rational::from_float(x)
}

/// Nearest `f64` to an exact rational.
///
/// Shifts large operands down to 64 significant bits before dividing so that the
/// result stays finite when numerator and denominator individually overflow.
pub fn to_f64(q: &Rational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let n = q.numer();
    let d = q.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    if nb < 1000 && db < 1000 {
        if let Some(v) = q.to_f64() {
            if v.is_finite() && v != 0.0 {
                return v;
            }
        }
    }
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let nf = (n >> ns as u64).to_f64().unwrap_or(f64::NAN);
    let df = (d >> ds as u64).to_f64().unwrap_or(f64::NAN);
    let e = ns - ds;
    let m = nf / df;
    if e > 2000 {
        return m.signum() * f64::INFINITY;
    }
    if e < -2000 {
        return 0.0;
    }
    m * 2f64.powi(e as i32)
}

/// Floor of `log2 |q|` for non-zero `q`, exact.
pub fn floor_log2(q: &Rational) -> i64 {
    assert!(!q.is_zero(), "floor_log2 of zero");
    let a = q.abs();
    let mut e = a.numer().bits() as i64 - a.denom().bits() as i64;
    // the estimate is off by at most one in either direction
    while pow2(e) > a {
        e -= 1;
    }
    while pow2(e + 1) <= a {
        e += 1;
    }
    e
}

/// Approximate `log2 |q|` in floating point, valid far beyond the `f64` range.
pub fn log2_abs(q: &Rational) -> f64 {
    if q.is_zero() {
        return f64::NEG_INFINITY;
    }
    let e = floor_log2(q);
    let scaled = q.abs() / pow2(e);
    e as f64 + to_f64(&scaled).log2()
}

/// Smallest integer `≥ q`.
pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

/// Integer upper bound on `sqrt(q)` for non-negative `q`.
pub fn sqrt_upper(q: &Rational) -> BigInt {
    let c = ceil(q);
    let mut s = c.sqrt();
    while &s * &s < c {
        s += 1;
    }
    s
}

/// Least common multiple of two positive integers.
pub fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// A closed interval `[lo, hi]` with exact rational endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RationalInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Self { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        Self { lo: v.clone(), hi: v }
    }

    /// Smallest interval containing both endpoints, in either order.
    pub fn hull(a: Rational, b: Rational) -> Self {
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn radius(&self) -> Rational {
        self.width() / int(2)
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    /// Whether `self ⊂ (lo, hi)` strictly.
    pub fn strictly_inside(&self, lo: &Rational, hi: &Rational) -> bool {
        lo < &self.lo && &self.hi < hi
    }

    pub fn intersects(&self, other: &RationalInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Self::hull(&self.lo * k, &self.hi * k)
    }

    /// Widen by `r ≥ 0` on both sides.
    pub fn widen(&self, r: &Rational) -> Self {
        Self::new(&self.lo - r, &self.hi + r)
    }

    pub fn lo_f64(&self) -> f64 {
        to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        to_f64(&self.hi)
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&self.midpoint())
    }

    /// Interval quotient; `None` if the divisor contains zero.
    pub fn div(&self, other: &RationalInterval) -> Option<RationalInterval> {
        if other.contains(&Rational::zero()) {
            return None;
        }
        let cands = [
            &self.lo / &other.lo,
            &self.lo / &other.hi,
            &self.hi / &other.lo,
            &self.hi / &other.hi,
        ];
        let lo = cands.iter().min().cloned().unwrap();
        let hi = cands.iter().max().cloned().unwrap();
        Some(RationalInterval { lo, hi })
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.12e}, {:.12e}]", self.lo_f64(), self.hi_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_and_log2() {
        assert_eq!(pow2(3), int(8));
        assert_eq!(pow2(-2), rat(1, 4));
        assert_eq!(floor_log2(&rat(5, 1)), 2);
        assert_eq!(floor_log2(&rat(1, 3)), -2);
        assert_eq!(floor_log2(&int(8)), 3);
        assert!((log2_abs(&int(-48)) - 48f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn huge_to_f64_stays_finite_ratio() {
        let q = Rational::new(BigInt::one() << 5000u32, BigInt::from(3) << 4990u32);
        assert!((to_f64(&q) - 1024.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn sqrt_upper_bounds() {
        assert_eq!(sqrt_upper(&int(16)), BigInt::from(4));
        assert_eq!(sqrt_upper(&rat(17, 1)), BigInt::from(5));
        assert_eq!(sqrt_upper(&rat(1, 2)), BigInt::from(1));
    }

    #[test]
    fn interval_division() {
        let a = RationalInterval::new(int(1), int(2));
        let b = RationalInterval::new(int(-4), int(-2));
        let q = a.div(&b).unwrap();
        assert_eq!(q, RationalInterval::new(rat(-1, 1), rat(-1, 4)));
        assert!(a.div(&RationalInterval::new(int(-1), int(1))).is_none());
    }
}
