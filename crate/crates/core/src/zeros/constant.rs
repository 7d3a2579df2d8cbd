//! The limit `C = lim n·θ_n` as a ratio of rapidly convergent alternating sums.

use num_traits::{Signed, Zero};

use super::ZeroError;
use crate::rational::{int, rat, Rational, RationalInterval};

/// Certified enclosure of a limit constant, with the plain truncated value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantEnclosure {
    /// Truncated ratio, no tail correction.
    pub value: Rational,
    /// Interval guaranteed to contain the limit.
    pub enclosure: RationalInterval,
    pub terms: usize,
}

/// `α^{-k(k-1)/2}`.
fn gauss_weight(alpha: &Rational, k: usize) -> Rational {
    let e = (k * (k - 1) / 2) as i32;
    alpha.pow(-e)
}

fn sign(k: usize) -> Rational {
    if k.is_multiple_of(2) {
        int(1)
    } else {
        int(-1)
    }
}

/// `j(j-1)(2j-1)/6`.
fn cubic_weight(j: usize) -> Rational {
    let j = j as i64;
    rat(j * (j - 1) * (2 * j - 1), 6)
}

/// Bound on `Σ_{j>terms} |a_j|` for `a_j = p(j)·α^{-j(j-1)/2}`, valid once the ratio
/// `|a_{terms+2}/a_{terms+1}| ≤ ½` (the ratios decrease from there on because `p`
/// has no roots above 1).
fn geometric_tail<P: Fn(usize) -> Rational>(
    p: P,
    alpha: &Rational,
    terms: usize,
) -> Result<Rational, ZeroError> {
    let a1 = (p(terms + 1) * gauss_weight(alpha, terms + 1)).abs();
    let a2 = (p(terms + 2) * gauss_weight(alpha, terms + 2)).abs();
    if !a1.is_zero() && a2 > &a1 / int(2) {
        return Err(ZeroError::NotEnclosed(format!(
            "tail ratio above 1/2 after {terms} terms"
        )));
    }
    Ok(int(2) * a1)
}

/// Truncated ratio
/// `[Σ_{j≤J} (j/6)(j-1)(2j-1) 2^{(j-j²)/2} (-1)^j] / [Σ_{j≤J} (2j-1) 2^{(j-j²)/2} (-1)^{j-1}]`.
///
/// Returns `None` when the denominator vanishes.
pub fn limit_ratio(terms: usize) -> Option<Rational> {
    let two = int(2);
    let (num, den) = ratio_sums(&two, terms);
    (!den.is_zero()).then(|| num / den)
}

fn ratio_sums(alpha: &Rational, terms: usize) -> (Rational, Rational) {
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for j in 1..=terms {
        let w = gauss_weight(alpha, j);
        num += sign(j) * cubic_weight(j) * &w;
        den -= sign(j) * int(2 * j as i64 - 1) * &w;
    }
    (num, den)
}

/// Enclosure of `C` from the first `2·m_pairs` terms of the ratio sums.
pub fn limit_constant(m_pairs: usize) -> Result<ConstantEnclosure, ZeroError> {
    if m_pairs < 2 {
        return Err(ZeroError::InvalidArgument(
            "limit_constant needs at least 2 pairs".into(),
        ));
    }
    let alpha = int(2);
    let terms = 2 * m_pairs;
    let (num, den) = ratio_sums(&alpha, terms);
    let tn = geometric_tail(cubic_weight, &alpha, terms)?;
    let td = geometric_tail(|j| int(2 * j as i64 - 1), &alpha, terms)?;
    let num_iv = RationalInterval::new(&num - &tn, &num + &tn);
    let den_iv = RationalInterval::new(&den - &td, &den + &td);
    let enclosure = num_iv
        .div(&den_iv)
        .ok_or_else(|| ZeroError::NotEnclosed("denominator interval contains 0".into()))?;
    Ok(ConstantEnclosure {
        value: num / den,
        enclosure,
        terms,
    })
}

/// Truncated `(α/3)·h'(α)/h(α)` without tail correction; `None` when `h` vanishes.
pub fn conjecture_ratio(alpha: &Rational, m_terms: usize) -> Option<Rational> {
    let (h, dh) = h_sums(alpha, m_terms);
    (!h.is_zero()).then(|| alpha / int(3) * dh / h)
}

fn h_sums(alpha: &Rational, m_terms: usize) -> (Rational, Rational) {
    let mut h = Rational::zero();
    let mut dh = Rational::zero();
    for k in 1..=m_terms {
        let w = gauss_weight(alpha, k);
        let c = -sign(k) * int(2 * k as i64 - 1);
        // d/dα α^{-e} = -e α^{-e-1}
        let e = int((k * (k - 1) / 2) as i64);
        dh += &c * (-&e) * &w / alpha;
        h += c * w;
    }
    (h, dh)
}

/// Enclosure of `(α/3)·h'(α)/h(α)` with `h(α) = Σ_{k≥1} (2k-1)(-1)^{k-1} α^{(k-k²)/2}`,
/// differentiated term by term and truncated after `m_terms` terms.
pub fn limit_constant_conjecture(
    alpha: &Rational,
    m_terms: usize,
) -> Result<ConstantEnclosure, ZeroError> {
    if *alpha < int(2) {
        return Err(ZeroError::InvalidArgument(
            "the h(α) limit formula is only established for α ≥ 2".into(),
        ));
    }
    if m_terms == 0 {
        return Err(ZeroError::InvalidArgument("m_terms must be positive".into()));
    }
    let (h, dh) = h_sums(alpha, m_terms);
    let th = geometric_tail(|k| int(2 * k as i64 - 1), alpha, m_terms)?;
    let tdh = geometric_tail(
        |k| rat((2 * k as i64 - 1) * (k * (k - 1) / 2) as i64, 1),
        alpha,
        m_terms,
    )? / alpha;
    let scale = alpha / int(3);
    let h_iv = RationalInterval::new(&h - &th, &h + &th);
    let dh_iv = RationalInterval::new(&dh - &tdh, &dh + &tdh).scale(&scale);
    let value = if h.is_zero() {
        return Err(ZeroError::NotEnclosed("h(α) truncation vanishes".into()));
    } else {
        &scale * &dh / &h
    };
    let enclosure = dh_iv
        .div(&h_iv)
        .ok_or_else(|| ZeroError::NotEnclosed("h(α) interval contains 0".into()))?;
    Ok(ConstantEnclosure {
        value,
        enclosure,
        terms: m_terms,
    })
}
