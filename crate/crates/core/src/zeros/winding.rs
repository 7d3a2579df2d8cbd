//! Zero counting in rectangles by the argument principle on a partial sum `P_N`.
//!
//! `P_N` is evaluated exactly at rational boundary points (Gaussian-integer Horner
//! with a common denominator). Consecutive samples are refined until the quadrant
//! test `Re(P(z_{k+1}) · conj P(z_k)) > 0` holds, i.e. the argument moves by less
//! than `π/2` per segment; the winding number is the sum of those increments.
//! The count transfers to `f` when the truncation tail on the box is below the
//! smallest sampled `|P_N|` (Rouché).

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::ZeroError;
use crate::rational::{self, int, rat, Rational};
use crate::series::{self, SeriesSpec};

/// Axis-aligned rectangle `[re_lo, re_hi] × [im_lo, im_hi]` with rational corners.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexBox {
    pub re_lo: Rational,
    pub re_hi: Rational,
    pub im_lo: Rational,
    pub im_hi: Rational,
}

impl ComplexBox {
    pub fn new(re_lo: Rational, re_hi: Rational, im_lo: Rational, im_hi: Rational) -> Self {
        assert!(re_lo < re_hi && im_lo < im_hi, "degenerate box");
        Self {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    /// Corners in counter-clockwise order starting at the lower left.
    fn corners(&self) -> [(Rational, Rational); 4] {
        [
            (self.re_lo.clone(), self.im_lo.clone()),
            (self.re_hi.clone(), self.im_lo.clone()),
            (self.re_hi.clone(), self.im_hi.clone()),
            (self.re_lo.clone(), self.im_hi.clone()),
        ]
    }

    /// `max |z|²` over the box.
    fn max_modulus_sq(&self) -> Rational {
        let re = self.re_lo.abs().max(self.re_hi.abs());
        let im = self.im_lo.abs().max(self.im_hi.abs());
        &re * &re + &im * &im
    }
}

#[derive(Clone, Copy, Debug)]
pub struct WindingOptions {
    /// Initial samples per edge.
    pub initial_segments: usize,
    /// Maximum bisection depth of any initial segment.
    pub max_depth: u32,
}

impl Default for WindingOptions {
    fn default() -> Self {
        Self {
            initial_segments: 64,
            max_depth: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindingReport {
    pub zeros: i64,
    pub samples: usize,
    /// `log2` of the smallest sampled `|P_N|`.
    pub min_modulus_log2: f64,
    /// `log2` of the truncation tail bound on the box.
    pub tail_log2: f64,
}

/// Exact `P_N(z)` as `(re + i·im) / den` with `den > 0`.
struct GaussValue {
    re: BigInt,
    im: BigInt,
    den: BigInt,
}

impl GaussValue {
    fn modulus_sq(&self) -> Rational {
        Rational::new(&self.re * &self.re + &self.im * &self.im, &self.den * &self.den)
    }
}

/// Nested evaluation `1 + z/(1·2⁰)(1 + z/(2·2¹)(1 + …))` of the degree-`order` sum.
fn eval_partial(z: &(Rational, Rational), order: usize) -> GaussValue {
    let d = rational::lcm(z.0.denom(), z.1.denom());
    let a = z.0.numer() * (&d / z.0.denom());
    let b = z.1.numer() * (&d / z.1.denom());
    let mut re = BigInt::one();
    let mut im = BigInt::zero();
    let mut den = BigInt::one();
    for k in (1..=order).rev() {
        let new_den = &den * &d * BigInt::from(k) * (BigInt::one() << (k - 1));
        let pr = &a * &re - &b * &im;
        let pi = &a * &im + &b * &re;
        re = &new_den + pr;
        im = pi;
        den = new_den;
    }
    GaussValue { re, im, den }
}

fn top_bits(x: &BigInt, shift: u64) -> f64 {
    (x >> shift).to_f64().unwrap_or(0.0)
}

/// Argument of `w = p1 · conj(p0)` and whether `Re w > 0`.
fn increment(p0: &GaussValue, p1: &GaussValue) -> (f64, bool) {
    let re = &p1.re * &p0.re + &p1.im * &p0.im;
    let im = &p1.im * &p0.re - &p1.re * &p0.im;
    let bits = re.bits().max(im.bits());
    let shift = bits.saturating_sub(60);
    let angle = top_bits(&im, shift).atan2(top_bits(&re, shift));
    (angle, re.is_positive())
}

fn lerp(a: &(Rational, Rational), b: &(Rational, Rational), t: &Rational) -> (Rational, Rational) {
    (
        &a.0 + (&b.0 - &a.0) * t,
        &a.1 + (&b.1 - &a.1) * t,
    )
}

/// Number of zeros of `f` inside `bx`, counted through the winding of `P_{n_trunc}`.
pub fn count_zeros_in_box(
    bx: &ComplexBox,
    n_trunc: usize,
    opts: &WindingOptions,
) -> Result<WindingReport, ZeroError> {
    let spec = SeriesSpec::pantograph();
    let radius = Rational::from_integer(rational::sqrt_upper(&bx.max_modulus_sq()));
    let ratio = &radius / (int(n_trunc as i64 + 1) * rational::pow2(n_trunc as i64));
    if ratio > rat(1, 2) {
        return Err(ZeroError::Inconclusive(format!(
            "N_trunc = {n_trunc} too small for |z| ≤ {radius}"
        )));
    }
    let tail = series::tail_bound(&radius, n_trunc, &spec);
    let tail_sq = &tail * &tail;

    let corners = bx.corners();
    let mut total = 0.0f64;
    let mut samples = 0usize;
    let mut min_mod_sq: Option<Rational> = None;
    let mut note_modulus = |v: &GaussValue| -> Result<(), ZeroError> {
        let m = v.modulus_sq();
        if m <= tail_sq {
            return Err(ZeroError::Inconclusive(format!(
                "|P_N| ≈ 2^{:.1} on the boundary does not dominate the tail 2^{:.1}",
                rational::log2_abs(&m) / 2.0,
                rational::log2_abs(&tail)
            )));
        }
        if min_mod_sq.as_ref().is_none_or(|cur| m < *cur) {
            min_mod_sq = Some(m);
        }
        Ok(())
    };

    for e in 0..4 {
        let a = &corners[e];
        let b = &corners[(e + 1) % 4];
        let segs = opts.initial_segments.max(1);
        // work stack of (t0, t1, depth) along the edge, processed left to right
        let mut prev_t = Rational::zero();
        let mut prev_v = eval_partial(a, n_trunc);
        note_modulus(&prev_v)?;
        samples += 1;
        for s in 0..segs {
            let t_end = rat(s as i64 + 1, segs as i64);
            let mut stack = vec![(t_end, 0u32)];
            while let Some((t1, depth)) = stack.pop() {
                let z1 = lerp(a, b, &t1);
                let v1 = eval_partial(&z1, n_trunc);
                samples += 1;
                let (ang, ok) = increment(&prev_v, &v1);
                if ok {
                    note_modulus(&v1)?;
                    total += ang;
                    prev_t = t1;
                    prev_v = v1;
                } else {
                    if depth >= opts.max_depth {
                        return Err(ZeroError::StepTooCoarse(format!(
                            "edge {e} near t = {:.6}",
                            rational::to_f64(&prev_t)
                        )));
                    }
                    let mid = (&prev_t + &t1) / int(2);
                    stack.push((t1, depth + 1));
                    stack.push((mid, depth + 1));
                }
            }
        }
    }
    let winding = total / (2.0 * std::f64::consts::PI);
    let zeros = winding.round();
    debug_assert!((winding - zeros).abs() < 1e-6);
    let min_mod = min_mod_sq.expect("at least one sample");
    Ok(WindingReport {
        zeros: zeros as i64,
        samples,
        min_modulus_log2: rational::log2_abs(&min_mod) / 2.0,
        tail_log2: rational::log2_abs(&tail),
    })
}
