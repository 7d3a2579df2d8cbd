//! Exact analysis of the partial sums `P_N(x) = Σ_{n≤N} xⁿ / (n! 2^{n(n-1)/2})`.
//!
//! For `N > 2`, `P_N` has exactly `N - 2` real roots (all negative and simple) and
//! one complex-conjugate pair. The real roots are isolated on the lattice
//! `ξ_k = -(k+1)·2^{k-1}` with Sturm counts, and the pair's modulus follows from
//! the product of all roots, `|z_N|² = N!·2^{N(N-1)/2} / Π|r_n|`.

pub mod poly;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exec::Exec;
use crate::rational::{self, int, pow2, Rational, RationalInterval};
use crate::zeros::lattice_point;
use poly::{IntPoly, SturmChain};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TruncError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Sturm count {found} differs from the expected {expected} real roots of P_{degree}")]
    CountMismatch {
        degree: usize,
        expected: usize,
        found: usize,
    },
    #[error("P_{0} has a non-negative real root")]
    NonNegativeRoot(usize),
    #[error("complex pair modulus of P_{degree} not certified: {reason}")]
    ModulusUncertified { degree: usize, reason: String },
}

/// Largest degree accepted by default.
pub const MAX_DEGREE: usize = 64;

/// `P_N` with exact coefficients `c_n = 1 / (n! 2^{n(n-1)/2})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedPoly {
    coeffs: Vec<Rational>,
}

impl TruncatedPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Term-by-term derivative.
    pub fn derivative_coeffs(&self) -> Vec<Rational> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c * int(n as i64))
            .collect()
    }

    /// Coefficients of `x ↦ P(x/2)`.
    pub fn half_argument_coeffs(&self) -> Vec<Rational> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * pow2(-(n as i64)))
            .collect()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    /// `D·P_N` with `D = N!·2^{N(N-1)/2}`, a monic integer polynomial.
    pub fn integer_form(&self) -> IntPoly {
        let d = self.leading_inverse();
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|c| (c * Rational::from_integer(d.clone())).to_integer())
                .collect(),
        )
    }

    /// `1 / c_N = N!·2^{N(N-1)/2}`.
    pub fn leading_inverse(&self) -> BigInt {
        let c = self.coeffs.last().unwrap();
        c.denom() / c.numer()
    }
}

/// Exact coefficients of `P_N`.
pub fn coefficients(degree: usize) -> TruncatedPoly {
    let mut coeffs = Vec::with_capacity(degree + 1);
    let mut c = Rational::one();
    coeffs.push(c.clone());
    for n in 1..=degree {
        c /= int(n as i64) * pow2(n as i64 - 1);
        coeffs.push(c.clone());
    }
    TruncatedPoly { coeffs }
}

/// Whether `P_N'(x) = P_{N-1}(x/2)` holds coefficient by coefficient.
pub fn derivative_identity_holds(degree: usize) -> bool {
    if degree == 0 {
        return true;
    }
    coefficients(degree).derivative_coeffs() == coefficients(degree - 1).half_argument_coeffs()
}

/// An isolated real root of `P_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBracket {
    /// 1-based, ordered from the root nearest zero outwards.
    pub index: usize,
    pub lo: Rational,
    pub hi: Rational,
    /// The lattice cell `(ξ_{k+1}, ξ_k]` the root was seeded from, or `None` if it
    /// was found beyond the lattice.
    pub lattice_cell: Option<u32>,
}

impl RootBracket {
    pub fn interval(&self) -> RationalInterval {
        RationalInterval::new(self.lo.clone(), self.hi.clone())
    }

    /// `|r_n| < (n+2)·2ⁿ`, certified from the outer endpoint.
    pub fn bound_holds(&self) -> bool {
        let n = self.index as i64;
        self.lo.abs() < int(n + 2) * pow2(n)
    }
}

/// Real roots of `P_N` and the modulus of its complex pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInventory {
    pub degree: usize,
    pub sturm_count: usize,
    pub real_roots: Vec<RootBracket>,
    pub complex_pair_modulus_sq: RationalInterval,
}

impl RootInventory {
    /// `|z_N|² > 2^N` certified.
    pub fn modulus_bound_holds(&self) -> bool {
        self.complex_pair_modulus_sq.lo > pow2(self.degree as i64)
    }

    pub fn root_bounds_hold(&self) -> bool {
        self.real_roots.iter().all(RootBracket::bound_holds)
    }
}

fn refine_root(p: &IntPoly, mut lo: Rational, mut hi: Rational, width: &Rational) -> (Rational, Rational) {
    let two = int(2);
    let s_lo = p.sign_at(&lo);
    if s_lo == 0 {
        return (lo.clone(), lo);
    }
    if p.sign_at(&hi) == 0 {
        return (hi.clone(), hi);
    }
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        let s = p.sign_at(&mid);
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

fn isolate(
    sturm: &SturmChain,
    lo: Rational,
    hi: Rational,
    cell: Option<u32>,
    out: &mut Vec<(Rational, Rational, Option<u32>)>,
) {
    let c = sturm.count_in(&lo, &hi);
    if c == 0 {
        return;
    }
    if c == 1 {
        out.push((lo, hi, cell));
        return;
    }
    let mid = (&lo + &hi) / int(2);
    isolate(sturm, mid.clone(), hi, cell, out);
    isolate(sturm, lo, mid, cell, out);
}

/// Isolates the `N - 2` real roots of `P_N` to brackets of width `≤ width_tol`.
pub fn real_roots(degree: usize, width_tol: &Rational) -> Result<Vec<RootBracket>, TruncError> {
    Ok(real_roots_with_count(degree, width_tol)?.1)
}

fn real_roots_with_count(
    degree: usize,
    width_tol: &Rational,
) -> Result<(usize, Vec<RootBracket>), TruncError> {
    if degree <= 2 {
        return Err(TruncError::InvalidArgument(format!(
            "real root analysis needs N > 2, got {degree}"
        )));
    }
    if degree > MAX_DEGREE {
        return Err(TruncError::InvalidArgument(format!(
            "degree {degree} exceeds the supported maximum {MAX_DEGREE}"
        )));
    }
    if !width_tol.is_positive() {
        return Err(TruncError::InvalidArgument("width tolerance must be positive".into()));
    }
    let p = coefficients(degree).integer_form();
    let sturm = SturmChain::new(&p);
    let total = sturm.count_real();
    let expected = degree - 2;
    if total != expected {
        return Err(TruncError::CountMismatch {
            degree,
            expected,
            found: total,
        });
    }
    if sturm.count_below(&Rational::zero()) != total {
        return Err(TruncError::NonNegativeRoot(degree));
    }
    // Cauchy bound for a monic integer polynomial
    let cauchy = p.0[..p.0.len() - 1]
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_default()
        + BigInt::one();
    let bound = -Rational::from_integer(cauchy);

    let mut cells = Vec::new();
    let mut right = Rational::zero();
    let mut k = 0u32;
    loop {
        let left = lattice_point(k);
        if left <= bound {
            isolate(&sturm, bound.clone(), right, None, &mut cells);
            break;
        }
        isolate(&sturm, left.clone(), right, Some(k), &mut cells);
        right = left;
        k += 1;
    }
    if cells.len() != expected {
        return Err(TruncError::CountMismatch {
            degree,
            expected,
            found: cells.len(),
        });
    }
    let roots = cells
        .into_iter()
        .enumerate()
        .map(|(i, (lo, hi, cell))| {
            let (lo, hi) = refine_root(&p, lo, hi, width_tol);
            RootBracket {
                index: i + 1,
                lo,
                hi,
                lattice_cell: cell,
            }
        })
        .collect();
    Ok((total, roots))
}

/// `|z_N|²` from the certified real roots, refined until `|z_N|² > 2^N` is decided.
pub fn complex_pair_modulus(
    degree: usize,
    roots: &[RootBracket],
) -> Result<RationalInterval, TruncError> {
    let poly = coefficients(degree);
    let p = poly.integer_form();
    let k = Rational::from_integer(poly.leading_inverse());
    let target = pow2(degree as i64);
    let mut roots = roots.to_vec();
    for _ in 0..8 {
        let prod_outer: Rational = roots.iter().map(|r| r.lo.abs()).product();
        let prod_inner: Rational = roots.iter().map(|r| r.hi.abs()).product();
        if prod_inner.is_zero() {
            return Err(TruncError::ModulusUncertified {
                degree,
                reason: "a root bracket touches zero".into(),
            });
        }
        let iv = RationalInterval::new(&k / prod_outer, &k / prod_inner);
        if iv.lo > target || iv.hi <= target {
            return Ok(iv);
        }
        for r in roots.iter_mut() {
            let w = (&r.hi - &r.lo) * pow2(-32);
            let (lo, hi) = refine_root(&p, r.lo.clone(), r.hi.clone(), &w);
            r.lo = lo;
            r.hi = hi;
        }
    }
    Err(TruncError::ModulusUncertified {
        degree,
        reason: "brackets too wide to separate |z_N|² from 2^N".into(),
    })
}

/// Full root inventory of `P_N`.
pub fn analyze(degree: usize, width_tol: &Rational) -> Result<RootInventory, TruncError> {
    let (sturm_count, real_roots) = real_roots_with_count(degree, width_tol)?;
    let complex_pair_modulus_sq = complex_pair_modulus(degree, &real_roots)?;
    Ok(RootInventory {
        degree,
        sturm_count,
        real_roots,
        complex_pair_modulus_sq,
    })
}

/// [`analyze`] for every degree in `degrees`.
pub fn analyze_range(
    degrees: std::ops::RangeInclusive<usize>,
    width_tol: &Rational,
    exec: Exec,
) -> Vec<Result<RootInventory, TruncError>> {
    let ds: Vec<usize> = degrees.collect();
    exec.map(&ds, |&d| analyze(d, width_tol))
}

/// The monic cubic reached by differentiating `P_n` `n-3` times, with its
/// discriminant computed along two routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicDiscriminant {
    pub n: u32,
    /// `[d, c, b, 1]` for `x³ + b x² + c x + d`.
    pub cubic: [Rational; 4],
    /// Cardano form `(q/2)² + (p/3)³` of the depressed cubic `y³ + p y + q`;
    /// positive means one real root and a complex pair.
    pub cardano: Rational,
    /// Classical `18abcd - 4b³d + b²c² - 4ac³ - 27a²d²`, equal to `-108 · cardano`.
    pub classical: Rational,
}

impl CubicDiscriminant {
    /// `cardano = 2^{6n-12}` exactly.
    pub fn matches_closed_form(&self) -> bool {
        self.cardano == pow2(6 * self.n as i64 - 12)
    }
}

/// `x³ + 3·2^{n-1} x² + 3·2^{2n-2} x + 3·2^{3n-5}` and its discriminant.
pub fn derivative_cubic_discriminant(n: u32) -> Result<CubicDiscriminant, TruncError> {
    if n < 3 {
        return Err(TruncError::InvalidArgument(format!(
            "the derivative cubic needs n ≥ 3, got {n}"
        )));
    }
    let ni = n as i64;
    let cubic = [
        int(3) * pow2(3 * ni - 5),
        int(3) * pow2(2 * ni - 2),
        int(3) * pow2(ni - 1),
        int(1),
    ];
    let [d, c, b, a] = cubic.clone();
    let p = (int(3) * &a * &c - &b * &b) / (int(3) * &a * &a);
    let q = (int(2) * &b * &b * &b - int(9) * &a * &b * &c + int(27) * &a * &a * &d)
        / (int(27) * &a * &a * &a);
    let half_q = &q / int(2);
    let third_p = &p / int(3);
    let cardano = &half_q * &half_q + &third_p * &third_p * &third_p;
    let classical = int(18) * &a * &b * &c * &d - int(4) * &b * &b * &b * &d + &b * &b * &c * &c
        - int(4) * &a * &c * &c * &c
        - int(27) * &a * &a * &d * &d;
    Ok(CubicDiscriminant {
        n,
        cubic,
        cardano,
        classical,
    })
}

/// The `(N-3)`-rd derivative of `P_N`, normalised to be monic.
pub fn reduced_derivative_cubic(degree: usize) -> Result<[Rational; 4], TruncError> {
    if degree < 3 {
        return Err(TruncError::InvalidArgument("need N ≥ 3".into()));
    }
    let mut c = coefficients(degree).coeffs().to_vec();
    for _ in 0..degree - 3 {
        c = c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, v)| v * int(n as i64))
            .collect();
    }
    let lead = c[3].clone();
    Ok([&c[0] / &lead, &c[1] / &lead, &c[2] / &lead, int(1)])
}

/// Gap between the `n`-th root of `P_N` and the certified zero `[lo, hi]` of `f`,
/// as an `f64` estimate.
pub fn root_gap(root: &RootBracket, zero_lo: &Rational, zero_hi: &Rational) -> f64 {
    let a = (&root.lo + &root.hi) / int(2);
    let b = (zero_lo + zero_hi) / int(2);
    rational::to_f64(&(a - b)).abs()
}
