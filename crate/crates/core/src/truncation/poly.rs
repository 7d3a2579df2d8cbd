//! Dense integer polynomials and Sturm sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// Integer polynomial, coefficients from the constant term up. Never has a zero
/// leading coefficient unless it is the zero polynomial (empty vector).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly(pub Vec<BigInt>);

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Self(c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> &BigInt {
        self.0.last().expect("zero polynomial has no leading coefficient")
    }

    /// Divide out the (positive) content.
    pub fn primitive(self) -> Self {
        let g = self
            .0
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() || g.is_one() {
            return self;
        }
        Self(self.0.into_iter().map(|c| c / &g).collect())
    }

    pub fn negated(self) -> Self {
        Self(self.0.into_iter().map(|c| -c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Sign of `P(x)` for rational `x`, computed exactly as the sign of
    /// `q^d · P(p/q)`.
    pub fn sign_at(&self, x: &Rational) -> i32 {
        let Some(d) = self.degree() else { return 0 };
        let p = x.numer();
        let q = x.denom();
        let mut acc = self.0[d].clone();
        let mut qpow = BigInt::one();
        for i in (0..d).rev() {
            qpow *= q;
            acc = acc * p + &self.0[i] * &qpow;
        }
        sign_of(&acc)
    }

    /// Sign as `x → +∞` (`positive = true`) or `x → -∞`.
    pub fn sign_at_infinity(&self, positive: bool) -> i32 {
        let Some(d) = self.degree() else { return 0 };
        let s = sign_of(self.leading());
        if positive || d % 2 == 0 {
            s
        } else {
            -s
        }
    }

    /// Pseudo-remainder of `self` by `b`, scaled so that it is a positive
    /// multiple of the true remainder.
    pub fn signed_prem(&self, b: &IntPoly) -> IntPoly {
        let db = b.degree().expect("division by zero polynomial");
        let lb = b.leading().clone();
        let mut r = self.0.clone();
        let mut positive_scale = true;
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            // r = lb·r - lr·x^{dr-db}·b
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (i, bc) in b.0.iter().enumerate() {
                r[i + dr - db] -= &lr * bc;
            }
            if lb.is_negative() {
                positive_scale = !positive_scale;
            }
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        let out = IntPoly::new(r);
        if positive_scale {
            out
        } else {
            out.negated()
        }
    }
}

fn sign_of(x: &BigInt) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// Canonical Sturm chain `p, p', -rem(p, p'), …` with primitive parts.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<IntPoly>,
}

impl SturmChain {
    pub fn new(p: &IntPoly) -> Self {
        let mut chain = vec![p.clone().primitive(), p.derivative().primitive()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            if chain[n - 1].degree() == Some(0) {
                break;
            }
            let r = chain[n - 2].signed_prem(&chain[n - 1]).negated().primitive();
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        Self { chain }
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    fn variations<I: Iterator<Item = i32>>(signs: I) -> usize {
        let mut last = 0;
        let mut v = 0;
        for s in signs.filter(|&s| s != 0) {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Sign variations of the chain at `x`.
    pub fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at(x)))
    }

    pub fn variations_at_infinity(&self, positive: bool) -> usize {
        Self::variations(self.chain.iter().map(|p| p.sign_at_infinity(positive)))
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count_in(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }

    /// Distinct real roots on the whole line.
    pub fn count_real(&self) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at_infinity(true))
    }

    /// Distinct roots in `(-∞, x]`.
    pub fn count_below(&self, x: &Rational) -> usize {
        self.variations_at_infinity(false)
            .saturating_sub(self.variations_at(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    #[test]
    fn counts_roots_of_known_cubic() {
        // (x-1)(x-2)(x+3) = x³ - 7x + 6
        let q = p(&[6, -7, 0, 1]);
        let s = SturmChain::new(&q);
        assert_eq!(s.count_real(), 3);
        assert_eq!(s.count_in(&int(0), &int(3)), 2);
        assert_eq!(s.count_below(&int(0)), 1);
        assert_eq!(s.count_in(&rat(3, 2), &rat(5, 2)), 1);
    }

    #[test]
    fn one_real_root_cubic() {
        // x³ + 12x² + 48x + 48, cleared P_3
        let q = p(&[48, 48, 12, 1]);
        let s = SturmChain::new(&q);
        assert_eq!(s.count_real(), 1);
        assert_eq!(s.count_in(&int(-2), &int(-1)), 1);
    }

    #[test]
    fn sign_evaluation_is_exact() {
        let q = p(&[-1, 0, 3]); // 3x² - 1
        assert_eq!(q.sign_at(&rat(1, 2)), -1);
        assert_eq!(q.sign_at(&rat(3, 5)), 1);
        assert_eq!(q.sign_at_infinity(false), 1);
    }
}
