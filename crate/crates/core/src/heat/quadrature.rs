//! Gauss–Legendre rules on `[-1, 1]` and composite panels.

/// Nodes and weights of the `n`-point Gauss–Legendre rule, by Newton iteration on
/// `P_n` from Chebyshev-like initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "rule needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            if n == 1 {
                dp = 1.0;
            }
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite rule: nodes and weights of `rule` mapped onto each `[b_k, b_{k+1}]`.
pub fn composite(breaks: &[f64], rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let (xs, ws) = rule;
    let mut out = Vec::with_capacity(breaks.len().saturating_sub(1) * xs.len());
    for seg in breaks.windows(2) {
        let half = 0.5 * (seg[1] - seg[0]);
        let mid = 0.5 * (seg[1] + seg[0]);
        for (x, w) in xs.iter().zip(ws) {
            out.push((mid + half * x, half * w));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16] {
            let r = gauss_legendre(n);
            assert_relative_eq!(r.1.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            let deg = 2 * n - 1;
            let s: f64 = r.0.iter().zip(&r.1).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert_relative_eq!(s, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn composite_gaussian_integral() {
        let r = gauss_legendre(16);
        let breaks: Vec<f64> = (0..=40).map(|i| -10.0 + 0.5 * i as f64).collect();
        let s: f64 = composite(&breaks, &r)
            .iter()
            .map(|(x, w)| w * (-x * x).exp())
            .sum();
        assert_relative_eq!(s, std::f64::consts::PI.sqrt(), epsilon = 1e-14);
    }
}
