//! The family of polynomials Q_n(u) = sum_{k=0}^n (2k)!/(4^k k!^2) u^{n-k}
//! that parametrize the symmetric degenerate-contraction limit curves.

use crate::error::{Error, Result};
use num::rational::Ratio;

/// Q_n with exact rational coefficients, stored ascending: `coeffs[j]` is
/// the coefficient of u^j. All coefficients are positive and the leading
/// one is 1, so Q_n > 0 on [0, 1].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QPolynomial {
    pub n: u32,
    pub coeffs: Vec<Ratio<i64>>,
}

/// Largest n for which the exact coefficients fit comfortably in i64.
pub const QN_MAX: u32 = 12;

pub fn qn(n: u32) -> Result<QPolynomial> {
    if n > QN_MAX {
        return Err(Error::validation(format!(
            "qn: n = {n} out of range (0..={QN_MAX})"
        )));
    }
    // c_k = (2k choose k) / 4^k via c_0 = 1, c_k = c_{k-1} (2k-1)/(2k);
    // the coefficient of u^{n-k} is c_k
    let mut c = vec![Ratio::new(1i64, 1i64)];
    for k in 1..=n as i64 {
        let prev = *c.last().unwrap();
        c.push(prev * Ratio::new(2 * k - 1, 2 * k));
    }
    let coeffs = (0..=n).map(|j| c[(n - j) as usize]).collect();
    Ok(QPolynomial { n, coeffs })
}

impl QPolynomial {
    pub fn eval(&self, u: f64) -> f64 {
        let mut v = 0.0;
        for &c in self.coeffs.iter().rev() {
            v = v * u + (*c.numer() as f64) / (*c.denom() as f64);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn small_cases_exact() {
        assert_eq!(qn(0).unwrap().coeffs, vec![r(1, 1)]);
        assert_eq!(qn(1).unwrap().coeffs, vec![r(1, 2), r(1, 1)]);
        assert_eq!(qn(2).unwrap().coeffs, vec![r(3, 8), r(1, 2), r(1, 1)]);
        assert!(qn(13).is_err());
    }

    #[test]
    fn coefficients_positive_and_monic() {
        for n in 0..=QN_MAX {
            let q = qn(n).unwrap();
            assert_eq!(q.coeffs.len() as u32, n + 1);
            assert!(q.coeffs.iter().all(|c| *c > r(0, 1)), "n = {n}");
            assert_eq!(*q.coeffs.last().unwrap(), r(1, 1));
            // positivity of the coefficients gives positivity on [0, 1]
            for i in 0..=100 {
                assert!(q.eval(i as f64 / 100.0) > 0.0);
            }
        }
    }

    /// Im of the positive-frequency part of (zeta + 1/zeta)^(2n-1) on the
    /// unit circle equals 4^(n-1) Q_{n-1}(cos^2 t) sin t.
    #[test]
    fn positive_part_identity() {
        fn binom(n: u32, k: u32) -> f64 {
            let mut v = 1.0;
            for i in 0..k {
                v = v * (n - i) as f64 / (i + 1) as f64;
            }
            v
        }
        for n in 1..=5u32 {
            let q = qn(n - 1).unwrap();
            let scale = 4f64.powi(n as i32 - 1);
            for j in 0..1024 {
                let th = std::f64::consts::TAU * j as f64 / 1024.0;
                let mut lhs = 0.0;
                for k in 0..n {
                    let freq = (2 * n - 1 - 2 * k) as f64;
                    lhs += binom(2 * n - 1, k) * (freq * th).sin();
                }
                let rhs = scale * q.eval(th.cos().powi(2)) * th.sin();
                assert!(
                    (lhs - rhs).abs() < 1e-10,
                    "n = {n}, theta = {th}: {lhs} vs {rhs}"
                );
            }
        }
    }
}
