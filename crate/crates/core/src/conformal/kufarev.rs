//! Kufarev's exact solution for the suction of two circular bubbles: the
//! conformal map of the unit disk onto the complement of the surviving
//! bubble after the smaller circle has contracted.

use crate::conformal::laurent::{univalence_check, ConformalMap};
use crate::error::{Error, Result};
use crate::numeric::cubic_real_roots;
use num_complex::Complex64;

/// f(zeta) = (beta/alpha)/(1 - alpha zeta) + gamma/zeta for the initial
/// configuration of circles |z| < r1 and |z - a| < r2, suction rate q,
/// at map-time parameter t.
///
/// The enclosed area of the image is pi (2 r2^2 + r1^2 - q t / pi), which
/// runs ahead of the physical remaining-bubble area by pi r2^2; physical
/// time is recovered as t - pi r2^2 / q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KufarevMap {
    pub a: f64,
    pub r1: f64,
    pub r2: f64,
    pub q: f64,
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Roots of the parameter cubic closer than this (relative) are treated as
/// the boundary of the solution's validity window.
const ROOT_COALESCENCE_TOL: f64 = 1e-9;

/// Coefficients (ascending in x) of the cubic whose middle root is alpha^2:
/// 2 a^4 x^3 - (2 a^2 (r1^2 - q t / pi) + a^4) x^2 + (2 r2^2 + r1^2 - q t / pi)^2.
pub fn kufarev_cubic(a: f64, r1: f64, r2: f64, q: f64, t: f64) -> [f64; 4] {
    let w = r1 * r1 - q * t / std::f64::consts::PI;
    let m = 2.0 * r2 * r2 + w;
    let a2 = a * a;
    [m * m, 0.0, -(2.0 * a2 * w + a2 * a2), 2.0 * a2 * a2]
}

pub fn kufarev_solve(a: f64, r1: f64, r2: f64, q: f64, t: f64) -> Result<KufarevMap> {
    if ![a, r1, r2, q, t].iter().all(|v| v.is_finite()) {
        return Err(Error::validation("kufarev_solve: non-finite parameter"));
    }
    if !(r1 > r2 && r2 > 0.0) {
        return Err(Error::validation(format!(
            "kufarev_solve: need r1 > r2 > 0, got r1 = {r1}, r2 = {r2}"
        )));
    }
    if !(a > r1 + r2) {
        return Err(Error::validation(format!(
            "kufarev_solve: circles must be disjoint, need a > r1 + r2 ({a} <= {})",
            r1 + r2
        )));
    }
    if !(q > 0.0) || t < 0.0 {
        return Err(Error::validation(format!(
            "kufarev_solve: need q > 0 and t >= 0, got q = {q}, t = {t}"
        )));
    }

    let m = 2.0 * r2 * r2 + r1 * r1 - q * t / std::f64::consts::PI;
    let [c0, c1, c2, c3] = kufarev_cubic(a, r1, r2, q, t);
    let roots = cubic_real_roots(c3, c2, c1, c0);
    if roots.len() < 3 {
        return Err(Error::numerical(format!(
            "kufarev_solve: parameter cubic has {} real root(s) at t = {t}; \
             outside the solution's validity window",
            roots.len()
        )));
    }
    let span = roots[2].abs().max(roots[0].abs());
    if roots[1] - roots[0] < ROOT_COALESCENCE_TOL * span
        || roots[2] - roots[1] < ROOT_COALESCENCE_TOL * span
    {
        return Err(Error::numerical(format!(
            "kufarev_solve: cubic roots coalesce at t = {t}; validity window boundary"
        )));
    }
    let alpha_sq = roots[1];
    if alpha_sq <= 0.0 {
        return Err(Error::numerical(format!(
            "kufarev_solve: middle root {alpha_sq:.6e} is not positive at t = {t}"
        )));
    }
    let alpha = alpha_sq.sqrt();
    if alpha >= 1.0 {
        return Err(Error::numerical(format!(
            "kufarev_solve: alpha = {alpha:.6} >= 1; map pole enters the disk"
        )));
    }
    let gamma = 0.5 * (a * alpha + m / (a * alpha));
    let beta = 0.5 * (1.0 - alpha_sq) * (a * alpha - m / (a * alpha));
    let map = KufarevMap {
        a,
        r1,
        r2,
        q,
        t,
        alpha,
        beta,
        gamma,
    };
    let report = univalence_check(&map);
    if !report.univalent {
        let f = report.failure.unwrap();
        return Err(Error::NotUnivalent {
            modulus: f.zeta.norm(),
            x: f.image.re,
            y: f.image.im,
        });
    }
    Ok(map)
}

impl KufarevMap {
    /// Exact area enclosed by the image of the unit circle.
    pub fn enclosed_area(&self) -> f64 {
        let s = 1.0 - self.alpha * self.alpha;
        std::f64::consts::PI * (self.gamma * self.gamma - self.beta * self.beta / (s * s))
    }

    /// Physical time since the start of the two-bubble evolution that the
    /// map-time parameter corresponds to.
    pub fn physical_time(&self) -> f64 {
        self.t - std::f64::consts::PI * self.r2 * self.r2 / self.q
    }
}

impl ConformalMap for KufarevMap {
    fn eval(&self, zeta: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        (self.beta / self.alpha) / (one - self.alpha * zeta) + self.gamma / zeta
    }

    fn derivative(&self, zeta: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let d = one - self.alpha * zeta;
        self.beta / (d * d) - self.gamma / (zeta * zeta)
    }

    fn critical_polynomial(&self) -> Vec<Complex64> {
        // zeta^2 (1 - alpha zeta)^2 f' = beta zeta^2 - gamma (1 - alpha zeta)^2
        let (al, be, ga) = (self.alpha, self.beta, self.gamma);
        vec![
            Complex64::new(-ga, 0.0),
            Complex64::new(2.0 * ga * al, 0.0),
            Complex64::new(be - ga * al * al, 0.0),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn reference_configuration_coefficients() {
        // a = 3, r1 = 1, r2 = 1/2, t = 0: cubic 162 x^3 - 99 x^2 + 2.25
        let [c0, c1, c2, c3] = kufarev_cubic(3.0, 1.0, 0.5, 1.0, 0.0);
        assert_eq!((c3, c2, c1, c0), (162.0, -99.0, 0.0, 2.25));
        let roots = cubic_real_roots(c3, c2, c1, c0);
        assert_eq!(roots.len(), 3);
        for (r, want) in roots
            .iter()
            .zip([-0.136316717553, 0.179355530015, 0.568072298649])
        {
            assert!((r - want).abs() < 1e-9, "root {r} vs {want}");
        }

        let map = kufarev_solve(3.0, 1.0, 0.5, 1.0, 0.0).unwrap();
        assert!((map.alpha - 0.4235038724908783).abs() < 1e-12);
        assert!((map.beta - 0.036881760286301524).abs() < 1e-12);
        assert!((map.gamma - 1.2255691830381892).abs() < 1e-12);
        assert!(univalence_check(&map).univalent);
    }

    #[test]
    fn gamma_formula_identity() {
        for t in [0.0, 0.5, 1.0, 2.0] {
            let map = kufarev_solve(3.0, 1.0, 0.5, 1.0, t).unwrap();
            let m = 2.0 * 0.25 + 1.0 - t / PI;
            let want = 0.5 * (3.0 * map.alpha + m / (3.0 * map.alpha));
            assert!((map.gamma - want).abs() < 1e-14);
        }
    }

    #[test]
    fn enclosed_area_tracks_map_time() {
        for t in [0.0, 0.7, 1.9] {
            let map = kufarev_solve(3.0, 1.0, 0.5, 1.0, t).unwrap();
            let want = PI * (2.0 * 0.25 + 1.0 - t / PI);
            assert!(
                (map.enclosed_area() - want).abs() < 1e-9,
                "t = {t}: {} vs {want}",
                map.enclosed_area()
            );
        }
        let map = kufarev_solve(3.0, 1.0, 0.5, 1.0, 0.0).unwrap();
        assert!((map.physical_time() - (0.0 - PI * 0.25)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_time_rejected() {
        // q t / pi = 2 r2^2 + r1^2 zeroes the constant term
        let t = PI * 1.5;
        assert!(kufarev_solve(3.0, 1.0, 0.5, 1.0, t).is_err());
    }

    #[test]
    fn parameter_preconditions() {
        assert!(kufarev_solve(1.4, 1.0, 0.5, 1.0, 0.0).is_err()); // overlapping
        assert!(kufarev_solve(3.0, 0.5, 1.0, 1.0, 0.0).is_err()); // r1 < r2
        assert!(kufarev_solve(3.0, 1.0, 0.5, -1.0, 0.0).is_err()); // bad rate
        assert!(kufarev_solve(3.0, 1.0, 0.5, 1.0, -0.1).is_err()); // negative time
    }
}
