//! Closed-form limit curves of degenerate contraction: the symmetric
//! family y^2 = (beta - n alpha^2)^2 (1 - x^2) Q_{n-1}(x^2)^2 and the
//! saddle-node curve y^2 = beta^2 (x + 1/2)^3 (3/2 - x).

use crate::conformal::qpoly::qn;
use crate::error::{Error, Result};
use crate::geometry::{pt, BoundaryCurve};

/// Symmetric limit curve of order n, sampled as a closed counterclockwise
/// trace with x = cos(theta). Requires beta - n alpha^2 > 0; the curve is a
/// single loop meeting y = 0 only at x = +-1 because Q_{n-1} > 0 on [0, 1].
pub fn limit_curve(n: u32, beta: f64, alpha: f64, samples: usize) -> Result<BoundaryCurve> {
    if n < 1 {
        return Err(Error::validation("limit_curve: n must be >= 1"));
    }
    if samples < 64 {
        return Err(Error::validation(format!(
            "limit_curve: samples = {samples} < 64"
        )));
    }
    let pref = beta - n as f64 * alpha * alpha;
    if !(pref > 0.0) || !pref.is_finite() {
        return Err(Error::validation(format!(
            "limit_curve: beta - n alpha^2 = {pref} must be positive"
        )));
    }
    let q = qn(n - 1)?;
    let points = (0..samples)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / samples as f64;
            let x = th.cos();
            pt(x, pref * th.sin() * q.eval(x * x))
        })
        .collect();
    BoundaryCurve::new_fast(points)
}

/// Saddle-node limit curve, parametrized by x = cos(theta) + 1/2,
/// y = -beta sin(theta) (1 + cos(theta)); supported on x in [-1/2, 3/2]
/// with a 3/2-power cusp at (-1/2, 0). Returned counterclockwise.
pub fn saddle_node_curve(beta: f64, samples: usize) -> Result<BoundaryCurve> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::validation(format!(
            "saddle_node_curve: beta = {beta} must be positive"
        )));
    }
    if samples < 64 {
        return Err(Error::validation(format!(
            "saddle_node_curve: samples = {samples} < 64"
        )));
    }
    let mut points: Vec<_> = (0..samples)
        .map(|j| {
            let th = std::f64::consts::TAU * j as f64 / samples as f64;
            pt(th.cos() + 0.5, -beta * th.sin() * (1.0 + th.cos()))
        })
        .collect();
    // the stated parametrization runs clockwise
    points[1..].reverse();
    BoundaryCurve::new_fast(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cusp_exponent;

    #[test]
    fn order_one_is_the_ellipse() {
        let c = limit_curve(1, 0.7, 0.0, 512).unwrap();
        for (j, p) in c.points().iter().enumerate() {
            let th = std::f64::consts::TAU * j as f64 / 512.0;
            assert!((p.x - th.cos()).abs() < 1e-12);
            assert!((p.y - 0.7 * th.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn order_two_satisfies_its_equation() {
        let c = limit_curve(2, 1.0, 0.0, 1024).unwrap();
        for p in c.points() {
            let want = (1.0 - p.x * p.x) * (p.x * p.x + 0.5).powi(2);
            assert!((p.y * p.y - want).abs() < 1e-12);
        }
        // single loop: y = 0 only at x = +-1
        for p in c.points() {
            if p.x.abs() < 0.999 {
                assert!(p.y.abs() > 1e-4, "unexpected axis touch at {p:?}");
            }
        }
    }

    #[test]
    fn nonsymmetric_prefactor() {
        // n = 2, beta = 1, alpha = 0.5: prefactor beta - n alpha^2 = 0.5
        let c = limit_curve(2, 1.0, 0.5, 1024).unwrap();
        let top = c
            .points()
            .iter()
            .map(|p| p.y)
            .fold(f64::NEG_INFINITY, f64::max);
        // max of sin(th) Q1(cos^2 th) over th, times the prefactor;
        // at x = 0 the height is 0.5 * Q1(0) = 0.25
        let at_zero = c
            .points()
            .iter()
            .filter(|p| p.x.abs() < 2e-3)
            .map(|p| p.y.abs())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((at_zero - 0.25).abs() < 1e-5);
        assert!(top < 0.5);

        assert!(limit_curve(2, 0.5, 0.5, 256).is_err()); // prefactor 0
        assert!(limit_curve(0, 1.0, 0.0, 256).is_err());
    }

    #[test]
    fn saddle_node_support_and_cusp() {
        let c = saddle_node_curve(0.8, 4096).unwrap();
        let xs: Vec<f64> = c.points().iter().map(|p| p.x).collect();
        let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(xmax, 1.5);
        assert_eq!(xmin, -0.5);
        assert!(c.area() > 0.0, "orientation flip failed");
        for p in c.points() {
            let want = 0.64 * (p.x + 0.5).powi(3) * (1.5 - p.x);
            assert!((p.y * p.y - want).abs() < 1e-12);
        }

        let fit = cusp_exponent(&c, pt(-0.5, 0.0)).unwrap();
        assert!(
            (fit.exponent - 1.5).abs() < 0.1,
            "cusp exponent {}",
            fit.exponent
        );
        assert!(fit.is_cusp);
    }

    #[test]
    fn saddle_node_scales_linearly_in_beta() {
        let c1 = saddle_node_curve(0.8, 512).unwrap();
        let c2 = saddle_node_curve(1.6, 512).unwrap();
        for (p, q) in c1.points().iter().zip(c2.points()) {
            assert_eq!(p.x, q.x);
            assert!((q.y - 2.0 * p.y).abs() < 1e-15);
        }
        assert!(saddle_node_curve(0.0, 512).is_err());
    }
}
