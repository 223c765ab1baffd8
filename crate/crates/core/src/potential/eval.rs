use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, BubbleSystem, Point};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Symmetric 2x2 matrix (a Hessian).
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SymMat2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymMat2 {
    pub fn diag(a: f64, b: f64) -> Self {
        SymMat2 {
            xx: a,
            xy: 0.0,
            yy: b,
        }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn apply(&self, v: Point) -> Point {
        Point {
            x: self.xx * v.x + self.xy * v.y,
            y: self.xy * v.x + self.yy * v.y,
        }
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let m = 0.5 * (self.xx + self.yy);
        let d = 0.5 * (self.xx - self.yy);
        let r = (d * d + self.xy * self.xy).sqrt();
        (m - r, m + r)
    }

    /// Eigenvalues (ascending) and the matching unit eigenvectors.
    pub fn eigen_axes(&self) -> ((f64, f64), (Point, Point)) {
        let (l1, l2) = self.eigenvalues();
        let v1 = self.eigenvector_for(l1);
        // the companion axis is the perpendicular
        let v2 = v1.perp();
        ((l1, l2), (v1, v2))
    }

    fn eigenvector_for(&self, lam: f64) -> Point {
        // pick the better-conditioned of the two row equations
        let a = Point {
            x: self.xy,
            y: lam - self.xx,
        };
        let b = Point {
            x: lam - self.yy,
            y: self.xy,
        };
        let v = if a.norm() >= b.norm() { a } else { b };
        if v.norm() == 0.0 {
            // isotropic matrix: any direction
            Point { x: 1.0, y: 0.0 }
        } else {
            v.normalized()
        }
    }
}

/// Value, gradient, and Hessian of the gravity potential at one point.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct PotentialProbe {
    pub point: Point,
    pub value: f64,
    pub gradient: Point,
    pub hessian: SymMat2,
}

/// How close to a boundary (in units of that bubble's marker spacing) an
/// evaluation point may sit before the quadrature is refused.
pub const BOUNDARY_GUARD_FACTOR: f64 = 0.1;

/// Exact contribution of one polygonal bubble to (value, gradient, Hessian)
/// of (1/2pi) integral_B log|z - w| dA(w).
///
/// The area integral reduces to per-segment antiderivatives of the log
/// kernel; every term below is closed-form, so the result is exact for the
/// polygon (no quadrature error, only rounding). Evaluating exactly on the
/// boundary produces non-finite values; callers guard for proximity.
fn curve_field(curve: &BoundaryCurve, p: Point) -> (f64, Point, SymMat2) {
    let pts = curve.points();
    let n = pts.len();
    let mut val = 0.0;
    let mut gx = 0.0;
    let mut gy = 0.0;
    // X = sum of log((b-p)/(a-p)); Y = sum of (d/conj(d)) * conj(log(..))
    let mut xs = Complex64::new(0.0, 0.0);
    let mut ys = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let r0 = a - p;
        let d = b - a;
        let l = d.norm();
        if l == 0.0 {
            continue;
        }
        let t0 = r0.dot(d) / l;
        let t1 = t0 + l;
        let kappa = r0.cross(d);
        let h = kappa / l;
        // antiderivative of log sqrt(t^2 + h^2); atan(t/h), not atan2(t, h),
        // because the antiderivative must be continuous in t and atan2 jumps
        // by 2*pi across t = 0 when h < 0
        let anti = |t: f64| {
            let s = t * t + h * h;
            if s == 0.0 {
                0.0
            } else {
                let ang = if h == 0.0 { 0.0 } else { (t / h).atan() };
                0.5 * (t * s.ln() - 2.0 * t + 2.0 * h * ang)
            }
        };
        let ilog = (anti(t1) - anti(t0)) / l;
        val += 0.25 * kappa * (2.0 * ilog - 1.0);
        // gradient accumulates i * d * ilog
        gx -= d.y * ilog;
        gy += d.x * ilog;
        let ra = Complex64::new(r0.x, r0.y);
        let rb = Complex64::new(b.x - p.x, b.y - p.y);
        let lam = (rb / ra).ln();
        let dc = Complex64::new(d.x, d.y);
        xs += lam;
        ys += dc / dc.conj() * lam.conj();
    }
    let c = 0.5 / PI;
    let q = 0.25 / PI;
    let hess = SymMat2 {
        xx: q * (xs.im + ys.im),
        // the two mixed derivatives agree because Re(X) telescopes to zero
        xy: -q * ys.re,
        yy: q * (xs.im - ys.im),
    };
    (val * c, Point { x: gx, y: gy } * c, hess)
}

pub(crate) fn eval_unguarded(system: &BubbleSystem, point: Point) -> PotentialProbe {
    let mut value = 0.0;
    let mut gradient = Point::default();
    let mut hessian = SymMat2::default();
    for b in &system.bubbles {
        let (v, g, h) = curve_field(&b.curve, point);
        value += v;
        gradient += g;
        hessian.xx += h.xx;
        hessian.xy += h.xy;
        hessian.yy += h.yy;
    }
    PotentialProbe {
        point,
        value,
        gradient,
        hessian,
    }
}

/// Potential probe for the whole system: (1/2pi) integral over the union of
/// the bubbles of log|z - w| dA(w), with gradient and Hessian.
///
/// Refuses points closer to a boundary than [`BOUNDARY_GUARD_FACTOR`] times
/// that bubble's marker spacing; the quadrature is near-singular there and
/// the caller should resample or move the probe.
pub fn eval_potential(system: &BubbleSystem, point: Point) -> Result<PotentialProbe> {
    if !point.is_finite() {
        return Err(Error::validation("non-finite evaluation point"));
    }
    for b in &system.bubbles {
        let guard = BOUNDARY_GUARD_FACTOR * b.curve.mean_spacing();
        let dist = b.curve.distance_to_boundary(point);
        if dist < guard {
            return Err(Error::TooCloseToBoundary {
                x: point.x,
                y: point.y,
                dist,
                guard,
            });
        }
    }
    Ok(eval_unguarded(system, point))
}

/// Closed-form interior probe for the centered axis-aligned ellipse
/// x^2/a^2 + y^2/b^2 < 1: derivatives of (1/2) (b x^2 + a y^2) / (a + b).
/// The additive constant of the true potential is not represented, so only
/// gradient and Hessian are comparable against quadrature.
pub fn ellipse_potential(a: f64, b: f64, point: Point) -> Result<PotentialProbe> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::validation(format!(
            "ellipse semi-axes must be positive, got ({a}, {b})"
        )));
    }
    let r2 = (point.x / a).powi(2) + (point.y / b).powi(2);
    if r2 >= 1.0 {
        return Err(Error::validation(format!(
            "point ({}, {}) is not strictly inside the ellipse ({a}, {b})",
            point.x, point.y
        )));
    }
    let s = a + b;
    Ok(PotentialProbe {
        point,
        value: 0.5 * (b * point.x * point.x + a * point.y * point.y) / s,
        gradient: Point {
            x: b * point.x / s,
            y: a * point.y / s,
        },
        hessian: SymMat2::diag(b / s, a / s),
    })
}

/// Cauchy transform of the system restricted to a bubble interior:
/// conj(z) - 4 dPi/dz with dPi/dz = (Pi_x - i Pi_y)/2.
///
/// Vanishes identically on a disk; equals ((a-b)/(a+b)) z on the centered
/// ellipse. Errors when the point is not strictly inside a bubble.
pub fn cauchy_transform(system: &BubbleSystem, point: Point) -> Result<Complex64> {
    if system.bubble_containing(point).is_none() {
        return Err(Error::validation(format!(
            "point ({}, {}) is outside all bubbles",
            point.x, point.y
        )));
    }
    let probe = eval_potential(system, point)?;
    let dz = Complex64::new(probe.gradient.x, -probe.gradient.y) * 0.5;
    Ok(Complex64::new(point.x, -point.y) - 4.0 * dz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{disk_curve, ellipse_curve, pt};

    fn one(curve: BoundaryCurve) -> BubbleSystem {
        BubbleSystem::new(vec![curve]).unwrap()
    }

    #[test]
    fn disk_center_probe() {
        let sys = one(disk_curve(pt(0.0, 0.0), 1.0, 2000));
        let p = eval_potential(&sys, pt(0.0, 0.0)).unwrap();
        assert!((p.value + 0.25).abs() < 1e-5, "value {}", p.value);
        assert!(p.gradient.norm() < 1e-12);
        assert!((p.hessian.xx - 0.5).abs() < 1e-5);
        assert!((p.hessian.yy - 0.5).abs() < 1e-5);
        assert!(p.hessian.xy.abs() < 1e-12);
    }

    #[test]
    fn disk_far_field() {
        let sys = one(disk_curve(pt(0.0, 0.0), 1.0, 1024));
        let p = eval_potential(&sys, pt(10.0, 0.0)).unwrap();
        assert!((p.value - 0.5 * 10.0f64.ln()).abs() < 1e-3, "value {}", p.value);
        assert!((p.gradient.x - 0.05).abs() < 1e-6);
        assert!(p.gradient.y.abs() < 1e-12);
        // harmonic outside: trace vanishes
        assert!(p.hessian.trace().abs() < 1e-12);
    }

    #[test]
    fn ellipse_center_hessian_and_identity_sweep() {
        for &(a, b) in &[(2.0, 1.0), (1.0, 1.0), (5.0, 1.0), (10.0, 1.0)] {
            let n = 3000;
            let sys = one(ellipse_curve(pt(0.0, 0.0), a, b, n));
            let p = eval_potential(&sys, pt(0.0, 0.0)).unwrap();
            let s = a + b;
            assert!(
                (p.hessian.xx - b / s).abs() < 1e-4,
                "a={a} b={b} xx {} vs {}",
                p.hessian.xx,
                b / s
            );
            assert!((p.hessian.yy - a / s).abs() < 1e-4);
        }
    }

    #[test]
    fn poisson_trace_is_exact_for_polygons() {
        // irregular pentagon
        let c = BoundaryCurve::new(vec![
            pt(1.0, 0.0),
            pt(0.4, 0.9),
            pt(-0.8, 0.6),
            pt(-0.7, -0.5),
            pt(0.3, -0.9),
            pt(0.9, -0.4),
            pt(1.1, -0.2),
            pt(1.05, -0.1),
        ])
        .unwrap();
        let sys = one(c);
        let inside = eval_potential(&sys, pt(0.05, 0.0)).unwrap();
        assert!((inside.hessian.trace() - 1.0).abs() < 1e-12);
        let outside = eval_potential(&sys, pt(3.0, 2.0)).unwrap();
        assert!(outside.hessian.trace().abs() < 1e-12);
    }

    #[test]
    fn gradient_bound_holds() {
        let c = BoundaryCurve::new(vec![
            pt(1.0, 0.0),
            pt(0.4, 0.9),
            pt(-0.8, 0.6),
            pt(-0.7, -0.5),
            pt(0.3, -0.9),
            pt(0.9, -0.4),
            pt(1.1, -0.2),
            pt(1.05, -0.1),
        ])
        .unwrap();
        let s = c.area();
        let sys = one(c);
        let cap = (s / PI).sqrt() + 1e-9;
        for &q in &[
            pt(0.0, 0.0),
            pt(0.5, 0.2),
            pt(2.0, 1.0),
            pt(-4.0, 3.0),
            pt(0.2, -0.6),
            pt(30.0, -10.0),
        ] {
            let p = eval_potential(&sys, q).unwrap();
            assert!(p.gradient.norm() <= cap, "grad {} at {:?}", p.gradient.norm(), q);
        }
    }

    #[test]
    fn equivariance_under_rotation_and_translation() {
        let base = BoundaryCurve::new(vec![
            pt(1.0, 0.0),
            pt(0.4, 0.9),
            pt(-0.8, 0.6),
            pt(-0.7, -0.5),
            pt(0.3, -0.9),
            pt(0.9, -0.4),
            pt(1.1, -0.2),
            pt(1.05, -0.1),
        ])
        .unwrap();
        let th = 0.7f64;
        let shift = pt(1.3, -2.1);
        let moved = base.transformed(|p| p.rotated(th) + shift);
        let q = pt(0.4, 0.3);
        let p1 = eval_potential(&one(base), q).unwrap();
        let p2 = eval_potential(&one(moved), q.rotated(th) + shift).unwrap();
        assert!((p1.value - p2.value).abs() < 1e-9);
        assert!((p1.gradient.rotated(th) - p2.gradient).norm() < 1e-9);
        // moving the domain rigidly conjugates the Hessian: H -> R H R^T
        let (c, s) = (th.cos(), th.sin());
        let h = p1.hessian;
        let expect = SymMat2 {
            xx: c * c * h.xx - 2.0 * c * s * h.xy + s * s * h.yy,
            xy: c * s * (h.xx - h.yy) + (c * c - s * s) * h.xy,
            yy: s * s * h.xx + 2.0 * c * s * h.xy + c * c * h.yy,
        };
        assert!((p2.hessian.xx - expect.xx).abs() < 1e-9);
        assert!((p2.hessian.xy - expect.xy).abs() < 1e-9);
        assert!((p2.hessian.yy - expect.yy).abs() < 1e-9);
    }

    #[test]
    fn guard_refuses_near_boundary() {
        let sys = one(disk_curve(pt(0.0, 0.0), 1.0, 256));
        let err = eval_potential(&sys, pt(1.0, 0.0));
        assert!(matches!(err, Err(Error::TooCloseToBoundary { .. })));
    }

    #[test]
    fn ellipse_closed_form_probe() {
        let p = ellipse_potential(2.0, 1.0, pt(0.5, 0.2)).unwrap();
        assert!((p.gradient.x - 0.5 / 3.0).abs() < 1e-12);
        assert!((p.gradient.y - 0.4 / 3.0).abs() < 1e-12);
        assert!((p.hessian.xx - 1.0 / 3.0).abs() < 1e-12);
        assert!((p.hessian.yy - 2.0 / 3.0).abs() < 1e-12);
        // eigenvalue ratio follows the aspect ratio
        for &(a, b) in &[(2.0, 1.0), (3.0, 1.5), (7.0, 2.0)] {
            let p = ellipse_potential(a, b, pt(0.0, 0.0)).unwrap();
            let (l1, l2) = p.hessian.eigenvalues();
            assert!((l2 / l1 - a / b).abs() < 1e-12);
        }
        assert!(ellipse_potential(2.0, 1.0, pt(3.0, 0.0)).is_err());
        assert!(ellipse_potential(-1.0, 1.0, pt(0.0, 0.0)).is_err());
    }

    #[test]
    fn cauchy_transform_disk_and_ellipse() {
        let sys = one(disk_curve(pt(0.0, 0.0), 1.0, 2048));
        let h = cauchy_transform(&sys, pt(0.3, 0.1)).unwrap();
        assert!(h.norm() < 1e-5, "disk transform {h}");

        let sys = one(ellipse_curve(pt(0.0, 0.0), 2.0, 1.0, 4096));
        let h = cauchy_transform(&sys, pt(0.3, 0.0)).unwrap();
        assert!((h.re - 0.1).abs() < 1e-4, "ellipse transform {h}");
        assert!(h.im.abs() < 1e-4);

        assert!(cauchy_transform(&sys, pt(5.0, 0.0)).is_err());
    }
}
