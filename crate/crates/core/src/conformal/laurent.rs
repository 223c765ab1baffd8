//! Finite Laurent conformal maps of the unit disk onto bubble exteriors,
//! univalence checking, and the explicit one-parameter solution families.

use crate::error::{Error, Result};
use crate::geometry::point::segments_intersect;
use crate::geometry::{pt, signed_area, BoundaryCurve, Point};
use crate::numeric::polynomial_roots;
use num_complex::Complex64;

/// A map of the punctured unit disk with a simple pole at 0:
/// f(zeta) = residue/zeta + sum_k coeffs[k] zeta^k. The pole sends 0 to
/// infinity, so the image of the disk is the complement of a bounded set
/// (the bubble) whenever the map is univalent.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMap {
    /// Coefficient of 1/zeta; positive.
    pub residue: f64,
    /// coeffs[k] multiplies zeta^k, starting at the constant term.
    pub coeffs: Vec<Complex64>,
}

/// Evaluation interface shared by the Laurent and Kufarev map types.
pub trait ConformalMap {
    fn eval(&self, zeta: Complex64) -> Complex64;
    fn derivative(&self, zeta: Complex64) -> Complex64;
    /// Polynomial (ascending coefficients) that is nonzero at 0 and whose
    /// roots in the punctured closed disk are exactly the zeros of f'.
    fn critical_polynomial(&self) -> Vec<Complex64>;
}

impl LaurentMap {
    pub fn new(residue: f64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !(residue > 0.0) || !residue.is_finite() {
            return Err(Error::validation(format!(
                "Laurent map needs a positive finite 1/zeta coefficient, got {residue}"
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::validation("Laurent map coefficient is not finite"));
        }
        Ok(LaurentMap { residue, coeffs })
    }

    /// pi (A^2 - sum_k k |a_k|^2): the area enclosed by the image of the
    /// unit circle, by the classical coefficient formula.
    pub fn coefficient_area(&self) -> f64 {
        let drift: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| k as f64 * c.norm_sqr())
            .sum();
        std::f64::consts::PI * (self.residue * self.residue - drift)
    }
}

impl ConformalMap for LaurentMap {
    fn eval(&self, zeta: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            v = v * zeta + c;
        }
        v + self.residue / zeta
    }

    fn derivative(&self, zeta: Complex64) -> Complex64 {
        let mut pow = Complex64::new(1.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            dv += c * k as f64 * pow;
            pow *= zeta;
        }
        dv - self.residue / (zeta * zeta)
    }

    fn critical_polynomial(&self) -> Vec<Complex64> {
        // zeta^2 f'(zeta) = -A + sum_{k>=1} k a_k zeta^{k+1}
        let mut p = vec![Complex64::new(-self.residue, 0.0), Complex64::new(0.0, 0.0)];
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            p.push(c * k as f64);
        }
        while p.len() > 1 && p.last().unwrap().norm() == 0.0 {
            p.pop();
        }
        p
    }
}

/// Sample the image of the unit circle at `n` uniform angles and return it
/// oriented counterclockwise around the bubble. Degenerate or reversed
/// traces (zero enclosed area) are rejected; they signal a collapsed map.
pub fn trace_boundary<M: ConformalMap>(map: &M, n: usize) -> Result<BoundaryCurve> {
    if n < 64 {
        return Err(Error::validation(format!("trace_boundary: n = {n} < 64")));
    }
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        let th = std::f64::consts::TAU * j as f64 / n as f64;
        let z = map.eval(Complex64::new(th.cos(), th.sin()));
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::validation(format!(
                "trace_boundary: non-finite image at angle {th:.6}"
            )));
        }
        points.push(pt(z.re, z.im));
    }
    // the 1/zeta pole makes the raw trace clockwise; flip it, keeping the
    // angle-0 vertex first
    points[1..].reverse();
    let area = signed_area(&points);
    let scale: f64 = points.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
    if area <= 1e-12 * scale * scale {
        return Err(Error::validation(format!(
            "trace_boundary: image is degenerate or not simple (enclosed area {area:.3e})"
        )));
    }
    BoundaryCurve::new_fast(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnivalenceFailureKind {
    /// f' vanishes strictly inside the punctured disk: the map folds.
    CriticalPointInside,
    /// The boundary trace encloses no area (collapsed slit or worse).
    DegenerateTrace,
    /// The boundary trace crosses itself.
    SelfIntersection,
}

#[derive(Debug, Clone, Copy)]
pub struct UnivalenceFailure {
    pub kind: UnivalenceFailureKind,
    /// Location in the zeta disk (for critical points) or on the unit
    /// circle (angle of the offending trace segment).
    pub zeta: Complex64,
    /// Image of `zeta` under the map.
    pub image: Complex64,
}

#[derive(Debug, Clone, Copy)]
pub struct UnivalenceReport {
    pub univalent: bool,
    pub failure: Option<UnivalenceFailure>,
}

/// Boundary critical points (|zeta| within this of 1) are allowed: they are
/// cusps of the image, not folds. The saddle family carries one by design.
const BOUNDARY_ROOT_TOL: f64 = 1e-9;
const UNIVALENCE_TRACE_N: usize = 1024;

/// Univalence test: argument-principle zero count of f' via the explicit
/// critical polynomial, plus simplicity of the traced boundary.
pub fn univalence_check<M: ConformalMap>(map: &M) -> UnivalenceReport {
    let fail = |kind, zeta: Complex64, image: Complex64| UnivalenceReport {
        univalent: false,
        failure: Some(UnivalenceFailure { kind, zeta, image }),
    };

    // interior zeros of f'
    if let Ok(mut roots) = polynomial_roots(&map.critical_polynomial()) {
        roots.sort_by(|a, b| {
            (a.norm(), a.arg())
                .partial_cmp(&(b.norm(), b.arg()))
                .unwrap()
        });
        for r in roots {
            if r.norm() < 1.0 - BOUNDARY_ROOT_TOL && r.norm() > 0.0 {
                return fail(UnivalenceFailureKind::CriticalPointInside, r, map.eval(r));
            }
        }
    }

    // trace simplicity
    let n = UNIVALENCE_TRACE_N;
    let mut points = Vec::with_capacity(n);
    for j in 0..n {
        let th = std::f64::consts::TAU * j as f64 / n as f64;
        points.push(map.eval(Complex64::new(th.cos(), th.sin())));
    }
    let pts: Vec<Point> = points.iter().map(|z| pt(z.re, z.im)).collect();
    let scale: f64 = pts.iter().map(|p| p.norm()).fold(0.0, f64::max).max(1.0);
    if signed_area(&pts).abs() <= 1e-12 * scale * scale {
        let one = Complex64::new(1.0, 0.0);
        return fail(UnivalenceFailureKind::DegenerateTrace, one, map.eval(one));
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                let zeta = Complex64::new(th.cos(), th.sin());
                return fail(UnivalenceFailureKind::SelfIntersection, zeta, points[i]);
            }
        }
    }

    UnivalenceReport {
        univalent: true,
        failure: None,
    }
}

fn univalence_error(failure: Option<UnivalenceFailure>) -> Error {
    match failure {
        Some(f) => Error::NotUnivalent {
            modulus: f.zeta.norm(),
            x: f.image.re,
            y: f.image.im,
        },
        None => Error::numerical("univalence check failed without a location"),
    }
}

/// Area enclosed by the image of the unit circle, by the coefficient
/// formula. Errors on non-univalent maps, for which the formula is
/// meaningless.
pub fn map_area(map: &LaurentMap) -> Result<f64> {
    let report = univalence_check(map);
    if !report.univalent {
        return Err(univalence_error(report.failure));
    }
    Ok(map.coefficient_area())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Symmetric family with a cubic local model: f = A/zeta + a1 zeta + a3 zeta^3,
    /// a1 = A/(1 + 6 beta A^2), a3 = -2 beta A^3.
    Quartic,
    /// Saddle-node family with a built-in boundary cusp at zeta = -1:
    /// f = A/zeta + A + (A - 4 beta A^2) zeta - 2 beta A^2 zeta^2.
    Saddle,
}

/// The named one-parameter exact families at parameter `a` (the 1/zeta
/// coefficient). Errors if the requested parameter leaves the univalent
/// range of the family.
pub fn exact_family(kind: FamilyKind, a: f64, beta: f64) -> Result<LaurentMap> {
    if !(a > 0.0) || !a.is_finite() || !beta.is_finite() {
        return Err(Error::validation(format!(
            "exact_family: need finite beta and a > 0, got a = {a}, beta = {beta}"
        )));
    }
    let re = |x: f64| Complex64::new(x, 0.0);
    let map = match kind {
        FamilyKind::Quartic => {
            let a1 = a / (1.0 + 6.0 * beta * a * a);
            let a3 = -2.0 * beta * a * a * a;
            LaurentMap::new(a, vec![re(0.0), re(a1), re(0.0), re(a3)])?
        }
        FamilyKind::Saddle => {
            let b = -2.0 * beta * a * a;
            // a1 = A + 2B, so zeta^2 f' = 2B zeta^3 + (A + 2B) zeta^2 - A
            // vanishes at zeta = -1 identically in A and beta
            LaurentMap::new(a, vec![re(a), re(a + 2.0 * b), re(b)])?
        }
    };
    let report = univalence_check(&map);
    if !report.univalent {
        return Err(univalence_error(report.failure));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::kufarev::kufarev_solve;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn disk_and_ellipse_traces() {
        let disk = LaurentMap::new(1.0, vec![]).unwrap();
        let c = trace_boundary(&disk, 256).unwrap();
        for p in c.points() {
            assert!((p.norm() - 1.0).abs() < 1e-12);
        }
        assert!(c.area() > 0.0);

        let ell = LaurentMap::new(1.5, vec![re(0.0), re(0.5)]).unwrap();
        let c = trace_boundary(&ell, 512).unwrap();
        for p in c.points() {
            let v = (p.x / 2.0).powi(2) + p.y.powi(2);
            assert!((v - 1.0).abs() < 1e-12, "not on the 2x1 ellipse: {p:?}");
        }
        // vertex at angle 0 is f(1) = 2, kept first by the orientation flip
        assert!((c.vertex(0).x - 2.0).abs() < 1e-15);
    }

    #[test]
    fn slit_trace_rejected() {
        // beta = 0 family member: image collapses to the segment [-2, 2]
        let slit = LaurentMap::new(1.0, vec![re(0.0), re(1.0)]).unwrap();
        assert!(trace_boundary(&slit, 256).is_err());
        let rep = univalence_check(&slit);
        assert!(!rep.univalent);
        assert_eq!(
            rep.failure.unwrap().kind,
            UnivalenceFailureKind::DegenerateTrace
        );
    }

    #[test]
    fn short_traces_rejected() {
        let disk = LaurentMap::new(1.0, vec![]).unwrap();
        assert!(trace_boundary(&disk, 63).is_err());
    }

    #[test]
    fn univalence_of_quartic_family() {
        let small = exact_family(FamilyKind::Quartic, 0.1, 1.0).unwrap();
        assert!(univalence_check(&small).univalent);

        // at A = 1 the derivative vanishes inside the disk
        let a1 = 1.0 / 7.0;
        let a3 = -2.0;
        let big = LaurentMap::new(1.0, vec![re(0.0), re(a1), re(0.0), re(a3)]).unwrap();
        let rep = univalence_check(&big);
        assert!(!rep.univalent);
        let f = rep.failure.unwrap();
        assert_eq!(f.kind, UnivalenceFailureKind::CriticalPointInside);
        assert!(f.zeta.norm() < 1.0);
        assert!(exact_family(FamilyKind::Quartic, 1.0, 1.0).is_err());

        let disk = LaurentMap::new(1.0, vec![]).unwrap();
        assert!(univalence_check(&disk).univalent);
    }

    #[test]
    fn area_formula_and_shoelace_agree() {
        let maps = vec![
            LaurentMap::new(1.0, vec![]).unwrap(),
            LaurentMap::new(1.5, vec![re(0.0), re(0.5)]).unwrap(),
            exact_family(FamilyKind::Quartic, 0.1, 1.0).unwrap(),
            exact_family(FamilyKind::Quartic, 0.05, 2.0).unwrap(),
            exact_family(FamilyKind::Saddle, 0.05, 1.0).unwrap(),
            exact_family(FamilyKind::Saddle, 0.2, 0.5).unwrap(),
        ];
        for m in &maps {
            let exact = map_area(m).unwrap();
            let poly = trace_boundary(m, 4096).unwrap().area();
            assert!(
                (exact - poly).abs() <= 1e-6 * exact.abs(),
                "area mismatch: formula {exact}, shoelace {poly}"
            );
        }
        let kuf = kufarev_solve(3.0, 1.0, 0.5, 1.0, 0.0).unwrap();
        let poly = trace_boundary(&kuf, 4096).unwrap().area();
        let exact = kuf.enclosed_area();
        assert!((exact - poly).abs() <= 1e-6 * exact);
    }

    #[test]
    fn unit_disk_and_ellipse_areas() {
        let disk = LaurentMap::new(1.0, vec![]).unwrap();
        assert!((map_area(&disk).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        let ell = LaurentMap::new(1.5, vec![re(0.0), re(0.5)]).unwrap();
        assert!((map_area(&ell).unwrap() - std::f64::consts::TAU).abs() < 1e-15);
        let slit = LaurentMap::new(1.0, vec![re(0.0), re(1.0)]).unwrap();
        assert!(map_area(&slit).is_err());
    }

    #[test]
    fn quartic_family_coefficients() {
        let m = exact_family(FamilyKind::Quartic, 0.1, 1.0).unwrap();
        assert_eq!(m.residue, 0.1);
        assert!((m.coeffs[1].re - 0.1 / 1.06).abs() < 1e-15);
        assert!((m.coeffs[1].re - 0.0943396).abs() < 1e-7);
        assert!((m.coeffs[3].re + 0.002).abs() < 1e-15);
        let area = map_area(&m).unwrap();
        assert!((area - 0.003418).abs() < 1e-5);

        // beta = 0 collapses to the slit
        assert!(exact_family(FamilyKind::Quartic, 0.1, 0.0).is_err());
    }

    #[test]
    fn saddle_family_structure() {
        for (a, beta) in [(0.05, 1.0), (0.2, 0.5), (0.1, 2.0)] {
            let m = exact_family(FamilyKind::Saddle, a, beta).unwrap();
            // built-in cusp: f'(-1) = 0
            let d = m.derivative(re(-1.0));
            assert!(d.norm() < 1e-12, "f'(-1) = {d}");
            // 2B - C = 0 with B = a2, C = a1 - A
            let two_b_minus_c = 2.0 * m.coeffs[2].re - (m.coeffs[1].re - m.residue);
            assert!(two_b_minus_c.abs() < 1e-15);
        }
        // univalent iff 4 beta A < 1
        assert!(exact_family(FamilyKind::Saddle, 0.3, 1.0).is_err());
    }
}
