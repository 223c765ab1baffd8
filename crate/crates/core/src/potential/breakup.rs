use super::critical::{find_critical_points, CriticalKind};
use super::eval::eval_potential;
use crate::error::{Error, Result};
use crate::geometry::curve::hausdorff_distance;
use crate::geometry::point::Rect;
use crate::geometry::{BoundaryCurve, BubbleSystem, Point};
use serde::Serialize;
use std::f64::consts::PI;

/// Verdict of a sufficient breakup criterion: the criteria prove breakup
/// when they fire, and say nothing when they do not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BreakupVerdict {
    Breaks,
    NoConclusion,
}

/// Declared symmetry of a system for breakup prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    None,
    /// Invariance under 180-degree rotation about the point.
    Central(Point),
    /// Invariance under reflection across the line through `point` with
    /// direction `angle` (radians from the x-axis).
    Axial { point: Point, angle: f64 },
}

const QUAD_START: usize = 4096;
const QUAD_CAP: usize = 1 << 20;
const QUAD_TOL: f64 = 1e-8;

/// The breakup functional for an axis-symmetric profile: with the upper
/// boundary y = sqrt(f(x)) on [-b, b],
///
///   I = integral over (0, b] of d(x sqrt(f(x))) / (x^2 + f(x)),
///
/// computed as a midpoint Stieltjes sum with interval doubling until two
/// refinements agree. Verdict is `Breaks` when I > pi/2.
pub fn breakup_integral(f: impl Fn(f64) -> f64, b: f64) -> Result<(f64, BreakupVerdict)> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::validation(format!("profile half-width {b} must be positive")));
    }
    let fscale = f(0.0).abs().max(1e-300);
    let checked = |x: f64| -> Result<f64> {
        let v = f(x);
        if !v.is_finite() {
            return Err(Error::validation(format!("non-finite profile sample at x = {x}")));
        }
        if v < -1e-12 * fscale {
            return Err(Error::validation(format!(
                "negative profile sample f({x}) = {v}"
            )));
        }
        Ok(v.max(0.0))
    };
    let end = checked(b)?;
    if end > 1e-6 * fscale {
        return Err(Error::validation(format!(
            "profile must vanish at the endpoint: f({b}) = {end}"
        )));
    }
    let sum_n = |n: usize| -> Result<f64> {
        let dx = b / n as f64;
        let mut total = 0.0;
        let mut gprev = 0.0;
        for k in 0..n {
            let x1 = b * (k + 1) as f64 / n as f64;
            let xm = b * (k as f64 + 0.5) / n as f64;
            let fm = checked(xm)?;
            let g1 = x1 * checked(x1)?.sqrt();
            total += (g1 - gprev) / (xm * xm + fm);
            gprev = g1;
        }
        let _ = dx;
        Ok(total)
    };
    let mut n = QUAD_START;
    let mut prev = sum_n(n)?;
    let value = loop {
        n *= 2;
        let cur = sum_n(n)?;
        if (cur - prev).abs() < QUAD_TOL || n >= QUAD_CAP {
            break cur;
        }
        prev = cur;
    };
    let verdict = if value > PI / 2.0 {
        BreakupVerdict::Breaks
    } else {
        BreakupVerdict::NoConclusion
    };
    Ok((value, verdict))
}

fn reflect_x(c: &BoundaryCurve) -> BoundaryCurve {
    // reflection flips orientation; reverse to restore ccw
    c.transformed(|p| Point { x: p.x, y: -p.y }).reversed()
}

fn reflect_line(c: &BoundaryCurve, p0: Point, angle: f64) -> BoundaryCurve {
    c.transformed(|p| {
        let q = (p - p0).rotated(-angle);
        p0 + Point { x: q.x, y: -q.y }.rotated(angle)
    })
    .reversed()
}

fn rotate_pi(c: &BoundaryCurve, center: Point) -> BoundaryCurve {
    // a rotation keeps the orientation
    c.transformed(|p| center * 2.0 - p)
}

/// Largest mismatch between the system and its image under `map`: for each
/// bubble, the Hausdorff distance to the best-matching image curve.
fn symmetry_defect(system: &BubbleSystem, map: impl Fn(&BoundaryCurve) -> BoundaryCurve) -> f64 {
    let images: Vec<BoundaryCurve> = system.bubbles.iter().map(|b| map(&b.curve)).collect();
    let mut worst = 0.0f64;
    for b in &system.bubbles {
        let best = images
            .iter()
            .map(|im| hausdorff_distance(&b.curve, im))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
    }
    worst
}

fn system_diameter(system: &BubbleSystem) -> f64 {
    let mut lo = Point {
        x: f64::INFINITY,
        y: f64::INFINITY,
    };
    let mut hi = Point {
        x: f64::NEG_INFINITY,
        y: f64::NEG_INFINITY,
    };
    for b in &system.bubbles {
        let (l, h) = b.curve.bbox();
        lo.x = lo.x.min(l.x);
        lo.y = lo.y.min(l.y);
        hi.x = hi.x.max(h.x);
        hi.y = hi.y.max(h.y);
    }
    (hi - lo).norm()
}

fn system_bbox(system: &BubbleSystem) -> Rect {
    let mut lo = Point {
        x: f64::INFINITY,
        y: f64::INFINITY,
    };
    let mut hi = Point {
        x: f64::NEG_INFINITY,
        y: f64::NEG_INFINITY,
    };
    for b in &system.bubbles {
        let (l, h) = b.curve.bbox();
        lo.x = lo.x.min(l.x);
        lo.y = lo.y.min(l.y);
        hi.x = hi.x.max(h.x);
        hi.y = hi.y.max(h.y);
    }
    Rect::new(lo, hi)
}

const SYMMETRY_REL_TOL: f64 = 1e-6;

/// Number of local extrema of x -> Pi(x, 0) across the system, for systems
/// mirror-symmetric about the x-axis. Small wiggles below a prominence
/// threshold are smoothed away; samples blocked by the near-boundary guard
/// are skipped (the potential is continuous across the boundary).
pub fn axis_extrema_count(system: &BubbleSystem) -> Result<usize> {
    let diam = system_diameter(system);
    let defect = symmetry_defect(system, reflect_x);
    if defect > SYMMETRY_REL_TOL * diam {
        return Err(Error::validation(format!(
            "system is not symmetric about the x-axis (defect {defect:.3e} vs diameter {diam:.3e})"
        )));
    }
    let bb = system_bbox(system);
    let pad = 0.05 * bb.width().max(1e-12);
    let (x0, x1) = (bb.lo.x - pad, bb.hi.x + pad);
    let m = 2001usize;
    let mut vals: Vec<f64> = Vec::with_capacity(m);
    for i in 0..m {
        let x = x0 + (x1 - x0) * i as f64 / (m - 1) as f64;
        if let Ok(p) = eval_potential(system, Point { x, y: 0.0 }) {
            vals.push(p.value);
        }
    }
    if vals.len() < 3 {
        return Err(Error::numerical("axis scan produced too few usable samples"));
    }
    let (vmin, vmax) = vals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let eps = (1e-9 * (vmax - vmin)).max(1e-14);
    let mut count = 0usize;
    let mut dir = 0i8;
    let mut anchor = vals[0];
    for &v in &vals[1..] {
        match dir {
            0 => {
                if (v - anchor).abs() > eps {
                    dir = if v > anchor { 1 } else { -1 };
                    anchor = v;
                }
            }
            1 => {
                if v > anchor {
                    anchor = v;
                } else if anchor - v > eps {
                    count += 1;
                    dir = -1;
                    anchor = v;
                }
            }
            _ => {
                if v < anchor {
                    anchor = v;
                } else if v - anchor > eps {
                    count += 1;
                    dir = 1;
                    anchor = v;
                }
            }
        }
    }
    Ok(count)
}

/// Sufficient breakup test from symmetry: fires when a global minimum of
/// the potential sits off the declared symmetry point or line, or when an
/// axially symmetric system has more than one extremum along its axis.
pub fn predict_breakup(system: &BubbleSystem, symmetry: Symmetry) -> Result<BreakupVerdict> {
    let diam = system_diameter(system);
    let tol = SYMMETRY_REL_TOL * diam;
    match symmetry {
        Symmetry::None => {}
        Symmetry::Central(p) => {
            let defect = symmetry_defect(system, |c| rotate_pi(c, p));
            if defect > tol {
                return Err(Error::validation(format!(
                    "declared central symmetry violated (defect {defect:.3e})"
                )));
            }
        }
        Symmetry::Axial { point, angle } => {
            let defect = symmetry_defect(system, |c| reflect_line(c, point, angle));
            if defect > tol {
                return Err(Error::validation(format!(
                    "declared axial symmetry violated (defect {defect:.3e})"
                )));
            }
        }
    }

    let box_ = system_bbox(system).expanded(0.05 * diam);
    let search = find_critical_points(system, box_)?;
    let postol = 1e-3 * system.total_area().sqrt();
    let off_symmetry = |loc: Point| -> bool {
        match symmetry {
            Symmetry::None => false,
            Symmetry::Central(p) => loc.dist(p) > postol,
            Symmetry::Axial { point, angle } => {
                let d = (loc - point).rotated(-angle);
                d.y.abs() > postol
            }
        }
    };
    let fires = search
        .points
        .iter()
        .any(|c| c.is_global_min && off_symmetry(c.location));
    if fires {
        return Ok(BreakupVerdict::Breaks);
    }
    if let Symmetry::Axial { point, angle } = symmetry {
        // count extrema in the frame where the axis is the x-axis
        let rotated = BubbleSystem {
            bubbles: system
                .bubbles
                .iter()
                .map(|b| crate::geometry::Bubble {
                    label: b.label,
                    curve: b.curve.transformed(|p| (p - point).rotated(-angle)),
                })
                .collect(),
            time: system.time,
        };
        if axis_extrema_count(&rotated)? > 1 {
            return Ok(BreakupVerdict::Breaks);
        }
    }
    // minima on the symmetry locus prove nothing: the criteria are
    // sufficient, not necessary
    Ok(BreakupVerdict::NoConclusion)
}

/// Classification helper shared by reports: true when the search found at
/// least one global minimum strictly inside a bubble.
pub fn has_interior_global_min(system: &BubbleSystem, box_: Rect) -> Result<bool> {
    let search = find_critical_points(system, box_)?;
    Ok(search
        .points
        .iter()
        .any(|c| c.is_global_min && c.kind == CriticalKind::Minimum && system.contains(c.location)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{disk_curve, ellipse_curve, pt};

    fn dumbbell_curve(c: f64, n: usize) -> BoundaryCurve {
        let half = |x: f64| ((c + x * x) * (1.0 - x * x)).max(0.0).sqrt();
        let mut pts = Vec::with_capacity(2 * n);
        for k in 0..n {
            let x = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            pts.push(pt(x, half(x)));
        }
        for k in 0..n {
            let x = -1.0 + 2.0 * (k as f64 + 0.5) / n as f64;
            pts.push(pt(x, -half(x)));
        }
        BoundaryCurve::new(pts).unwrap()
    }

    #[test]
    fn disk_profile_integral_vanishes() {
        let (i, v) = breakup_integral(|x| 1.0 - x * x, 1.0).unwrap();
        assert!(i.abs() < 1e-7, "I = {i}");
        assert_eq!(v, BreakupVerdict::NoConclusion);
    }

    #[test]
    fn ellipse_profile_integral_closed_form() {
        for &(a, b) in &[(2.0f64, 1.0f64), (3.0, 1.0), (5.0, 2.0)] {
            let (i, _) = breakup_integral(|x| b * b * (1.0 - x * x / (a * a)), a).unwrap();
            let expect = PI * (a - b) / (2.0 * (a + b));
            assert!((i - expect).abs() < 1e-5, "a={a} b={b}: {i} vs {expect}");
        }
    }

    #[test]
    fn dumbbell_profile_integrals() {
        let (i, v) = breakup_integral(|x| (0.01 + x * x) * (1.0 - x * x), 1.0).unwrap();
        assert!((i - 2.1248195240).abs() < 1e-6, "I = {i}");
        assert_eq!(v, BreakupVerdict::Breaks);

        let (i, v) = breakup_integral(|x| (0.05 + x * x) * (1.0 - x * x), 1.0).unwrap();
        assert!((i - 1.3372295590).abs() < 1e-6, "I = {i}");
        assert_eq!(v, BreakupVerdict::NoConclusion);
    }

    #[test]
    fn negative_profile_rejected() {
        assert!(breakup_integral(|x| 0.5 - x, 1.0).is_err());
    }

    #[test]
    fn axis_extrema_counts() {
        let disk = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 400)]).unwrap();
        assert_eq!(axis_extrema_count(&disk).unwrap(), 1);

        let two = BubbleSystem::new(vec![
            disk_curve(pt(0.0, 0.0), 1.0, 400),
            disk_curve(pt(4.0, 0.0), 1.0, 400),
        ])
        .unwrap();
        assert_eq!(axis_extrema_count(&two).unwrap(), 3);

        let dumb = BubbleSystem::new(vec![dumbbell_curve(0.01, 400)]).unwrap();
        assert!(axis_extrema_count(&dumb).unwrap() >= 3);
    }

    #[test]
    fn asymmetric_input_rejected() {
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.7), 1.0, 256)]).unwrap();
        assert!(axis_extrema_count(&sys).is_err());
    }

    #[test]
    fn predictions() {
        let two = BubbleSystem::new(vec![
            disk_curve(pt(0.0, 0.0), 1.0, 400),
            disk_curve(pt(4.0, 0.0), 1.0, 400),
        ])
        .unwrap();
        assert_eq!(
            predict_breakup(&two, Symmetry::Central(pt(2.0, 0.0))).unwrap(),
            BreakupVerdict::Breaks
        );

        let disk = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 400)]).unwrap();
        assert_eq!(
            predict_breakup(&disk, Symmetry::Central(pt(0.0, 0.0))).unwrap(),
            BreakupVerdict::NoConclusion
        );

        let ell = BubbleSystem::new(vec![ellipse_curve(pt(0.0, 0.0), 2.0, 1.0, 600)]).unwrap();
        assert_eq!(
            predict_breakup(
                &ell,
                Symmetry::Axial {
                    point: pt(0.0, 0.0),
                    angle: 0.0
                }
            )
            .unwrap(),
            BreakupVerdict::NoConclusion
        );

        let dumb = BubbleSystem::new(vec![dumbbell_curve(0.01, 400)]).unwrap();
        assert_eq!(
            predict_breakup(
                &dumb,
                Symmetry::Axial {
                    point: pt(0.0, 0.0),
                    angle: 0.0
                }
            )
            .unwrap(),
            BreakupVerdict::Breaks
        );

        // declared symmetry must actually hold
        assert!(predict_breakup(&two, Symmetry::Central(pt(1.0, 0.0))).is_err());
    }
}
