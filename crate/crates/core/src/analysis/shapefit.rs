use std::f64::consts::PI;

use crate::analysis::report::FitReport;
use crate::error::{Error, Result};
use crate::evolution::Trajectory;
use crate::geometry::{
    normalize_for_asymptotics, normalize_for_saddle, point_segment_distance, BoundaryCurve, Point,
};
use crate::conformal::{limit_curve, saddle_node_curve};
use crate::potential::SymMat2;

pub const FIT_SAMPLES: usize = 256;

/// Symmetric sup distance between two closed curves, measured on 256
/// uniformly resampled points of each against the segments of the other.
pub fn sup_distance(a: &BoundaryCurve, b: &BoundaryCurve) -> f64 {
    one_sided(&a.trig_resample(FIT_SAMPLES), b).max(one_sided(&b.trig_resample(FIT_SAMPLES), a))
}

fn one_sided(from: &BoundaryCurve, to: &BoundaryCurve) -> f64 {
    let mut worst: f64 = 0.0;
    for &p in from.points() {
        let mut best = f64::INFINITY;
        let n = to.len();
        for j in 0..n {
            let d = point_segment_distance(p, to.vertex(j), to.vertex((j + 1) % n));
            if d < best {
                best = d;
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Area, centroid, and central second moments of a polygon region.
fn region_moments(curve: &BoundaryCurve) -> (f64, Point, SymMat2) {
    let pts = curve.points();
    let n = pts.len();
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    let (mut ixx, mut ixy, mut iyy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = p.x * q.y - q.x * p.y;
        a2 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
        ixx += (p.x * p.x + p.x * q.x + q.x * q.x) * w;
        iyy += (p.y * p.y + p.y * q.y + q.y * q.y) * w;
        ixy += (p.x * q.y + 2.0 * p.x * p.y + 2.0 * q.x * q.y + q.x * p.y) * w;
    }
    let area = 0.5 * a2;
    let c = Point {
        x: cx / (6.0 * area),
        y: cy / (6.0 * area),
    };
    let m = SymMat2 {
        xx: ixx / 12.0 - area * c.x * c.x,
        xy: ixy / 24.0 - area * c.x * c.y,
        yy: iyy / 12.0 - area * c.y * c.y,
    };
    (area, c, m)
}

struct MomentEllipse {
    center: Point,
    /// Unit direction of the long axis.
    major_axis: Point,
    /// Half axes, major first.
    half_axes: (f64, f64),
}

/// Equivalent ellipse of a region: same area, centroid, and second moments.
/// Exact when the region is an ellipse.
fn moment_ellipse(curve: &BoundaryCurve) -> Result<MomentEllipse> {
    let (area, c, m) = region_moments(curve);
    if !(area > 0.0) {
        return Err(Error::numerical("moment ellipse of a degenerate region"));
    }
    let (lo, hi) = m.eigenvalues();
    if !(lo > 0.0) {
        return Err(Error::numerical("region has collapsed to a segment"));
    }
    // for an ellipse, the principal second moment is area * halfaxis^2 / 4
    let major = 2.0 * (hi / area).sqrt();
    let minor = 2.0 * (lo / area).sqrt();
    // eigenvector of the larger moment
    let axis = eigvec(&m, hi);
    Ok(MomentEllipse {
        center: c,
        major_axis: axis,
        half_axes: (major, minor),
    })
}

fn eigvec(m: &SymMat2, lambda: f64) -> Point {
    // (m - lambda I) v = 0; pick the better-conditioned row
    let r1 = Point {
        x: m.xx - lambda,
        y: m.xy,
    };
    let r2 = Point {
        x: m.xy,
        y: m.yy - lambda,
    };
    let v = if r1.norm() > r2.norm() {
        Point { x: -r1.y, y: r1.x }
    } else {
        Point { x: -r2.y, y: r2.x }
    };
    let n = v.norm();
    if n == 0.0 {
        Point { x: 1.0, y: 0.0 }
    } else {
        v * (1.0 / n)
    }
}

fn ellipse_polygon(e: &MomentEllipse, samples: usize) -> Result<BoundaryCurve> {
    let u = e.major_axis;
    let v = Point { x: -u.y, y: u.x };
    let pts = (0..samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / samples as f64;
            e.center + u * (e.half_axes.0 * t.cos()) + v * (e.half_axes.1 * t.sin())
        })
        .collect();
    BoundaryCurve::new_fast(pts)
}

/// Bubble in `sys` whose centroid lies nearest `point`, if any.
fn nearest_bubble(sys: &crate::geometry::BubbleSystem, point: Point) -> Option<&BoundaryCurve> {
    sys.bubbles
        .iter()
        .map(|b| &b.curve)
        .min_by(|a, b| {
            let da = a.centroid().dist(point);
            let db = b.centroid().dist(point);
            da.partial_cmp(&db).unwrap()
        })
}

/// Check that a bubble contracting toward a nondegenerate minimum becomes
/// elliptical, with axes set by the Hessian of the potential there: the long
/// axis lies along the eigenvector of the small eigenvalue and the half-axis
/// ratio approaches the inverse eigenvalue ratio.
pub fn fit_ellipse_asymptotics(
    traj: &Trajectory,
    point: Point,
    hessian: SymMat2,
) -> Result<FitReport> {
    let (l_lo, l_hi) = hessian.eigenvalues();
    if !(l_lo > 0.0) || l_lo / l_hi < 1e-3 {
        return Err(Error::validation(
            "Hessian is not a nondegenerate minimum; elliptical asymptotics do not apply",
        ));
    }
    let expected_ratio = l_hi / l_lo; // long over short
    let expected_axis = eigvec(&hessian, l_lo); // soft direction stays long

    let mut history = Vec::new();
    let mut last_fit: Option<MomentEllipse> = None;
    let take = 8usize;
    let picked: Vec<_> = traj
        .snapshots
        .iter()
        .filter(|s| nearest_bubble(s, point).map_or(false, |c| c.centroid().dist(point) < c.diameter()))
        .collect();
    if picked.len() < 3 {
        return Err(Error::validation(
            "too few snapshots near the contraction point for an asymptotic fit",
        ));
    }
    for snap in picked.iter().rev().take(take).rev() {
        let curve = nearest_bubble(snap, point).unwrap();
        // rescale to diameter 2 so residuals are comparable across snapshots
        let d = curve.diameter();
        let c = curve.centroid();
        let rescaled = curve.transformed(|p| (p - c) * (2.0 / d));
        let fit = moment_ellipse(&rescaled)?;
        let residual = sup_distance(&rescaled, &ellipse_polygon(&fit, FIT_SAMPLES)?);
        history.push((snap.time, residual));
        last_fit = Some(fit);
    }
    let fit = last_fit.unwrap();
    let ratio = fit.half_axes.0 / fit.half_axes.1;
    let angle = {
        let dot = (fit.major_axis.x * expected_axis.x + fit.major_axis.y * expected_axis.y).abs();
        dot.clamp(0.0, 1.0).acos().to_degrees()
    };
    let ratio_err = (ratio / expected_ratio - 1.0).abs();
    let first = history.first().unwrap().1;
    let last = history.last().unwrap().1;
    let decreasing = last <= first + 0.01;
    let verdict = angle < 5.0 && ratio_err < 0.05 && decreasing;
    Ok(FitReport {
        model: "contracting ellipse".into(),
        parameters: vec![
            ("axis_ratio".into(), ratio),
            ("expected_axis_ratio".into(), expected_ratio),
            ("axis_angle_deg".into(), angle),
            ("final_residual".into(), last),
        ],
        residual_history: history,
        verdict,
    })
}

fn fit_against_reference(
    traj: &Trajectory,
    reference: &BoundaryCurve,
    normalize: impl Fn(&BoundaryCurve) -> Result<BoundaryCurve>,
    model: &str,
) -> Result<FitReport> {
    let usable: Vec<_> = traj
        .snapshots
        .iter()
        .filter(|s| s.bubbles.len() == 1)
        .collect();
    if usable.len() < 3 {
        return Err(Error::validation(
            "need at least three single-bubble snapshots for a limit-curve fit",
        ));
    }
    let mut history = Vec::new();
    for snap in &usable {
        let normalized = normalize(&snap.bubbles[0].curve)?;
        history.push((snap.time, sup_distance(&normalized, reference)));
    }
    let last = history.last().unwrap().1;
    // monotone within a small slack against resampling noise
    let slack = 0.005;
    let decreasing = history.windows(2).all(|w| w[1].1 <= w[0].1 + slack);
    let verdict = last < 0.05 && decreasing;
    Ok(FitReport {
        model: model.into(),
        parameters: vec![("final_sup_distance".into(), last)],
        residual_history: history,
        verdict,
    })
}

/// Compare the normalized late-time boundaries of a degenerate contraction
/// against the universal limit curve of degree `n`. The verdict passes when
/// the final sup distance is below 0.05 and the history is non-increasing.
pub fn fit_limit_curve(traj: &Trajectory, n: u32, beta: f64, alpha: f64) -> Result<FitReport> {
    let reference = limit_curve(n, beta, alpha, FIT_SAMPLES)?;
    fit_against_reference(
        traj,
        &reference,
        |c| normalize_for_asymptotics(c, n, alpha),
        &format!("degenerate limit curve n = {n}"),
    )
}

/// Same comparison for the saddle-node contraction and its one-sided limit
/// curve with a 3/2 cusp.
pub fn fit_limit_curve_saddle(traj: &Trajectory, beta: f64) -> Result<FitReport> {
    let reference = saddle_node_curve(beta, FIT_SAMPLES)?;
    fit_against_reference(traj, &reference, normalize_for_saddle, "saddle-node limit curve")
}
