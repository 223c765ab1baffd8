use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::point::{point_segment_distance, segments_intersect, pt, Point};
use crate::error::{Error, Result};
use crate::numeric::trig_resample_complex;

/// Closed boundary polyline, counterclockwise, simple.
///
/// Vertices are the polygon corners; the closing edge from the last vertex
/// back to the first is implicit. All quadrature downstream treats edges as
/// straight segments, which keeps the log-kernel integrals closed-form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryCurve {
    points: Vec<Point>,
}

pub fn signed_area(points: &[Point]) -> f64 {
    let n = points.len();
    let mut s = 0.0;
    for i in 0..n {
        s += points[i].cross(points[(i + 1) % n]);
    }
    0.5 * s
}

impl BoundaryCurve {
    /// Full validation: vertex count, distinct consecutive vertices,
    /// counterclockwise orientation, simplicity.
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let c = Self::unchecked(points);
        c.validate(true)?;
        Ok(c)
    }

    /// Cheap validation only (no O(n^2) simplicity scan). Used on hot paths
    /// where the caller enforces non-self-intersection by other means.
    pub fn new_fast(points: Vec<Point>) -> Result<Self> {
        let c = Self::unchecked(points);
        c.validate(false)?;
        Ok(c)
    }

    pub fn unchecked(points: Vec<Point>) -> Self {
        BoundaryCurve { points }
    }

    pub fn validate(&self, check_simple: bool) -> Result<()> {
        let p = &self.points;
        if p.len() < 8 {
            return Err(Error::validation(format!(
                "boundary curve needs at least 8 vertices, got {}",
                p.len()
            )));
        }
        if p.iter().any(|q| !q.is_finite()) {
            return Err(Error::validation("non-finite vertex"));
        }
        let n = p.len();
        for i in 0..n {
            if p[i].dist(p[(i + 1) % n]) == 0.0 {
                return Err(Error::validation(format!(
                    "repeated consecutive vertex at index {i}"
                )));
            }
        }
        let a = signed_area(p);
        if a <= 0.0 {
            return Err(Error::validation(format!(
                "orientation error: signed area {a:.6e} (need counterclockwise, area > 0)"
            )));
        }
        if check_simple && !self.is_simple() {
            return Err(Error::validation("self-intersecting boundary"));
        }
        Ok(())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.points[i.rem_euclid(self.points.len())]
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.points)
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|i| self.points[i].dist(self.points[(i + 1) % n]))
            .sum()
    }

    pub fn mean_spacing(&self) -> f64 {
        self.perimeter() / self.points.len() as f64
    }

    /// Area centroid of the enclosed region.
    pub fn centroid(&self) -> Point {
        let n = self.points.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut a = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let q = self.points[(i + 1) % n];
            let w = p.cross(q);
            a += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        a *= 0.5;
        pt(cx / (6.0 * a), cy / (6.0 * a))
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = pt(f64::INFINITY, f64::INFINITY);
        let mut hi = pt(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Convex hull (Andrew monotone chain), counterclockwise.
    pub fn convex_hull(&self) -> Vec<Point> {
        let mut pts = self.points.clone();
        pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
        pts.dedup_by(|a, b| a == b);
        if pts.len() < 3 {
            return pts;
        }
        let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
        for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
            while hull.len() >= 2 {
                let m = hull.len();
                if (hull[m - 1] - hull[m - 2]).cross(p - hull[m - 1]) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
        hull
    }

    /// Exact diameter of the vertex set (max pairwise distance over hull vertices).
    pub fn diameter(&self) -> f64 {
        let hull = self.convex_hull();
        let m = hull.len();
        if m < 2 {
            return 0.0;
        }
        let mut best = 0.0f64;
        for i in 0..m {
            for j in i + 1..m {
                best = best.max(hull[i].dist(hull[j]));
            }
        }
        best
    }

    /// Point-in-region test by ray crossing parity. Boundary points are not
    /// reliable either way.
    pub fn contains(&self, p: Point) -> bool {
        let n = self.points.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[j];
            if (a.y > p.y) != (b.y > p.y) {
                let x_cross = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        let n = self.points.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            best = best.min(point_segment_distance(
                p,
                self.points[i],
                self.points[(i + 1) % n],
            ));
        }
        best
    }

    pub fn nearest_vertex(&self, p: Point) -> usize {
        let mut best = 0;
        let mut bd = f64::INFINITY;
        for (i, q) in self.points.iter().enumerate() {
            let d = q.dist(p);
            if d < bd {
                bd = d;
                best = i;
            }
        }
        best
    }

    /// O(n^2) simplicity scan over non-adjacent segment pairs.
    pub fn is_simple(&self) -> bool {
        let n = self.points.len();
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            for j in i + 1..n {
                // skip adjacent segments (shared endpoint)
                if j == i || (j + 1) % n == i || (i + 1) % n == j {
                    continue;
                }
                let c = self.points[j];
                let d = self.points[(j + 1) % n];
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }

    /// Cumulative arc length at each vertex; last entry is the perimeter.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let n = self.points.len();
        let mut s = Vec::with_capacity(n + 1);
        s.push(0.0);
        for i in 0..n {
            let d = self.points[i].dist(self.points[(i + 1) % n]);
            s.push(s[i] + d);
        }
        s
    }

    /// Signed discrete curvature at each vertex (positive convex for a
    /// counterclockwise curve): circumscribed-circle formula on the vertex
    /// and its two neighbors.
    pub fn curvature(&self) -> Vec<f64> {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let a = self.points[(i + n - 1) % n];
                let b = self.points[i];
                let c = self.points[(i + 1) % n];
                let ab = b - a;
                let bc = c - b;
                let ac = c - a;
                let denom = ab.norm() * bc.norm() * ac.norm();
                if denom == 0.0 {
                    0.0
                } else {
                    2.0 * ab.cross(bc) / denom
                }
            })
            .collect()
    }

    /// Unit tangent at each vertex (central difference).
    pub fn vertex_tangents(&self) -> Vec<Point> {
        let n = self.points.len();
        (0..n)
            .map(|i| (self.points[(i + 1) % n] - self.points[(i + n - 1) % n]).normalized())
            .collect()
    }

    /// Outward unit normal at each vertex. For a counterclockwise curve the
    /// interior is left of the tangent, so outward is the tangent rotated -90.
    pub fn vertex_normals(&self) -> Vec<Point> {
        self.vertex_tangents()
            .into_iter()
            .map(|t| pt(t.y, -t.x))
            .collect()
    }

    pub fn translated(&self, d: Point) -> BoundaryCurve {
        BoundaryCurve::unchecked(self.points.iter().map(|&p| p + d).collect())
    }

    pub fn transformed(&self, f: impl Fn(Point) -> Point) -> BoundaryCurve {
        BoundaryCurve::unchecked(self.points.iter().map(|&p| f(p)).collect())
    }

    pub fn reversed(&self) -> BoundaryCurve {
        let mut p = self.points.clone();
        p.reverse();
        BoundaryCurve::unchecked(p)
    }

    /// Arc-length-uniform resampling through a centripetal Catmull-Rom
    /// interpolant of the existing vertices. Interpolation (rather than chord
    /// subdivision) keeps repeated resampling from eroding convex shapes.
    pub fn resample(&self, spacing: f64) -> Result<BoundaryCurve> {
        let perim = self.perimeter();
        if spacing <= 0.0 {
            return Err(Error::validation("resample spacing must be positive"));
        }
        if spacing > perim / 8.0 {
            return Err(Error::validation(format!(
                "resample spacing {spacing:.4e} too coarse for perimeter {perim:.4e} (need <= perimeter/8)"
            )));
        }
        let m = (perim / spacing).round().max(8.0) as usize;
        let arcs = self.arc_lengths();
        let n = self.points.len();
        let mut out = Vec::with_capacity(m);
        let mut seg = 0usize;
        for k in 0..m {
            let s = perim * k as f64 / m as f64;
            while seg + 1 < n && arcs[seg + 1] <= s {
                seg += 1;
            }
            let ds = arcs[seg + 1] - arcs[seg];
            let u = if ds > 0.0 { (s - arcs[seg]) / ds } else { 0.0 };
            out.push(self.catmull_rom(seg, u));
        }
        // rescale about the centroid so the polygon area survives the change
        // of vertex count (an inscribed polygon loses area as it coarsens)
        let new_area = signed_area(&out);
        if new_area > 0.0 {
            let scale = (self.area() / new_area).sqrt();
            let c = out.iter().fold(Point::default(), |s, &p| s + p) / out.len() as f64;
            for p in &mut out {
                *p = c + (*p - c) * scale;
            }
        }
        BoundaryCurve::new_fast(out)
    }

    /// Centripetal Catmull-Rom evaluation on the span [points[i], points[i+1]]
    /// at chord-proportional parameter u in [0, 1].
    fn catmull_rom(&self, i: usize, u: f64) -> Point {
        let n = self.points.len();
        let p0 = self.points[(i + n - 1) % n];
        let p1 = self.points[i];
        let p2 = self.points[(i + 1) % n];
        let p3 = self.points[(i + 2) % n];
        // centripetal parametrization: knot increments by sqrt of chord length
        let t01 = p0.dist(p1).sqrt().max(1e-300);
        let t12 = p1.dist(p2).sqrt().max(1e-300);
        let t23 = p2.dist(p3).sqrt().max(1e-300);
        // tangents in Hermite form
        let m1 = (p2 - p1 + t12 * ((p1 - p0) / t01 - (p2 - p0) / (t01 + t12))) * 1.0;
        let m2 = (p2 - p1 + t12 * ((p3 - p2) / t23 - (p3 - p1) / (t12 + t23))) * 1.0;
        let u2 = u * u;
        let u3 = u2 * u;
        let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        let h10 = u3 - 2.0 * u2 + u;
        let h01 = -2.0 * u3 + 3.0 * u2;
        let h11 = u3 - u2;
        p1 * h00 + m1 * h10 + p2 * h01 + m2 * h11
    }

    /// Band-limited resampling to m vertices via the discrete Fourier
    /// transform of the vertex sequence. Spectrally accurate for smooth,
    /// near-uniformly sampled curves; used where quadrature convergence
    /// order matters (Richardson extrapolation).
    pub fn trig_resample(&self, m: usize) -> BoundaryCurve {
        let z: Vec<Complex64> = self
            .points
            .iter()
            .map(|p| Complex64::new(p.x, p.y))
            .collect();
        let w = trig_resample_complex(&z, m);
        BoundaryCurve::unchecked(w.into_iter().map(|v| pt(v.re, v.im)).collect())
    }

    /// Smallest gap between two non-adjacent boundary arcs: min distance from
    /// a vertex to a segment at least `min_arc_sep` away along the curve in
    /// both directions. Returns (distance, vertex index, segment index).
    pub fn min_self_gap(&self, min_arc_sep: f64) -> Option<(f64, usize, usize)> {
        let n = self.points.len();
        let arcs = self.arc_lengths();
        let perim = arcs[n];
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n {
            let p = self.points[i];
            for j in 0..n {
                // arc separation between vertex i and segment (j, j+1)
                let a1 = (arcs[i] - arcs[j]).rem_euclid(perim);
                let sep = a1.min(perim - a1);
                if sep < min_arc_sep {
                    continue;
                }
                let d = point_segment_distance(p, self.points[j], self.points[(j + 1) % n]);
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        best
    }
}

/// Symmetric Hausdorff distance between two closed polylines, measured
/// point-to-segment in both directions (equivalent to densifying vertices).
pub fn hausdorff_distance(a: &BoundaryCurve, b: &BoundaryCurve) -> f64 {
    fn one_sided(p: &BoundaryCurve, q: &BoundaryCurve) -> f64 {
        let qs = q.points();
        let n = qs.len();
        let mut worst = 0.0f64;
        for &v in p.points() {
            let mut best = f64::INFINITY;
            for i in 0..n {
                best = best.min(point_segment_distance(v, qs[i], qs[(i + 1) % n]));
                if best == 0.0 {
                    break;
                }
            }
            worst = worst.max(best);
        }
        worst
    }
    one_sided(a, b).max(one_sided(b, a))
}

/// Regular n-gon approximating the circle of radius r, with the radius
/// inflated so the polygon area equals pi r^2 exactly. The area correction
/// makes polygon potentials match the analytic disk to spectral accuracy.
pub fn disk_curve(center: Point, r: f64, n: usize) -> BoundaryCurve {
    let k = std::f64::consts::TAU / n as f64;
    let r_eff = r * (k / k.sin()).sqrt();
    BoundaryCurve::unchecked(
        (0..n)
            .map(|i| {
                let th = k * i as f64;
                center + pt(r_eff * th.cos(), r_eff * th.sin())
            })
            .collect(),
    )
}

/// Axis-aligned ellipse with semi-axes (a, b), area-corrected like disk_curve.
pub fn ellipse_curve(center: Point, a: f64, b: f64, n: usize) -> BoundaryCurve {
    let k = std::f64::consts::TAU / n as f64;
    let s = (k / k.sin()).sqrt();
    BoundaryCurve::unchecked(
        (0..n)
            .map(|i| {
                let th = k * i as f64;
                center + pt(s * a * th.cos(), s * b * th.sin())
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_polygon_area_closed_form() {
        // plain (uncorrected) regular 64-gon inscribed in the unit circle
        let n = 64;
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                pt(th.cos(), th.sin())
            })
            .collect();
        let c = BoundaryCurve::new(pts).unwrap();
        let expect = 32.0 * (std::f64::consts::PI / 32.0).sin();
        assert!((c.area() - expect).abs() < 1e-12);
    }

    #[test]
    fn ellipse_area_within_quadratic_error() {
        let c = ellipse_curve(pt(0.0, 0.0), 2.0, 1.0, 4096);
        assert!((c.area() - 2.0 * std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn clockwise_square_rejected() {
        let pts = vec![
            pt(0.0, 0.0),
            pt(0.0, 0.5),
            pt(0.0, 1.0),
            pt(0.5, 1.0),
            pt(1.0, 1.0),
            pt(1.0, 0.5),
            pt(1.0, 0.0),
            pt(0.5, 0.0),
        ];
        assert!((signed_area(&pts) + 1.0).abs() < 1e-15);
        let err = BoundaryCurve::new(pts).unwrap_err();
        assert!(err.to_string().contains("orientation"));
    }

    #[test]
    fn resample_uniformity_and_area() {
        let c = disk_curve(pt(0.3, -0.2), 1.0, 200);
        let r = c.resample(std::f64::consts::TAU / 100.0).unwrap();
        assert!((r.len() as i64 - 100).unsigned_abs() <= 2);
        let spacings: Vec<f64> = (0..r.len())
            .map(|i| r.vertex(i).dist(r.vertex(i + 1)))
            .collect();
        let target = std::f64::consts::TAU / 100.0;
        for s in spacings {
            assert!((s - target).abs() < 0.1 * target, "spacing {s} vs {target}");
        }
        assert!((r.area() - c.area()).abs() / c.area() < 1e-4);
    }

    #[test]
    fn resample_idempotent_within_tolerance() {
        let c = ellipse_curve(pt(0.0, 0.0), 1.5, 0.7, 300);
        let s = 0.02;
        let r1 = c.resample(s).unwrap();
        let r2 = r1.resample(s).unwrap();
        assert!(hausdorff_distance(&r1, &r2) < 1e-6);
    }

    #[test]
    fn resample_too_coarse_errors() {
        let c = disk_curve(pt(0.0, 0.0), 1.0, 64);
        assert!(c.resample(c.perimeter() / 4.0).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let a = disk_curve(pt(0.0, 0.0), 1.0, 512);
        assert_eq!(hausdorff_distance(&a, &a), 0.0);
        let b = disk_curve(pt(0.0, 0.0), 1.1, 512);
        assert!((hausdorff_distance(&a, &b) - 0.1).abs() < 1e-3);
        let c = a.translated(pt(0.3, 0.0));
        assert!((hausdorff_distance(&a, &c) - 0.3).abs() < 1e-3);
    }

    #[test]
    fn diameter_of_ellipse() {
        let c = ellipse_curve(pt(1.0, 2.0), 2.0, 1.0, 1024);
        assert!((c.diameter() - 4.0).abs() < 1e-4);
    }

    #[test]
    fn contains_and_distance() {
        let c = disk_curve(pt(0.0, 0.0), 1.0, 256);
        assert!(c.contains(pt(0.5, 0.3)));
        assert!(!c.contains(pt(1.5, 0.0)));
        assert!((c.distance_to_boundary(pt(0.0, 0.0)) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn normals_point_outward() {
        let c = disk_curve(pt(0.0, 0.0), 2.0, 128);
        let nv = c.vertex_normals();
        for (i, n) in nv.iter().enumerate() {
            let radial = c.vertex(i).normalized();
            assert!(n.dot(radial) > 0.99);
        }
    }
}
