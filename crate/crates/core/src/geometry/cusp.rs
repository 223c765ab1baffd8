use super::curve::BoundaryCurve;
use super::point::Point;
use crate::error::{Error, Result};
use crate::numeric::polyfit;

/// Result of a local power-law fit |y| ~ C x^p at a boundary point.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CuspFit {
    /// Fitted exponent p.
    pub exponent: f64,
    /// Tip position used for the fit (nearest vertex to the query).
    pub tip: Point,
    /// Unit axis pointing from the tip into the curve body.
    pub axis: Point,
    /// Scale-free sharpness: max |curvature| near the tip times the feature
    /// size sqrt(area/pi).
    pub sharpness: f64,
    /// True when sharpness exceeds the smoothness threshold.
    pub is_cusp: bool,
}

/// Sharpness above which a boundary point counts as a cusp rather than a
/// smooth extremum. A circle scores about 1 regardless of size.
pub const CUSP_SHARPNESS_THRESHOLD: f64 = 50.0;

/// Arc-length fit window around the tip, as fractions of the feature size
/// sqrt(area/pi). Chosen tight enough that higher-order terms of an
/// analytic 3/2-power tip (which follows a pure power law only locally) do
/// not bias the fitted exponent beyond the documented tolerance.
pub const CUSP_FIT_WINDOW: (f64, f64) = (0.02, 0.15);

/// Fit a power law to the boundary shape around `point`.
///
/// The tip is the nearest vertex; the local frame takes x along the axis
/// pointing into the curve (bisector of the two arms) and y transverse.
/// Points whose arc distance from the tip lies in the fit window enter a
/// log-log least-squares fit of |y| against x.
pub fn cusp_exponent(curve: &BoundaryCurve, point: Point) -> Result<CuspFit> {
    let spacing = curve.mean_spacing();
    let i0 = curve.nearest_vertex(point);
    let tip = curve.vertex(i0);
    if tip.dist(point) > 10.0 * spacing {
        return Err(Error::validation(format!(
            "query point ({:.4}, {:.4}) is {:.3e} from the boundary (spacing {:.3e})",
            point.x,
            point.y,
            tip.dist(point),
            spacing
        )));
    }
    let n = curve.len();
    let arcs = curve.arc_lengths();
    let perim = arcs[n];
    let feature = (curve.area().abs() / std::f64::consts::PI).sqrt();
    let (w_lo, w_hi) = (CUSP_FIT_WINDOW.0 * feature, CUSP_FIT_WINDOW.1 * feature);

    // axis: average direction from tip to the points a short arc away on
    // both sides (the arm bisector)
    let probe_arc = 0.5 * (w_lo + w_hi);
    let arc_of = |i: usize| arcs[i];
    let mut fwd = i0;
    while {
        let d = (arc_of(fwd) - arc_of(i0)).rem_euclid(perim);
        d < probe_arc
    } {
        fwd = (fwd + 1) % n;
        if fwd == i0 {
            break;
        }
    }
    let mut bwd = i0;
    while {
        let d = (arc_of(i0) - arc_of(bwd)).rem_euclid(perim);
        d < probe_arc
    } {
        bwd = (bwd + n - 1) % n;
        if bwd == i0 {
            break;
        }
    }
    let axis = ((curve.vertex(fwd) - tip).normalized() + (curve.vertex(bwd) - tip).normalized())
        .normalized();
    if axis.norm() == 0.0 {
        return Err(Error::numerical("degenerate cusp axis"));
    }

    // collect fit points by arc distance from the tip, both arms; if the
    // axial-offset filter starves the fit (smooth boundaries project
    // quadratically small onto the axis), retry keeping every x > 0
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for x_floor in [spacing * 0.5, 0.0] {
        lx.clear();
        ly.clear();
        for i in 0..n {
            let d1 = (arcs[i] - arcs[i0]).rem_euclid(perim);
            let d = d1.min(perim - d1);
            if d < w_lo || d > w_hi {
                continue;
            }
            let r = curve.vertex(i) - tip;
            let x = r.dot(axis);
            let y = r.cross(axis);
            if x > x_floor && y.abs() > 1e-14 {
                lx.push(x.ln());
                ly.push(y.abs().ln());
            }
        }
        if lx.len() >= 6 {
            break;
        }
    }
    if lx.len() < 6 {
        return Err(Error::numerical(format!(
            "cusp fit window holds only {} usable points",
            lx.len()
        )));
    }
    let coef = polyfit(&lx, &ly, 1)?;
    let exponent = coef[1];

    // sharpness near the tip: a few vertices on each side
    let curs = curve.curvature();
    let reach = ((w_lo / spacing).ceil() as usize).max(2);
    let mut kmax = 0.0f64;
    for off in 0..=reach.min(n / 2) {
        kmax = kmax.max(curs[(i0 + off) % n].abs());
        kmax = kmax.max(curs[(i0 + n - off) % n].abs());
    }
    let sharpness = kmax * feature;

    Ok(CuspFit {
        exponent,
        tip,
        axis,
        sharpness,
        is_cusp: sharpness > CUSP_SHARPNESS_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::curve::disk_curve;
    use crate::geometry::pt;

    /// Closed curve with arms y = +-x^p meeting at the origin, closed by a
    /// circular arc through (2, 0). Counterclockwise.
    fn power_tip_curve(p: f64, n: usize) -> BoundaryCurve {
        let mut pts = vec![pt(0.0, 0.0)];
        for k in 1..=n {
            let x = k as f64 / n as f64;
            pts.push(pt(x, -x.powf(p)));
        }
        let m = n / 2;
        for k in 1..m {
            let th = std::f64::consts::PI * (k as f64 / m as f64 - 0.5);
            pts.push(pt(1.0 + th.cos(), th.sin()));
        }
        for k in (1..=n).rev() {
            let x = k as f64 / n as f64;
            pts.push(pt(x, x.powf(p)));
        }
        BoundaryCurve::new_fast(pts).unwrap()
    }

    #[test]
    fn three_halves_power_recovered() {
        let c = power_tip_curve(1.5, 400);
        let fit = cusp_exponent(&c, pt(0.0, 0.0)).unwrap();
        assert!(
            (fit.exponent - 1.5).abs() < 0.1,
            "exponent {}",
            fit.exponent
        );
        assert!(fit.is_cusp, "sharpness {}", fit.sharpness);
    }

    #[test]
    fn five_halves_power_recovered() {
        let c = power_tip_curve(2.5, 400);
        let fit = cusp_exponent(&c, pt(0.0, 0.0)).unwrap();
        assert!(
            (fit.exponent - 2.5).abs() < 0.15,
            "exponent {}",
            fit.exponent
        );
    }

    #[test]
    fn circle_is_smooth() {
        let c = disk_curve(pt(0.0, 0.0), 1.0, 400);
        let fit = cusp_exponent(&c, pt(1.0, 0.0)).unwrap();
        assert!(!fit.is_cusp, "sharpness {}", fit.sharpness);
    }

    #[test]
    fn off_curve_point_rejected() {
        let c = disk_curve(pt(0.0, 0.0), 1.0, 400);
        assert!(cusp_exponent(&c, pt(3.0, 0.0)).is_err());
    }
}
