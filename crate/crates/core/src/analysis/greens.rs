use crate::error::{Error, Result};
use crate::evolution::{solve_field, FluxSpec};
use crate::geometry::{BoundaryCurve, BubbleSystem, Point};

/// Conformal position of an exterior point seen from a single bubble.
///
/// Mapping the complement of the domain onto the unit disk with infinity at
/// the origin sends `p2` to a radius b in (0, 1); that radius equals
/// exp(2 pi Phi(p2) / q) where Phi is the free suction field of the bubble
/// at rate q, so it falls out of one field solve. The panel discretization
/// error is O(1/N^2), which two solves at N and 2N eliminate by Richardson
/// extrapolation of log b.
///
/// The curve's vertices are treated as uniform-in-arclength samples of the
/// underlying smooth boundary (what the evolution module produces); the
/// trigonometric resample densifies that interpolant.
pub fn greens_ratio(domain: &BoundaryCurve, p2: Point) -> Result<f64> {
    domain.validate(false)?;
    if !p2.x.is_finite() || !p2.y.is_finite() {
        return Err(Error::validation("exterior point must be finite"));
    }
    if domain.contains(p2) {
        return Err(Error::validation(
            "reference point lies inside the domain",
        ));
    }
    let scale = domain.diameter();
    let mut near = f64::INFINITY;
    let pts = domain.points();
    for i in 0..pts.len() {
        let (cp, _) = crate::geometry::point::closest_on_segment(
            p2,
            pts[i],
            pts[(i + 1) % pts.len()],
        );
        near = near.min(p2.dist(cp));
    }
    if near < 1e-7 * scale {
        return Err(Error::validation(
            "reference point sits on the domain boundary",
        ));
    }

    let n1 = (2 * domain.len()).max(512);
    let log_b_at = |n: usize| -> Result<f64> {
        let sys = BubbleSystem::new(vec![domain.trig_resample(n)])?;
        let sol = solve_field(&sys, &FluxSpec::Free { q: 1.0 })?;
        Ok(2.0 * std::f64::consts::PI * sol.phi_at(p2))
    };
    let l1 = log_b_at(n1)?;
    let l2 = log_b_at(2 * n1)?;
    let log_b = (4.0 * l2 - l1) / 3.0;
    let b = log_b.exp();
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::numerical(format!(
            "conformal radius {b} outside (0, 1); point too close to the boundary"
        )));
    }
    Ok(b)
}
