use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{EventKind, Trajectory};
use crate::geometry::{BubbleSystem, Point};
use crate::potential::eval_potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContractionKind {
    /// The bubble outlived every other one (or vanished together with the
    /// last survivors at the final extraction time).
    Complete,
    /// The bubble vanished while others kept draining.
    Partial,
}

/// Where and when one bubble contracted to a point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionPoint {
    pub location: Point,
    pub time: f64,
    pub kind: ContractionKind,
    pub label: u32,
    /// Gradient norm of the extracted-region potential at the point.
    pub gradient_norm: f64,
    /// Potential value minus the interior constant of the surviving air
    /// region (zero when nothing survives; the global-minimum certificate).
    pub value_gap: f64,
}

/// Newton refinement of a critical point of the difference potential
/// grad (Pi_initial - Pi_current); returns the refined point.
fn refine_difference_min(
    initial: &BubbleSystem,
    current: Option<&BubbleSystem>,
    start: Point,
    step_cap: f64,
) -> Result<(Point, f64)> {
    let probe = |p: Point| -> Result<(Point, crate::potential::SymMat2, f64)> {
        let a = eval_potential(initial, p)?;
        match current {
            None => Ok((a.gradient, a.hessian, a.value)),
            Some(cur) => {
                let b = eval_potential(cur, p)?;
                Ok((
                    a.gradient - b.gradient,
                    crate::potential::SymMat2 {
                        xx: a.hessian.xx - b.hessian.xx,
                        xy: a.hessian.xy - b.hessian.xy,
                        yy: a.hessian.yy - b.hessian.yy,
                    },
                    a.value - b.value,
                ))
            }
        }
    };
    let mut p = start;
    for _ in 0..60 {
        let (g, h, _) = probe(p)?;
        let det = h.det();
        if det.abs() < 1e-300 {
            break;
        }
        let mut dx = Point {
            x: (-h.yy * g.x + h.xy * g.y) / det,
            y: (h.xy * g.x - h.xx * g.y) / det,
        };
        let n = dx.norm();
        if n > step_cap {
            dx = dx * (step_cap / n);
        }
        p = p + dx;
        if n < 1e-14 * step_cap.max(1.0) {
            break;
        }
    }
    let (g, _, _) = probe(p)?;
    Ok((p, g.norm()))
}

/// Extract the contraction points of a finished free run and certify each
/// against the potential layer: a contraction point must be the global
/// minimum of the potential of the extracted region (initial air minus
/// current air), which is checked by a gradient test and by matching the
/// potential value against the interior constant of the surviving region.
///
/// Disappearance events at the last event time of a fully drained run are
/// complete contractions; everything else is partial. The certification
/// tolerates a displacement up to 3 marker spacings between the recorded
/// event location and the refined minimum.
pub fn contraction_points(traj: &Trajectory) -> Result<Vec<ContractionPoint>> {
    if traj
        .events
        .iter()
        .any(|e| e.kind == EventKind::Cusp)
        && !traj.final_system().bubbles.is_empty()
    {
        return Err(Error::validation(
            "trajectory terminated by a cusp; contraction points undefined",
        ));
    }
    let initial = traj.initial_system();
    let s0 = initial.total_area();
    let drained = traj.final_system().bubbles.is_empty();
    if !drained && traj.total_time < traj.t_star * (1.0 - 1e-9) {
        return Err(Error::validation(
            "trajectory stopped before contraction completed",
        ));
    }
    let h = initial.mean_spacing();
    let tol = 3.0 * h;

    let disappearances: Vec<_> = traj.events_of_kind(EventKind::Disappearance).collect();
    if disappearances.is_empty() {
        return Err(Error::validation("trajectory contains no disappearances"));
    }
    let t_last = disappearances
        .iter()
        .map(|e| e.time)
        .fold(f64::NEG_INFINITY, f64::max);

    let mut out = Vec::with_capacity(disappearances.len());
    for e in disappearances {
        let kind = if drained && e.time >= t_last - 1e-12 * traj.total_time.abs().max(1.0) {
            ContractionKind::Complete
        } else {
            ContractionKind::Partial
        };
        // post-transition state at the event time
        let snap = traj.snapshot_at(e.time);
        let survivors = if snap.bubbles.is_empty() { None } else { Some(snap) };
        let (refined, grad) = refine_difference_min(initial, survivors, e.location, 2.0 * h)?;
        if refined.dist(e.location) > tol {
            return Err(Error::numerical(format!(
                "contraction point at t = {:.6} drifts {:.3e} from the potential minimum (tolerance {:.3e})",
                e.time,
                refined.dist(e.location),
                tol
            )));
        }
        // global-minimum certificate: value matches the interior constant
        let value_gap = match survivors {
            None => 0.0,
            Some(cur) => {
                let inside = cur.bubbles[0].curve.centroid();
                let at_point = eval_potential(initial, refined)?.value
                    - eval_potential(cur, refined)?.value;
                let constant = eval_potential(initial, inside)?.value
                    - eval_potential(cur, inside)?.value;
                at_point - constant
            }
        };
        if value_gap.abs() > 1e-3 * s0 {
            return Err(Error::numerical(format!(
                "potential value at the contraction point misses the interior constant by {value_gap:.3e}"
            )));
        }
        out.push(ContractionPoint {
            location: e.location,
            time: e.time,
            kind,
            label: e.labels.first().copied().unwrap_or(0),
            gradient_norm: grad,
            value_gap,
        });
    }
    out.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{run_free, RunOptions};
    use crate::geometry::{disk_curve, pt};

    #[test]
    fn unit_disk_contracts_completely_at_its_center() {
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.4, -0.7), 1.0, 64)]).unwrap();
        let traj = run_free(&sys, 1.0, sys.total_area(), &RunOptions::coarse(0.02)).unwrap();
        let pts = contraction_points(&traj).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].kind, ContractionKind::Complete);
        assert!(pts[0].location.dist(pt(0.4, -0.7)) < 0.05);
        assert!((pts[0].time - std::f64::consts::PI).abs() < 0.05);
        assert_eq!(pts[0].value_gap, 0.0);
    }

    #[test]
    fn two_equal_disks_give_two_simultaneous_complete_points() {
        // centers at +-2: the two symmetric global minima of the pair
        // potential sit at +-(2 - sqrt(3)) on the axis
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(-2.0, 0.0), 1.0, 64),
            disk_curve(pt(2.0, 0.0), 1.0, 64),
        ])
        .unwrap();
        let traj = run_free(&sys, 1.0, sys.total_area(), &RunOptions::coarse(0.02)).unwrap();
        let pts = contraction_points(&traj).unwrap();
        assert_eq!(pts.len(), 2);
        let x = 2.0 - 3.0f64.sqrt();
        for p in &pts {
            assert_eq!(p.kind, ContractionKind::Complete);
            assert!(
                p.location.dist(pt(x.copysign(p.location.x), 0.0)) < 0.08,
                "point at {:?}",
                p.location
            );
        }
        assert!((pts[0].time - pts[1].time).abs() < 1e-12);
    }

    #[test]
    fn unequal_disks_report_a_certified_partial_point() {
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(0.0, 0.0), 1.0, 64),
            disk_curve(pt(3.0, 0.0), 0.5, 48),
        ])
        .unwrap();
        let traj = run_free(&sys, 1.0, sys.total_area(), &RunOptions::coarse(0.02)).unwrap();
        let pts = contraction_points(&traj).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].kind, ContractionKind::Partial);
        assert_eq!(pts[0].label, 1);
        assert!(pts[0].time < pts[1].time);
        assert_eq!(pts[1].kind, ContractionKind::Complete);
        // partial point stays inside the small disk's footprint
        assert!((pts[0].location.x - 3.0).abs() < 0.5);
        assert!(pts[0].value_gap.abs() <= 1e-3 * sys.total_area());
    }

    #[test]
    fn unfinished_runs_are_rejected() {
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 64)]).unwrap();
        let traj = run_free(&sys, 1.0, 0.3, &RunOptions::coarse(0.02)).unwrap();
        assert!(contraction_points(&traj).is_err());
    }
}
