use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conformal::{kufarev_solve, trace_boundary, ConformalMap};
use crate::error::{Error, Result};
use crate::geometry::{pt, BoundaryCurve, BubbleSystem, Point};
use crate::potential::{eval_potential, SymMat2};

/// Partial-contraction data for two circular bubbles |z| < big and
/// |z - a| < small under total suction rate q.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KufarevPartial {
    /// Contraction point of the smaller bubble (on the symmetry axis).
    pub z0: Point,
    /// Physical time of the partial contraction.
    pub tau: f64,
    /// Parameter of the exact map family at the contraction.
    pub map_time: f64,
    /// Constant value of the extracted-region potential inside the
    /// surviving bubble.
    pub constant: f64,
    /// Gradient norm of the extracted-region potential at z0 (residual of
    /// the critical-point condition).
    pub gradient_norm: f64,
    /// Hessian of the extracted-region potential at z0; its eigenvectors
    /// and inverse eigenvalues set the late-time ellipse of the vanishing
    /// bubble.
    pub hessian: SymMat2,
    /// Boundary of the surviving bubble at the contraction time.
    pub survivor: BoundaryCurve,
}

const TRACE_POINTS: usize = 4096;
const CIRCLE_POINTS: usize = 2048;

fn raw_circle(c: Point, r: f64, n: usize) -> Result<BoundaryCurve> {
    BoundaryCurve::new_fast(
        (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                pt(c.x + r * t.cos(), c.y + r * t.sin())
            })
            .collect(),
    )
}

/// Difference-potential probe D = Pi_initial - Pi_candidate at p.
struct DiffPotential<'a> {
    initial: &'a BubbleSystem,
    candidate: &'a BubbleSystem,
}

impl DiffPotential<'_> {
    fn probe(&self, p: Point) -> Result<(f64, Point, SymMat2)> {
        let u0 = eval_potential(self.initial, p)?;
        let ut = eval_potential(self.candidate, p)?;
        Ok((
            u0.value - ut.value,
            u0.gradient - ut.gradient,
            SymMat2 {
                xx: u0.hessian.xx - ut.hessian.xx,
                xy: u0.hessian.xy - ut.hessian.xy,
                yy: u0.hessian.yy - ut.hessian.yy,
            },
        ))
    }
}

struct Candidate {
    z0: f64,
    mismatch: f64,
    constant: f64,
    gradient: Point,
    hessian: SymMat2,
    survivor: BoundaryCurve,
}

/// Trace the family member at map time t, locate the on-axis critical point
/// of the difference potential inside the small circle's footprint, and
/// measure how far its value sits from the constant inside the candidate
/// surviving bubble.
fn candidate_at(
    initial: &BubbleSystem,
    a: f64,
    big: f64,
    small: f64,
    q: f64,
    t: f64,
) -> Result<Candidate> {
    let map = kufarev_solve(a, big, small, q, t)?;
    let survivor = trace_boundary(&map, TRACE_POINTS)?;
    let candidate = BubbleSystem::new(vec![survivor.clone()])?;
    let d = DiffPotential {
        initial,
        candidate: &candidate,
    };
    // the difference potential is quadratic-convex along the axis across the
    // vanished footprint: one sign change of its x-derivative
    let margin = 0.02 * small;
    let mut lo = a - small + margin;
    let mut hi = a + small - margin;
    let g = |x: f64| -> Result<f64> { Ok(d.probe(pt(x, 0.0))?.1.x) };
    let (glo, ghi) = (g(lo)?, g(hi)?);
    if !(glo < 0.0 && ghi > 0.0) {
        return Err(Error::numerical(format!(
            "no on-axis critical point of the difference potential at map time {t:.6}"
        )));
    }
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z0 = 0.5 * (lo + hi);
    let (value, gradient, hessian) = d.probe(pt(z0, 0.0))?;
    // interior constant probed just inside the survivor's leftmost point
    let left = map.eval(Complex64::new(-1.0, 0.0));
    let probe_in = pt(left.re + 0.05 * survivor.diameter(), 0.0);
    let (constant, _, _) = d.probe(probe_in)?;
    Ok(Candidate {
        z0,
        mismatch: value - constant,
        constant,
        gradient,
        hessian,
        survivor,
    })
}

/// Locate the partial contraction of the smaller of two circular bubbles,
/// |z| < big and |z - a| < small, under total suction q, from the exact
/// rational map family of the surviving domain.
///
/// The map-time parameter is swept until the difference potential
/// Pi_initial - Pi_survivor develops a critical point whose value matches
/// the constant the potential takes inside the surviving bubble; that
/// simultaneous condition pins both the contraction point z0 and the
/// physical time tau of the event.
pub fn kufarev_partial(a: f64, big: f64, small: f64, q: f64) -> Result<KufarevPartial> {
    if !(big > small && small > 0.0) {
        return Err(Error::validation(format!(
            "need big > small > 0, got big = {big}, small = {small}"
        )));
    }
    if !(a > big + small) {
        return Err(Error::validation(format!(
            "circles must be disjoint: a = {a} vs {big} + {small}"
        )));
    }
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::validation(format!("need a positive suction rate, got {q}")));
    }
    let initial = BubbleSystem::new(vec![
        raw_circle(pt(0.0, 0.0), big, CIRCLE_POINTS)?,
        raw_circle(
            pt(a, 0.0),
            small,
            ((CIRCLE_POINTS as f64 * small / big) as usize).max(512),
        )?,
    ])?;

    // physical start of the two-bubble evolution and formal end of the family
    let t_start = PI * small * small / q;
    let t_degenerate = PI * (2.0 * small * small + big * big) / q;
    let f = |t: f64| -> Result<Candidate> { candidate_at(&initial, a, big, small, q, t) };

    let c_start = f(t_start)?;
    if c_start.mismatch >= 0.0 {
        return Err(Error::numerical(
            "difference potential already glues at the start; configuration is degenerate",
        ));
    }
    // walk toward the family's degeneration until the mismatch changes sign
    let steps = 64;
    let dt = (t_degenerate - t_start) / steps as f64;
    let (mut t_lo, mut m_lo) = (t_start, c_start.mismatch);
    let mut t_hi = None;
    for k in 1..steps {
        let t = t_start + k as f64 * dt;
        match f(t) {
            Ok(c) => {
                if c.mismatch >= 0.0 {
                    t_hi = Some(t);
                    break;
                }
                t_lo = t;
                m_lo = c.mismatch;
            }
            Err(_) => break, // left the family's validity window
        }
    }
    let mut t_hi = t_hi.ok_or_else(|| {
        Error::numerical(format!(
            "no partial contraction in the family's validity window (last mismatch {m_lo:.3e})"
        ))
    })?;
    for _ in 0..52 {
        let mid = 0.5 * (t_lo + t_hi);
        if f(mid)?.mismatch < 0.0 {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }
    let t_hat = 0.5 * (t_lo + t_hi);
    let c = f(t_hat)?;
    Ok(KufarevPartial {
        z0: pt(c.z0, 0.0),
        tau: t_hat - t_start,
        map_time: t_hat,
        constant: c.constant,
        gradient_norm: c.gradient.norm(),
        hessian: c.hessian,
        survivor: c.survivor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_two_circle_contraction() {
        let p = kufarev_partial(3.0, 1.0, 0.5, 1.0).unwrap();
        assert!(
            (p.map_time - 3.00484859).abs() < 5e-5,
            "map time {}",
            p.map_time
        );
        assert!((p.tau - 2.21945043).abs() < 5e-5, "tau {}", p.tau);
        assert!((p.z0.x - 2.84600541).abs() < 5e-5, "z0 {}", p.z0.x);
        assert_eq!(p.z0.y, 0.0);
        assert!(p.gradient_norm < 1e-8, "gradient {}", p.gradient_norm);
        // the critical point is a local minimum of the extracted-region
        // potential: positive-definite Hessian
        let (lo, hi) = p.hessian.eigenvalues();
        assert!(lo > 0.0 && hi > 0.0, "eigenvalues {lo} {hi}");
        // survivor holds the remaining area
        let want = PI * (1.0 + 0.25) - p.tau;
        assert!((p.survivor.area() - want).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_configurations() {
        assert!(kufarev_partial(1.4, 1.0, 0.5, 1.0).is_err());
        assert!(kufarev_partial(3.0, 0.5, 1.0, 1.0).is_err());
        assert!(kufarev_partial(3.0, 1.0, 0.5, 0.0).is_err());
    }
}
