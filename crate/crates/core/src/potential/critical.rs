use super::eval::{eval_unguarded, PotentialProbe, BOUNDARY_GUARD_FACTOR};
use crate::error::Result;
use crate::geometry::point::Rect;
use crate::geometry::{BubbleSystem, Point};
use crate::numeric::polyfit;
use serde::Serialize;

/// Classification of a critical point of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Minimum,
    Saddle,
    Maximum,
    Degenerate,
}

/// A located critical point of the gravity potential.
///
/// `degree` is 1 for a nondegenerate point; for a degenerate point it is n
/// where the leading term along the Hessian kernel is x^(2n) (a cubic
/// saddle-node also reports n = 2), and `beta` holds the leading local
/// coefficient: the potential grows like (beta / 2n) x^(2n) along the kernel.
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPoint {
    pub location: Point,
    pub kind: CriticalKind,
    pub degree: u32,
    pub value: f64,
    pub hessian_eigenvalues: (f64, f64),
    pub hessian_axes: (Point, Point),
    pub is_global_min: bool,
    pub beta: Option<f64>,
}

/// A multistart seed whose refinement did not converge, with the reason.
#[derive(Debug, Clone, Serialize)]
pub struct SeedFailure {
    pub seed: Point,
    pub reason: String,
}

/// Outcome of a critical-point search: the deduplicated points plus every
/// seed that failed to converge (nothing is silently dropped).
#[derive(Debug, Clone, Serialize)]
pub struct CriticalPointSearch {
    pub points: Vec<CriticalPoint>,
    pub failures: Vec<SeedFailure>,
}

/// Absolute gradient tolerance at unit total area; scaled by sqrt(S).
pub const GRADIENT_TOL: f64 = 1e-10;
/// Eigenvalue ratio below which a Hessian counts as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-3;
/// Multistart grid resolution per side.
const GRID: usize = 32;
const MAX_NEWTON: usize = 80;

/// Locate and classify every critical point of the potential inside
/// `search_box`.
///
/// Multistart damped Newton on the gradient: a 32x32 grid over the box plus
/// one seed per bubble centroid. Converged locations are deduplicated at
/// radius 10x the gradient tolerance and classified by Hessian eigenvalues;
/// global minima are flagged by value comparison. For degenerate points the
/// local degree and leading coefficient are fitted along the kernel
/// direction.
pub fn find_critical_points(system: &BubbleSystem, search_box: Rect) -> Result<CriticalPointSearch> {
    system.validate()?;
    let scale = system.total_area().sqrt().max(1e-12);
    let gtol = GRADIENT_TOL * scale;
    let guard = BOUNDARY_GUARD_FACTOR * system.mean_spacing();
    // iterates may wander slightly outside before coming back
    let roam = search_box.expanded(0.5 * (search_box.width() + search_box.height()));

    let probe = |p: Point| -> Option<PotentialProbe> {
        if !roam.contains(p) || system.distance_to_any_boundary(p) < guard {
            return None;
        }
        Some(eval_unguarded(system, p))
    };

    let mut seeds: Vec<Point> = Vec::with_capacity(GRID * GRID + system.bubbles.len());
    for i in 0..GRID {
        for j in 0..GRID {
            let x = search_box.lo.x + search_box.width() * (i as f64 + 0.5) / GRID as f64;
            let y = search_box.lo.y + search_box.height() * (j as f64 + 0.5) / GRID as f64;
            seeds.push(Point { x, y });
        }
    }
    for b in &system.bubbles {
        let c = b.curve.centroid();
        if search_box.contains(c) {
            seeds.push(c);
        }
    }

    let mut found: Vec<(Point, PotentialProbe)> = Vec::new();
    let mut failures: Vec<SeedFailure> = Vec::new();
    'seed: for &seed in &seeds {
        let mut p = seed;
        let mut cur = match probe(p) {
            Some(v) => v,
            // grid cells straddling a boundary are expected; skip quietly
            None => continue,
        };
        for _ in 0..MAX_NEWTON {
            let g = cur.gradient;
            if g.norm() < gtol {
                // converged: polish with undamped steps
                for _ in 0..3 {
                    let h = cur.hessian;
                    let det = h.det();
                    if det.abs() < 1e-300 {
                        break;
                    }
                    let dx = Point {
                        x: (-h.yy * cur.gradient.x + h.xy * cur.gradient.y) / det,
                        y: (h.xy * cur.gradient.x - h.xx * cur.gradient.y) / det,
                    };
                    match probe(p + dx) {
                        Some(v) if v.gradient.norm() <= cur.gradient.norm() => {
                            p = p + dx;
                            cur = v;
                        }
                        _ => break,
                    }
                }
                if !search_box.contains(p) {
                    continue 'seed; // converged outside the requested box
                }
                found.push((p, cur));
                continue 'seed;
            }
            // Newton step on grad = 0, Levenberg fallback when H is near
            // singular at the current iterate
            let h = cur.hessian;
            let det = h.det();
            let step = if det.abs() > 1e-14 * (h.xx.abs() + h.yy.abs() + h.xy.abs()).powi(2) {
                Point {
                    x: (-h.yy * g.x + h.xy * g.y) / det,
                    y: (h.xy * g.x - h.xx * g.y) / det,
                }
            } else {
                g * (-0.5 / (h.xx.abs() + h.yy.abs() + 2.0 * h.xy.abs()).max(1e-12))
            };
            // line search on |grad|^2
            let mut t = 1.0;
            let mut advanced = false;
            for _ in 0..30 {
                let cand = p + step * t;
                if let Some(v) = probe(cand) {
                    if v.gradient.norm() < cur.gradient.norm() {
                        p = cand;
                        cur = v;
                        advanced = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !advanced {
                failures.push(SeedFailure {
                    seed,
                    reason: format!(
                        "stalled at ({:.6}, {:.6}) with |grad| = {:.3e}",
                        p.x,
                        p.y,
                        cur.gradient.norm()
                    ),
                });
                continue 'seed;
            }
        }
        failures.push(SeedFailure {
            seed,
            reason: format!(
                "no convergence after {MAX_NEWTON} iterations, |grad| = {:.3e}",
                cur.gradient.norm()
            ),
        });
    }

    // deduplicate
    let dedup = 10.0 * gtol;
    let mut unique: Vec<(Point, PotentialProbe)> = Vec::new();
    for (p, v) in found {
        if !unique.iter().any(|(q, _)| q.dist(p) < dedup.max(1e-9 * scale)) {
            unique.push((p, v));
        }
    }
    unique.sort_by(|a, b| {
        (a.0.x, a.0.y)
            .partial_cmp(&(b.0.x, b.0.y))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut points: Vec<CriticalPoint> = unique
        .into_iter()
        .map(|(loc, v)| classify(system, loc, &v, scale, &probe))
        .collect();

    // global minima by value comparison
    if let Some(vmin) = points
        .iter()
        .filter(|c| matches!(c.kind, CriticalKind::Minimum | CriticalKind::Degenerate))
        .map(|c| c.value)
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        let tol = 1e-9 * (1.0 + vmin.abs());
        for c in &mut points {
            c.is_global_min = matches!(c.kind, CriticalKind::Minimum | CriticalKind::Degenerate)
                && c.value <= vmin + tol;
        }
    }

    Ok(CriticalPointSearch { points, failures })
}

fn classify(
    system: &BubbleSystem,
    loc: Point,
    v: &PotentialProbe,
    scale: f64,
    probe: &dyn Fn(Point) -> Option<PotentialProbe>,
) -> CriticalPoint {
    let ((l1, l2), (a1, a2)) = v.hessian.eigen_axes();
    let degenerate = l1.abs().min(l2.abs()) < DEGENERACY_THRESHOLD * l1.abs().max(l2.abs());
    let kind = if degenerate {
        CriticalKind::Degenerate
    } else if l1 > 0.0 {
        CriticalKind::Minimum
    } else if l2 < 0.0 {
        CriticalKind::Maximum
    } else {
        CriticalKind::Saddle
    };
    let (degree, beta) = if degenerate {
        let kernel = if l1.abs() <= l2.abs() { a1 } else { a2 };
        fit_degenerate_direction(system, loc, kernel, scale, probe).unwrap_or((2, None))
    } else {
        (1, None)
    };
    CriticalPoint {
        location: loc,
        kind,
        degree,
        value: v.value,
        hessian_eigenvalues: (l1, l2),
        hessian_axes: (a1, a2),
        is_global_min: false,
        beta,
    }
}

/// Fit the potential along the Hessian kernel: the first significant
/// coefficient c_k (k >= 3) of the 1-D expansion gives degree n = ceil(k/2)
/// and beta = k c_k, matching the local model (beta/2n) x^(2n).
fn fit_degenerate_direction(
    system: &BubbleSystem,
    loc: Point,
    kernel: Point,
    scale: f64,
    probe: &dyn Fn(Point) -> Option<PotentialProbe>,
) -> Option<(u32, Option<f64>)> {
    let base = eval_unguarded(system, loc).value;
    // stay well inside the local model's range
    let mut smax = 0.15 * scale;
    let dist = system.distance_to_any_boundary(loc);
    smax = smax.min(0.5 * dist.max(1e-12));
    let m = 25usize;
    let mut xs = Vec::with_capacity(2 * m + 1);
    let mut ys = Vec::with_capacity(2 * m + 1);
    for i in -(m as i64)..=(m as i64) {
        let s = smax * i as f64 / m as f64;
        if let Some(v) = probe(loc + kernel * s) {
            xs.push(s);
            ys.push(v.value - base);
        }
    }
    if xs.len() < 12 {
        return None;
    }
    let deg = 8usize.min(xs.len() - 2);
    let coef = polyfit(&xs, &ys, deg).ok()?;
    let spread = ys.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    for k in 3..coef.len() {
        let contrib = coef[k].abs() * smax.powi(k as i32);
        if contrib > 1e-6 * spread {
            let n = (k as u32).div_ceil(2);
            return Some((n, Some(k as f64 * coef[k])));
        }
    }
    None
}
