use super::curve::BoundaryCurve;
use super::point::{closest_on_segment, Point};
use crate::error::{Error, Result};

/// How far apart two pinch sites must be (along the boundary) to count as
/// distinct, in units of the clearance.
const PINCH_CLUSTER_ARC_FACTOR: f64 = 4.0;
/// Minimum arc separation between the two sides of a candidate pinch, in
/// units of the clearance. Keeps neighboring vertices on one arc from being
/// mistaken for an approaching opposite arc.
const PINCH_EXCLUSION_ARC_FACTOR: f64 = 8.0;

/// Detect a self-pinch and perform the surgery.
///
/// If two non-adjacent boundary arcs approach within `clearance`, the curve
/// is cut along the closest-approach chord and reconnected into two simple
/// closed curves; the two new endpoint pairs are retracted by clearance/2
/// along the neck axis so the children start strictly separated. Without a
/// pinch the input is returned unchanged. Two distinct pinch sites below
/// clearance are refused as ambiguous.
pub fn split_on_pinch(curve: &BoundaryCurve, clearance: f64) -> Result<Vec<BoundaryCurve>> {
    if clearance <= 0.0 {
        return Err(Error::validation("clearance must be positive"));
    }
    let spacing = curve.mean_spacing();
    if clearance <= spacing {
        return Err(Error::validation(format!(
            "clearance {clearance:.3e} must exceed vertex spacing {spacing:.3e}"
        )));
    }
    let n = curve.len();
    let pts = curve.points();
    let arcs = curve.arc_lengths();
    let perim = arcs[n];
    let min_arc_sep = PINCH_EXCLUSION_ARC_FACTOR * clearance;
    if perim < 2.5 * min_arc_sep {
        // curve too small to host a resolvable pinch
        return Ok(vec![curve.clone()]);
    }

    // candidate pairs below clearance
    struct Cand {
        dist: f64,
        vi: usize,
        seg: usize,
        on_seg: Point,
    }
    let mut cands: Vec<Cand> = Vec::new();
    for i in 0..n {
        let p = pts[i];
        for j in 0..n {
            let a1 = (arcs[i] - arcs[j]).rem_euclid(perim);
            let sep = a1.min(perim - a1);
            if sep < min_arc_sep {
                continue;
            }
            let (q, _) = closest_on_segment(p, pts[j], pts[(j + 1) % n]);
            let d = p.dist(q);
            if d < clearance {
                cands.push(Cand {
                    dist: d,
                    vi: i,
                    seg: j,
                    on_seg: q,
                });
            }
        }
    }
    if cands.is_empty() {
        return Ok(vec![curve.clone()]);
    }

    // cluster candidates by arc position (single linkage): two candidates
    // belong to the same pinch when both their arms sit close together along
    // the boundary. A purely geometric test would merge distinct necks that
    // happen to pinch near the same point in the plane.
    let arc_of_seg = |c: &Cand| (arcs[c.seg] + (c.on_seg - pts[c.seg]).norm()).rem_euclid(perim);
    let circ = |a: f64, b: f64| {
        let d = (a - b).rem_euclid(perim);
        d.min(perim - d)
    };
    let radius = PINCH_CLUSTER_ARC_FACTOR * clearance;
    let arcpos: Vec<(f64, f64)> = cands.iter().map(|c| (arcs[c.vi], arc_of_seg(c))).collect();
    let pair_gap = |a: (f64, f64), b: (f64, f64)| {
        let straight = circ(a.0, b.0).max(circ(a.1, b.1));
        let crossed = circ(a.0, b.1).max(circ(a.1, b.0));
        straight.min(crossed)
    };
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let k = cands.len();
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in (i + 1)..k {
            if pair_gap(arcpos[i], arcpos[j]) < radius {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut roots: Vec<usize> = (0..k).map(|i| root(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    if roots.len() > 1 {
        return Err(Error::AmbiguousSurgery {
            candidates: roots.len(),
            clearance,
        });
    }

    let best = cands
        .iter()
        .min_by(|a, b| a.dist.partial_cmp(&b.dist).unwrap())
        .unwrap();
    let (i, j) = (best.vi, best.seg);
    let a = pts[i];
    let b = best.on_seg;

    // child 1 walks forward from vertex i to segment j, child 2 the rest
    let mut fwd: Vec<Point> = Vec::new();
    let mut k = i;
    loop {
        fwd.push(pts[k]);
        if k == j {
            break;
        }
        k = (k + 1) % n;
    }
    fwd.push(b);
    let mut rest: Vec<Point> = vec![b];
    k = (j + 1) % n;
    loop {
        rest.push(pts[k]);
        if k == (i + n - 1) % n {
            break;
        }
        k = (k + 1) % n;
    }
    rest.push(a);

    // retract the chord endpoints into each child along the neck axis
    let chord = (b - a).normalized();
    let axis = chord.perp(); // perpendicular to the cut chord
    let retract = 0.5 * clearance;
    for child in [&mut fwd, &mut rest] {
        let m = child.len();
        let centroid = child.iter().fold(Point::default(), |s, &p| s + p) / m as f64;
        let cm = (a + b) * 0.5;
        let side = (centroid - cm).dot(axis).signum();
        // first and last points of each child are the chord endpoints
        child[0] += axis * (side * retract);
        child[m - 1] += axis * (side * retract);
    }

    let c1 = BoundaryCurve::new_fast(fwd)
        .map_err(|e| Error::validation(format!("pinch child 1 invalid: {e}")))?;
    let c2 = BoundaryCurve::new_fast(rest)
        .map_err(|e| Error::validation(format!("pinch child 2 invalid: {e}")))?;
    Ok(vec![c1, c2])
}
