use super::curve::BoundaryCurve;
use super::point::{pt, Point};
use crate::error::{Error, Result};

/// Anisotropic renormalization x -> c x, y -> c^yexp y with c > 0 chosen so
/// the result has diameter exactly 2 (to 1e-9). Returns the scaled curve and
/// the scale c. Diameter is monotone increasing in c, so the solve brackets
/// and bisects on log c.
pub fn normalize_diameter2(curve: &BoundaryCurve, yexp: i32) -> Result<(BoundaryCurve, f64)> {
    let d0 = curve.diameter();
    if d0 <= 0.0 {
        return Err(Error::validation("zero-diameter input"));
    }
    let diam_at = |c: f64| -> f64 {
        let cy = c.powi(yexp);
        curve
            .transformed(|p| pt(c * p.x, cy * p.y))
            .diameter()
    };
    // bracket around the similarity guess
    let mut lo = 2.0 / d0;
    let mut hi = lo;
    if diam_at(lo) > 2.0 {
        for _ in 0..200 {
            lo *= 0.5;
            if diam_at(lo) <= 2.0 {
                break;
            }
        }
    } else {
        for _ in 0..200 {
            hi *= 2.0;
            if diam_at(hi) >= 2.0 {
                break;
            }
        }
    }
    let c = crate::numeric::brent_root(|c| diam_at(c) - 2.0, lo, hi, 1e-14 * (2.0 / d0), 200)?;
    let cy = c.powi(yexp);
    Ok((curve.transformed(|p| pt(c * p.x, cy * p.y)), c))
}

/// Renormalization used by the degenerate-contraction limit theorems:
/// apply the shear z -> z + i alpha z^n, then scale x by c and y by c^(2n-1)
/// with c chosen so the output has diameter exactly 2.
///
/// n = 1, alpha = 0 degenerates to a plain similarity rescale.
pub fn normalize_for_asymptotics(
    curve: &BoundaryCurve,
    n: u32,
    alpha: f64,
) -> Result<BoundaryCurve> {
    if n < 1 {
        return Err(Error::validation("degree n must be >= 1"));
    }
    let sheared = if alpha == 0.0 {
        curve.clone()
    } else {
        curve.transformed(|p| {
            let z = num_complex::Complex64::new(p.x, p.y);
            let w = z + num_complex::Complex64::new(0.0, alpha) * z.powu(n);
            pt(w.re, w.im)
        })
    };
    let yexp = (2 * n - 1) as i32;
    Ok(normalize_diameter2(&sheared, yexp)?.0)
}

/// Variant for the saddle-node regime, where the local model scales as
/// x ~ c, y ~ c^2 rather than the symmetric-degeneracy exponents. The
/// generic (1, 2n-1) rule cannot reach diameter 2 on these shapes.
pub fn normalize_for_saddle(curve: &BoundaryCurve) -> Result<BoundaryCurve> {
    Ok(normalize_diameter2(curve, 2)?.0)
}

/// Translate so the bounding-box midpoints sit at the origin. Limit-curve
/// fits center both the snapshot and the reference this way before the
/// diameter-2 renormalization.
pub fn center_by_extents(curve: &BoundaryCurve) -> BoundaryCurve {
    let (lo, hi) = curve.bbox();
    let mid = (lo + hi) * 0.5;
    curve.translated(Point::default() - mid)
}
