use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{run_free, EventKind, RunOptions, Trajectory, CUSP_REARM_LEVEL};
use crate::geometry::{cusp_exponent, BubbleSystem};

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Grid fraction for the bracketing runs.
    pub grid_fraction: f64,
    /// Evenly spaced pre-scan samples used to certify a single transition.
    pub prescan: usize,
    /// Total suction rate.
    pub q: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            grid_fraction: 0.02,
            prescan: 6,
            q: 1.0,
        }
    }
}

/// Evidence gathered around the rupture threshold of a one-parameter family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySweepReport {
    /// Parameter values probed, with whether the free contraction broke up.
    pub samples: Vec<(f64, bool)>,
    /// Threshold parameter, bracketed to 1e-3 of the sweep range.
    pub sigma: f64,
    /// Width of the final bracket.
    pub bracket: f64,
    /// Fitted tip exponent of the cusp observed just on the surviving side
    /// of the threshold (5/2 for a rupture-threshold cusp).
    pub cusp_exponent: Option<f64>,
    /// Whether the boundary relaxed below the smoothness threshold within
    /// ten snapshots after the cusp.
    pub resmoothed: Option<bool>,
}

fn breaks(
    family: &(impl Fn(f64) -> Result<BubbleSystem> + Sync),
    s: f64,
    opts: &SweepOptions,
) -> Result<bool> {
    let sys = family(s)?;
    let horizon = sys.total_area() / opts.q;
    let traj = run_free(
        &sys,
        opts.q,
        horizon,
        &RunOptions::coarse(opts.grid_fraction),
    )?;
    Ok(traj.first_event(EventKind::Breakup).is_some())
}

/// Bracket the rupture threshold of a family of initial shapes: members on
/// one side of sigma break up under free suction and members on the other
/// side contract whole. The transition parameter is bisected to 1e-3 of the
/// range; the near-threshold member on the surviving side is then rerun at
/// doubled resolution to capture the threshold cusp, its tip exponent, and
/// the subsequent re-smoothing.
///
/// Non-monotone verdicts across the pre-scan are an error: no threshold is
/// claimed when the family does not split cleanly.
pub fn rupture_boundary_sweep(
    family: impl Fn(f64) -> Result<BubbleSystem> + Sync,
    s_lo: f64,
    s_hi: f64,
    opts: &SweepOptions,
) -> Result<FamilySweepReport> {
    if !(s_hi > s_lo) || !s_lo.is_finite() || !s_hi.is_finite() {
        return Err(Error::validation(format!(
            "bad sweep range [{s_lo}, {s_hi}]"
        )));
    }
    let range = s_hi - s_lo;
    let n = opts.prescan.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|k| s_lo + range * k as f64 / (n - 1) as f64)
        .collect();
    let verdicts: Vec<bool> = grid
        .par_iter()
        .map(|&s| breaks(&family, s, opts))
        .collect::<Result<_>>()?;
    let mut samples: Vec<(f64, bool)> = grid.iter().copied().zip(verdicts.iter().copied()).collect();

    let transitions = verdicts.windows(2).filter(|w| w[0] != w[1]).count();
    if transitions != 1 {
        return Err(Error::numerical(format!(
            "family verdicts are not monotone across [{s_lo}, {s_hi}]: {:?}",
            samples
        )));
    }
    let k = verdicts.windows(2).position(|w| w[0] != w[1]).unwrap();
    let (mut lo, mut hi) = (grid[k], grid[k + 1]);
    let (mut v_lo, v_hi) = (verdicts[k], verdicts[k + 1]);

    let tol = 1e-3 * range;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let v = breaks(&family, mid, opts)?;
        samples.push((mid, v));
        if v == v_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        let _ = v_hi;
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let sigma = 0.5 * (lo + hi);

    // refined run on the surviving side of the bracket: the neck forms a
    // transient cusp there and relaxes instead of rupturing
    let s_smooth = if v_lo { hi } else { lo };
    let sys = family(s_smooth)?;
    let horizon = sys.total_area() / opts.q;
    let fine = RunOptions {
        snapshot_stride: 1,
        ..RunOptions::coarse(0.5 * opts.grid_fraction)
    };
    let traj = run_free(&sys, opts.q, horizon, &fine)?;
    let (cusp, resmoothed) = threshold_cusp_evidence(&traj);

    Ok(FamilySweepReport {
        samples,
        sigma,
        bracket: hi - lo,
        cusp_exponent: cusp,
        resmoothed,
    })
}

/// Exponent at the first cusp event's forced snapshot, plus whether the
/// sharpness monitor's level drops back under the re-arm threshold within
/// the next ten snapshots.
fn threshold_cusp_evidence(traj: &Trajectory) -> (Option<f64>, Option<bool>) {
    let event = match traj.first_event(EventKind::Cusp) {
        Some(e) => e.clone(),
        None => return (None, None),
    };
    let idx = traj
        .snapshots
        .iter()
        .position(|s| (s.time - event.time).abs() <= 1e-12 * event.time.abs().max(1.0));
    let Some(idx) = idx else {
        return (None, None);
    };
    let snap = &traj.snapshots[idx];
    let exponent = snap
        .bubbles
        .iter()
        .min_by(|a, b| {
            let da = a.curve.distance_to_boundary(event.location);
            let db = b.curve.distance_to_boundary(event.location);
            da.partial_cmp(&db).unwrap()
        })
        .and_then(|b| cusp_exponent(&b.curve, event.location).ok())
        .map(|fit| fit.exponent);

    let mut resmoothed = false;
    for s in traj.snapshots.iter().skip(idx + 1).take(10) {
        let relaxed = s.bubbles.iter().all(|b| {
            let feature = (b.curve.area() / std::f64::consts::PI).sqrt();
            let max_k = b
                .curve
                .curvature()
                .iter()
                .fold(0.0f64, |m, k| m.max(k.abs()));
            max_k * feature < CUSP_REARM_LEVEL
        });
        if relaxed {
            resmoothed = true;
            break;
        }
    }
    (exponent, Some(resmoothed))
}
