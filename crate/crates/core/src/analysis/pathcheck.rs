use crate::analysis::shapefit::sup_distance;
use crate::error::{Error, Result};
use crate::evolution::{run_regulated, RegulatedOutcome, RunOptions, Strategy};
use crate::geometry::BubbleSystem;

/// Check that the final shape of a two-bubble system depends only on the
/// volumes extracted from each bubble, not on the order: extract dq1 from
/// the first bubble then dq2 from the second, rerun with the order swapped,
/// and return the larger label-matched Hausdorff distance between the two
/// final boundaries.
pub fn path_independence_check(
    initial: &BubbleSystem,
    dq1: f64,
    dq2: f64,
    opts: &RunOptions,
) -> Result<f64> {
    if initial.bubbles.len() != 2 {
        return Err(Error::validation("order check needs exactly two bubbles"));
    }
    if !(dq1 > 0.0) || !(dq2 > 0.0) {
        return Err(Error::validation(format!(
            "extraction volumes must be positive, got ({dq1}, {dq2})"
        )));
    }
    let first = Strategy {
        breakpoints: vec![dq1, dq1 + dq2],
        rates: vec![(1.0, 0.0), (0.0, 1.0)],
    };
    let swapped = Strategy {
        breakpoints: vec![dq2, dq1 + dq2],
        rates: vec![(0.0, 1.0), (1.0, 0.0)],
    };

    let run = |strategy: &Strategy| -> Result<BubbleSystem> {
        let (traj, outcome) = run_regulated(initial, strategy, opts)?;
        match outcome {
            RegulatedOutcome::StrategyExhausted { .. } => Ok(traj.final_system().clone()),
            RegulatedOutcome::Cusp { location, time } => Err(Error::numerical(format!(
                "extraction ordering hit a cusp at ({:.4}, {:.4}), t = {time:.4}; \
                 order comparison undefined",
                location.x, location.y
            ))),
            other => Err(Error::numerical(format!(
                "extraction ordering ended early: {other:?}"
            ))),
        }
    };
    let a = run(&first)?;
    let b = run(&swapped)?;

    let mut worst: f64 = 0.0;
    for ba in &a.bubbles {
        let bb = b
            .bubbles
            .iter()
            .find(|x| x.label == ba.label)
            .ok_or_else(|| {
                Error::numerical(format!("bubble {} survived one order but not the other", ba.label))
            })?;
        worst = worst.max(sup_distance(&ba.curve, &bb.curve));
    }
    Ok(worst)
}
