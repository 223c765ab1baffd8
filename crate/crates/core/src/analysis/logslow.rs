use crate::analysis::greens::greens_ratio;
use crate::analysis::report::FitReport;
use crate::error::{Error, Result};
use crate::evolution::{EventKind, Trajectory};

/// Test the logarithmic slowdown of a bubble that contracts while another
/// keeps draining: with tau the time left until its disappearance at t', its
/// area and flux obey
///
///   A(tau) * ln(tau) / (2 n q tau ln b) -> 1
///   Q(tau) * ln(tau) / (2 n q ln b)     -> 1
///
/// where n is the degree of the contraction point, q the total pump rate,
/// and b the conformal ratio of the surviving domain seen from the
/// contraction point (never fitted; computed by `greens_ratio`). The verdict
/// passes when both ratios stay within 15% of 1 over the last decade of tau
/// that the samples resolve.
pub fn fit_logslow(traj: &Trajectory, label: u32, n: u32) -> Result<FitReport> {
    if n < 1 {
        return Err(Error::validation("degree n must be at least 1"));
    }
    let event = traj
        .events_of_kind(EventKind::Disappearance)
        .find(|e| e.labels.first() == Some(&label))
        .ok_or_else(|| Error::validation(format!("label {label} never disappears")))?;
    let t_prime = event.time;
    let p2 = event.location;

    let after = traj.snapshot_at(t_prime);
    let survivors = &after.bubbles;
    if survivors.len() != 1 {
        return Err(Error::validation(
            "slowdown law needs exactly one surviving bubble at the disappearance",
        ));
    }
    let b = greens_ratio(&survivors[0].curve, p2)?;
    let log_b = b.ln();

    let t0 = traj.initial_system().time;
    let q = traj.initial_system().total_area() / (traj.t_star - t0);

    // area samples of the labeled bubble, newest last
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for s in &traj.snapshots {
        if s.time >= t_prime {
            break;
        }
        if let Some(bu) = s.bubbles.iter().find(|b| b.label == label) {
            let tau = t_prime - s.time;
            if tau > 0.0 {
                samples.push((tau, bu.curve.area()));
            }
        }
    }
    samples.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    samples.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15);
    if samples.len() < 7 {
        return Err(Error::validation(
            "too few snapshots of the vanishing bubble; rerun with a smaller snapshot stride",
        ));
    }

    // last resolvable decade of tau
    let tau_lo = samples[0].0;
    let tau_hi = 10.0 * tau_lo;
    let decade: Vec<usize> = (0..samples.len())
        .filter(|&i| samples[i].0 <= tau_hi)
        .collect();
    if decade.len() < 5 {
        return Err(Error::validation(
            "fewer than five samples in the last decade of tau",
        ));
    }

    let scale = 2.0 * n as f64 * q * log_b;
    let mut history = Vec::new();
    let mut worst: f64 = 0.0;
    for &i in &decade {
        let (tau, area) = samples[i];
        let ratio_a = area * tau.ln() / (scale * tau);
        // centered flux estimate, one-sided at the ends of the record
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(samples.len() - 1);
        let flux = (samples[lo].1 - samples[hi].1) / (samples[hi].0 - samples[lo].0);
        let ratio_q = -flux * tau.ln() / scale;
        worst = worst.max((ratio_a - 1.0).abs()).max((ratio_q - 1.0).abs());
        history.push((tau, ratio_q - 1.0));
    }
    let verdict = worst < 0.15;
    let last = history.first().map(|h| h.1 + 1.0).unwrap_or(f64::NAN);
    Ok(FitReport {
        model: format!("logarithmic slowdown, degree {n}"),
        parameters: vec![
            ("b".into(), b),
            ("q".into(), q),
            ("worst_deviation".into(), worst),
            ("flux_ratio_at_smallest_tau".into(), last),
        ],
        residual_history: history,
        verdict,
    })
}
