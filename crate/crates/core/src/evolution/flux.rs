use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Suction regime for a field solve or a single step.
///
/// Free mode models one pump acting on the whole system: every boundary
/// component sits at the same pressure (potential constant 0) and only the
/// total flux is prescribed. Regulated mode drives exactly two bubbles with
/// independently prescribed fluxes, so the boundary constants become
/// unknowns of the solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FluxSpec {
    Free { q: f64 },
    Regulated { q1: f64, q2: f64 },
}

impl FluxSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        match *self {
            FluxSpec::Free { q } if !ok(q) => {
                Err(Error::validation(format!("free flux must be finite and >= 0, got {q}")))
            }
            FluxSpec::Regulated { q1, q2 } if !ok(q1) || !ok(q2) => Err(Error::validation(
                format!("regulated fluxes must be finite and >= 0, got ({q1}, {q2})"),
            )),
            _ => Ok(()),
        }
    }

    pub fn total(&self) -> f64 {
        match *self {
            FluxSpec::Free { q } => q,
            FluxSpec::Regulated { q1, q2 } => q1 + q2,
        }
    }

    pub fn is_regulated(&self) -> bool {
        matches!(self, FluxSpec::Regulated { .. })
    }
}

/// Piecewise-constant extraction schedule for a regulated run.
///
/// Interval `k` covers `[breakpoints[k-1], breakpoints[k])` (with an implied
/// start at time 0) and applies `rates[k] = (q1, q2)` to the two bubbles in
/// their initial order. Breakpoints are absolute times, strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub breakpoints: Vec<f64>,
    pub rates: Vec<(f64, f64)>,
}

impl Strategy {
    /// Single-interval schedule: extract at (q1, q2) until t_end.
    pub fn constant(q1: f64, q2: f64, t_end: f64) -> Strategy {
        Strategy {
            breakpoints: vec![t_end],
            rates: vec![(q1, q2)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.is_empty() {
            return Err(Error::validation("strategy must have at least one interval"));
        }
        if self.breakpoints.len() != self.rates.len() {
            return Err(Error::validation(format!(
                "strategy has {} breakpoints but {} rate pairs",
                self.breakpoints.len(),
                self.rates.len()
            )));
        }
        let mut prev = 0.0;
        for &b in &self.breakpoints {
            if !b.is_finite() || b <= prev {
                return Err(Error::validation(format!(
                    "breakpoints must be finite and strictly increasing from 0, got {b} after {prev}"
                )));
            }
            prev = b;
        }
        for &(q1, q2) in &self.rates {
            if !q1.is_finite() || !q2.is_finite() || q1 < 0.0 || q2 < 0.0 {
                return Err(Error::validation(format!(
                    "rates must be finite and nonnegative, got ({q1}, {q2})"
                )));
            }
            if q1 + q2 <= 0.0 {
                return Err(Error::validation(
                    "each interval must extract from at least one bubble (q1 + q2 > 0)",
                ));
            }
        }
        Ok(())
    }

    pub fn end_time(&self) -> f64 {
        *self.breakpoints.last().expect("validated strategy is nonempty")
    }

    /// Rates in force at time t, or None once the schedule is exhausted.
    pub fn rate_at(&self, t: f64) -> Option<(f64, f64)> {
        if t < 0.0 {
            return None;
        }
        for (k, &b) in self.breakpoints.iter().enumerate() {
            if t < b {
                return Some(self.rates[k]);
            }
        }
        None
    }

    /// First breakpoint strictly after t (step sizes are clipped to it so a
    /// single step never straddles a rate change).
    pub fn next_breakpoint_after(&self, t: f64) -> Option<f64> {
        self.breakpoints.iter().copied().find(|&b| b > t)
    }

    /// Total volume extracted from each bubble over the whole schedule.
    pub fn total_volumes(&self) -> (f64, f64) {
        self.volumes_between(0.0, self.end_time())
    }

    /// Volumes extracted from each bubble over [a, b], clipped to the
    /// schedule's intervals.
    pub fn volumes_between(&self, a: f64, b: f64) -> (f64, f64) {
        let mut v1 = 0.0;
        let mut v2 = 0.0;
        let mut prev = 0.0f64;
        for (k, &e) in self.breakpoints.iter().enumerate() {
            let lo = prev.max(a);
            let hi = e.min(b);
            if hi > lo {
                v1 += self.rates[k].0 * (hi - lo);
                v2 += self.rates[k].1 * (hi - lo);
            }
            prev = e;
        }
        (v1, v2)
    }

    /// Earliest time at which cumulative total extraction from t0 reaches
    /// `volume`, or None if the schedule ends first.
    pub fn drain_time(&self, t0: f64, volume: f64) -> Option<f64> {
        let mut acc = 0.0;
        let mut prev = 0.0f64;
        for (k, &e) in self.breakpoints.iter().enumerate() {
            let lo = prev.max(t0);
            if e > lo {
                let rate = self.rates[k].0 + self.rates[k].1;
                let seg = rate * (e - lo);
                if rate > 0.0 && acc + seg >= volume {
                    return Some(lo + (volume - acc) / rate);
                }
                acc += seg;
            }
            prev = e;
        }
        None
    }
}

/// Knobs shared by run_free and run_regulated.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Fixed locations where the driving potential is recorded at every
    /// accepted step (exterior points see the solved field, points inside a
    /// bubble see that bubble's boundary constant).
    pub probes: Vec<Point>,
    /// Keep a full boundary snapshot every this many accepted steps.
    /// 0 means the default of 8. Initial, final, and event-adjacent states
    /// are always kept.
    pub snapshot_stride: usize,
    /// Vertex spacing as a fraction of sqrt(initial total area); 0 means
    /// the production default. Coarser values trade fidelity for speed.
    pub grid_fraction: f64,
}

impl RunOptions {
    pub fn with_probes(probes: Vec<Point>) -> RunOptions {
        RunOptions {
            probes,
            ..RunOptions::default()
        }
    }

    pub fn coarse(grid_fraction: f64) -> RunOptions {
        RunOptions {
            grid_fraction,
            ..RunOptions::default()
        }
    }

    pub(crate) fn stride(&self) -> usize {
        if self.snapshot_stride == 0 {
            8
        } else {
            self.snapshot_stride
        }
    }

    pub(crate) fn grid(&self) -> f64 {
        if self.grid_fraction == 0.0 {
            crate::evolution::stepper::GRID_FRACTION
        } else {
            self.grid_fraction
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_intervals_and_volumes() {
        let s = Strategy {
            breakpoints: vec![1.0, 3.0],
            rates: vec![(1.0, 0.0), (0.5, 2.0)],
        };
        s.validate().unwrap();
        assert_eq!(s.rate_at(0.0), Some((1.0, 0.0)));
        assert_eq!(s.rate_at(0.999), Some((1.0, 0.0)));
        assert_eq!(s.rate_at(1.0), Some((0.5, 2.0)));
        assert_eq!(s.rate_at(3.0), None);
        assert_eq!(s.next_breakpoint_after(0.5), Some(1.0));
        assert_eq!(s.next_breakpoint_after(1.0), Some(3.0));
        assert_eq!(s.next_breakpoint_after(3.0), None);
        let (v1, v2) = s.total_volumes();
        assert!((v1 - 2.0).abs() < 1e-15);
        assert!((v2 - 4.0).abs() < 1e-15);
        assert_eq!(s.end_time(), 3.0);
    }

    #[test]
    fn strategy_rejects_bad_shapes() {
        assert!(Strategy { breakpoints: vec![], rates: vec![] }.validate().is_err());
        assert!(Strategy { breakpoints: vec![1.0], rates: vec![] }.validate().is_err());
        assert!(Strategy {
            breakpoints: vec![1.0, 1.0],
            rates: vec![(1.0, 0.0), (1.0, 0.0)],
        }
        .validate()
        .is_err());
        assert!(Strategy {
            breakpoints: vec![1.0],
            rates: vec![(-0.1, 1.0)],
        }
        .validate()
        .is_err());
        // an interval that extracts nothing would stall the contraction
        assert!(Strategy {
            breakpoints: vec![1.0],
            rates: vec![(0.0, 0.0)],
        }
        .validate()
        .is_err());
        Strategy::constant(1.0, 2.0, 5.0).validate().unwrap();
    }

    #[test]
    fn flux_spec_totals() {
        assert_eq!(FluxSpec::Free { q: 2.0 }.total(), 2.0);
        assert_eq!(FluxSpec::Regulated { q1: 1.0, q2: 0.5 }.total(), 1.5);
        assert!(FluxSpec::Free { q: -1.0 }.validate().is_err());
        assert!(FluxSpec::Regulated { q1: 1.0, q2: f64::NAN }.validate().is_err());
        FluxSpec::Free { q: 0.0 }.validate().unwrap();
    }
}
