use serde::{Deserialize, Serialize};

use crate::geometry::{BubbleSystem, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// One bubble pinched into two.
    Breakup,
    /// A bubble drained below the resolution threshold and was removed;
    /// the location is its contraction point.
    Disappearance,
    /// The boundary formed (or was about to form) a cusp.
    Cusp,
}

/// Topological or regularity transition during a run. Events happen at
/// left-closed times: the stored system at the event time is the
/// post-transition state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub location: Point,
    /// Bubbles involved: [parent, child, child] for a breakup, [bubble] for
    /// a disappearance or cusp.
    pub labels: Vec<u32>,
}

/// Driving-potential values at the caller's probe points at one instant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeSample {
    pub time: f64,
    pub phi: Vec<f64>,
}

/// Per-bubble boundary potential constants at one instant (all zero in free
/// mode, solved values in regulated mode).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantSample {
    pub time: f64,
    pub labels: Vec<u32>,
    pub phi: Vec<f64>,
}

/// Complete record of one contraction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    /// Time-ordered saved states: initial, every stride-th step, states
    /// bracketing each event, and final.
    pub snapshots: Vec<BubbleSystem>,
    pub events: Vec<Event>,
    pub probe_points: Vec<Point>,
    /// One sample per accepted step plus the final state.
    pub probe_log: Vec<ProbeSample>,
    pub constants: Vec<ConstantSample>,
    /// Elapsed time actually integrated.
    pub total_time: f64,
    /// Nominal complete-extraction time: initial area over total rate
    /// (infinity if the schedule never drains the system).
    pub t_star: f64,
}

impl Trajectory {
    pub fn final_system(&self) -> &BubbleSystem {
        self.snapshots.last().expect("trajectory keeps at least the initial state")
    }

    pub fn initial_system(&self) -> &BubbleSystem {
        self.snapshots.first().expect("trajectory keeps at least the initial state")
    }

    pub fn events_of_kind(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }

    /// Latest snapshot taken at or before t (falls back to the first).
    pub fn snapshot_at(&self, t: f64) -> &BubbleSystem {
        let mut best = &self.snapshots[0];
        for s in &self.snapshots {
            if s.time <= t {
                best = s;
            } else {
                break;
            }
        }
        best
    }
}

/// Why a regulated run stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RegulatedOutcome {
    /// Both bubbles reached the vanish threshold in the same step.
    Completed { time: f64 },
    /// One bubble drained while the other stayed alive.
    BubbleVanished { label: u32, time: f64 },
    /// The boundary formed a cusp (or the bubbles came into near contact);
    /// continuation is ill-posed, so the run stops here.
    Cusp { location: Point, time: f64 },
    /// The schedule ran out with both bubbles still alive.
    StrategyExhausted { time: f64 },
}

impl RegulatedOutcome {
    pub fn time(&self) -> f64 {
        match *self {
            RegulatedOutcome::Completed { time }
            | RegulatedOutcome::BubbleVanished { time, .. }
            | RegulatedOutcome::Cusp { time, .. }
            | RegulatedOutcome::StrategyExhausted { time } => time,
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, RegulatedOutcome::Cusp { .. })
    }
}
