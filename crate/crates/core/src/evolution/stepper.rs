use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::evolution::flux::{FluxSpec, RunOptions, Strategy};
use crate::evolution::solver::{solve_field, FieldSolution};
use crate::evolution::trajectory::{
    ConstantSample, Event, EventKind, ProbeSample, RegulatedOutcome, Trajectory,
};
use crate::geometry::point::closest_on_segment;
use crate::geometry::{
    split_on_pinch, BoundaryCurve, Bubble, BubbleSystem, Point, CUSP_SHARPNESS_THRESHOLD,
};

/// Working vertex spacing as a fraction of sqrt(initial total area);
/// pinned once per run so thresholds do not drift as bubbles shrink.
pub const GRID_FRACTION: f64 = 0.01;
/// Step bound: dt <= STEP_SAFETY * spacing / max boundary speed.
const STEP_SAFETY: f64 = 0.2;
/// Rejected steps retry with dt/2 at most this many times.
const MAX_HALVINGS: u32 = 10;
/// A run records at most this many events (finiteness guard).
const EVENT_CAP: usize = 64;
/// Hard cap on accepted steps per run.
const MAX_STEPS: usize = 400_000;
/// Sharpness must fall back below this before the cusp detector re-arms.
pub const CUSP_REARM_LEVEL: f64 = 25.0;
/// Condition-estimate growth over the run-start baseline that also signals
/// an impending cusp (second, independent detector channel).
const CONDITION_GROWTH_LIMIT: f64 = 1e3;

/// Vertex spacing used for a system of this total area.
pub fn grid_scale(total_area: f64) -> f64 {
    GRID_FRACTION * total_area.abs().sqrt()
}

/// Area below which a bubble is beneath discretization resolution and is
/// removed (its centroid is the recorded contraction point).
pub fn vanish_area(h: f64) -> f64 {
    (3.0 * h) * (3.0 * h)
}

enum Reject {
    Retry(&'static str),
    Fatal(Error),
}

/// Move every vertex of `base` along the velocity field sampled on
/// `field_state` (same topology) for time dt. Returns None on non-finite
/// coordinates so the caller can reject and halve.
fn advance_from(
    base: &BubbleSystem,
    field_state: &BubbleSystem,
    sol: &FieldSolution,
    dt: f64,
) -> Option<BubbleSystem> {
    let mut bubbles = Vec::with_capacity(base.bubbles.len());
    for (i, b) in base.bubbles.iter().enumerate() {
        let v = sol.normal_velocity(i);
        let normals = field_state.bubbles[i].curve.vertex_normals();
        let pts = b.curve.points();
        debug_assert_eq!(pts.len(), v.len());
        let mut new_pts = Vec::with_capacity(pts.len());
        for k in 0..pts.len() {
            let p = pts[k] + normals[k] * (v[k] * dt);
            if !p.x.is_finite() || !p.y.is_finite() {
                return None;
            }
            new_pts.push(p);
        }
        bubbles.push(Bubble {
            label: b.label,
            curve: BoundaryCurve::unchecked(new_pts),
        });
    }
    Some(BubbleSystem {
        bubbles,
        time: base.time + dt,
    })
}

/// One explicit-midpoint step: advance, project per-bubble areas onto the
/// prescribed drain exactly, resample survivors back to spacing h.
///
/// The area projection (a similarity rescale about each centroid) replaces
/// the O(dt^2) integrator area error with the exact law
/// area(t + dt) = area(t) - q_i dt, which keeps long runs on the mass
/// budget without adaptive-order machinery.
/// Clip fold artifacts: drop a vertex whose two edges double back on each
/// other (turn within ~11 degrees of a full reversal) or whose edge has
/// collapsed to zero length. Screened corners left behind by surgery shed
/// such filaments; they enclose no resolvable area but poison the spline
/// resample. Resolved geometry never turns this hard at one vertex, so the
/// test is scale-free and cannot trigger on genuine features.
fn despike(curve: &BoundaryCurve) -> Result<BoundaryCurve> {
    const REVERSAL_COS: f64 = -0.98;
    let mut pts: Vec<Point> = curve.points().to_vec();
    let mut removed = false;
    'scan: loop {
        let n = pts.len();
        if n <= 8 {
            break;
        }
        for k in 0..n {
            let a = pts[(k + n - 1) % n];
            let b = pts[k];
            let c = pts[(k + 1) % n];
            let e1 = b - a;
            let e2 = c - b;
            let (l1, l2) = (e1.norm(), e2.norm());
            if l1 == 0.0 || l2 == 0.0 || e1.dot(e2) < REVERSAL_COS * l1 * l2 {
                pts.remove(k);
                removed = true;
                continue 'scan;
            }
        }
        break;
    }
    if !removed {
        return Ok(curve.clone());
    }
    BoundaryCurve::new_fast(pts)
}

fn attempt_step(
    sys: &BubbleSystem,
    sol_start: &FieldSolution,
    flux: &FluxSpec,
    dt: f64,
    h: f64,
) -> std::result::Result<BubbleSystem, Reject> {
    let half = advance_from(sys, sys, sol_start, 0.5 * dt)
        .ok_or(Reject::Retry("non-finite half-step geometry"))?;
    for b in &half.bubbles {
        if b.curve.area() <= 0.0 {
            return Err(Reject::Retry("half-step inverted a boundary"));
        }
    }
    let sol_mid = match solve_field(&half, flux) {
        Ok(s) => s,
        // transient mid-step geometry; a shorter step may stay clear
        Err(_) => return Err(Reject::Retry("mid-step field solve failed")),
    };
    let mut cand = advance_from(sys, &half, &sol_mid, dt)
        .ok_or(Reject::Retry("non-finite step geometry"))?;

    // per-bubble drain rates for the projection
    let nb = sys.bubbles.len();
    let rates: Vec<f64> = match *flux {
        FluxSpec::Regulated { q1, q2 } => vec![q1, q2],
        FluxSpec::Free { q } => {
            let total: f64 = sol_mid.fluxes.iter().sum();
            if total.abs() > 0.0 {
                sol_mid.fluxes.iter().map(|f| f * (q / total)).collect()
            } else {
                vec![0.0; nb]
            }
        }
    };

    let floor = 1e-4 * h * h;
    let vanish = vanish_area(h);
    for i in 0..nb {
        cand.bubbles[i].curve = despike(&cand.bubbles[i].curve).map_err(Reject::Fatal)?;
        let current = cand.bubbles[i].curve.area();
        if !(current > 0.0) {
            return Err(Reject::Retry("step inverted a boundary"));
        }
        let target = (sys.bubbles[i].curve.area() - rates[i] * dt).max(floor);
        let scale = (target / current).sqrt();
        let c = cand.bubbles[i].curve.centroid();
        cand.bubbles[i].curve = cand.bubbles[i]
            .curve
            .transformed(|p| c + (p - c) * scale);
        // keep below-resolution bubbles as raw polygons; the caller removes
        // them (resampling needs a perimeter of several spacings)
        if target >= vanish {
            match cand.bubbles[i].curve.resample(h) {
                Ok(r) => cand.bubbles[i].curve = r,
                Err(e) => return Err(Reject::Fatal(e)),
            }
        }
    }

    for b in &cand.bubbles {
        if b.curve.validate(true).is_err() {
            return Err(Reject::Retry("boundary self-intersects after the step"));
        }
    }
    if cand.validate().is_err() {
        return Err(Reject::Retry("bubbles collided or nested after the step"));
    }
    Ok(cand)
}

/// Advance a valid system by one explicit-midpoint step of size dt.
///
/// dt must respect the stability bound 0.2 h / max|v| for the system's own
/// grid scale h; the step is rejected (not retried) on geometric violation.
/// Bubbles that end below the vanish threshold survive un-resampled so the
/// caller can apply its removal policy.
pub fn step(system: &BubbleSystem, flux: &FluxSpec, dt: f64) -> Result<BubbleSystem> {
    system.validate()?;
    flux.validate()?;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::validation(format!("dt must be positive and finite, got {dt}")));
    }
    let h = grid_scale(system.total_area());
    let sol = solve_field(system, flux)?;
    let speed = sol.max_speed();
    if speed > 0.0 && dt > STEP_SAFETY * h / speed * (1.0 + 1e-9) {
        return Err(Error::validation(format!(
            "dt = {dt:.3e} exceeds the stability bound {:.3e}",
            STEP_SAFETY * h / speed
        )));
    }
    match attempt_step(system, &sol, flux, dt, h) {
        Ok(s) => Ok(s),
        Err(Reject::Retry(msg)) => Err(Error::numerical(format!("step rejected: {msg}"))),
        Err(Reject::Fatal(e)) => Err(e),
    }
}

/// Two-channel cusp detector with hysteresis. The curvature channel fires
/// per bubble when max |kappa| * sqrt(area/pi) crosses the sharpness
/// threshold; it re-arms only after the bubble smooths back below the lower
/// level. The condition channel fires once per run on a thousandfold growth
/// of the solve's condition estimate.
struct CuspMonitor {
    armed: HashMap<u32, bool>,
    baseline_condition: Option<f64>,
    condition_fired: bool,
}

struct CuspSignal {
    label: u32,
    location: Point,
}

impl CuspMonitor {
    fn new() -> CuspMonitor {
        CuspMonitor {
            armed: HashMap::new(),
            baseline_condition: None,
            condition_fired: false,
        }
    }

    fn observe(&mut self, sys: &BubbleSystem, condition: f64) -> Vec<CuspSignal> {
        let base = *self.baseline_condition.get_or_insert(condition);
        let mut fired = Vec::new();
        let mut sharpest: Option<(f64, CuspSignal)> = None;
        for b in &sys.bubbles {
            let feature = (b.curve.area() / std::f64::consts::PI).sqrt();
            let kappa = b.curve.curvature();
            let (mut max_k, mut arg) = (0.0f64, 0usize);
            for (k, &x) in kappa.iter().enumerate() {
                if x.abs() > max_k {
                    max_k = x.abs();
                    arg = k;
                }
            }
            let sharpness = max_k * feature;
            let location = b.curve.vertex(arg);
            let armed = self.armed.entry(b.label).or_insert(true);
            if *armed && sharpness > CUSP_SHARPNESS_THRESHOLD {
                *armed = false;
                fired.push(CuspSignal { label: b.label, location });
            } else if !*armed && sharpness < CUSP_REARM_LEVEL {
                *armed = true;
            }
            match &sharpest {
                Some((s, _)) if *s >= sharpness => {}
                _ => sharpest = Some((sharpness, CuspSignal { label: b.label, location })),
            }
        }
        if !self.condition_fired && condition > CONDITION_GROWTH_LIMIT * base {
            self.condition_fired = true;
            if fired.is_empty() {
                if let Some((_, sig)) = sharpest {
                    fired.push(sig);
                }
            }
        }
        fired
    }
}

/// Closest approach between two boundaries: (gap, midpoint of the
/// realizing pair).
fn closest_approach(a: &BoundaryCurve, b: &BoundaryCurve) -> (f64, Point) {
    let mut best = (f64::INFINITY, Point { x: 0.0, y: 0.0 });
    let scan = |from: &BoundaryCurve, to: &BoundaryCurve, best: &mut (f64, Point)| {
        let tp = to.points();
        let n = tp.len();
        for &p in from.points() {
            for k in 0..n {
                let (cp, _) = closest_on_segment(p, tp[k], tp[(k + 1) % n]);
                let d = p.dist(cp);
                if d < best.0 {
                    *best = (d, (p + cp) * 0.5);
                }
            }
        }
    };
    scan(a, b, &mut best);
    scan(b, a, &mut best);
    best
}

struct RunState {
    sys: BubbleSystem,
    traj: Trajectory,
    monitor: CuspMonitor,
    h: f64,
    stride: usize,
    steps_since_snapshot: usize,
    accepted: usize,
}

impl RunState {
    fn new(initial: BubbleSystem, h: f64, t_star: f64, opts: &RunOptions) -> RunState {
        let traj = Trajectory {
            snapshots: vec![initial.clone()],
            events: Vec::new(),
            probe_points: opts.probes.clone(),
            probe_log: Vec::new(),
            constants: Vec::new(),
            total_time: 0.0,
            t_star,
        };
        RunState {
            sys: initial,
            traj,
            monitor: CuspMonitor::new(),
            h,
            stride: opts.stride(),
            steps_since_snapshot: 0,
            accepted: 0,
        }
    }

    fn log_field(&mut self, sol: &FieldSolution) {
        let t = self.sys.time;
        if !self.traj.probe_points.is_empty() {
            let phi = self.traj.probe_points.iter().map(|&p| sol.phi_at(p)).collect();
            self.traj.probe_log.push(ProbeSample { time: t, phi });
        }
        self.traj.constants.push(ConstantSample {
            time: t,
            labels: (0..sol.n_bubbles()).map(|i| sol.label(i)).collect(),
            phi: sol.constants.clone(),
        });
    }

    fn push_event(&mut self, kind: EventKind, location: Point, labels: Vec<u32>) -> Result<()> {
        self.traj.events.push(Event {
            time: self.sys.time,
            kind,
            location,
            labels,
        });
        if self.traj.events.len() > EVENT_CAP {
            return Err(Error::numerical(format!(
                "more than {EVENT_CAP} events in one run; refusing to continue gluing"
            )));
        }
        Ok(())
    }

    /// Keep the current state if it is due by stride, or unconditionally
    /// (events, final state).
    fn snapshot(&mut self, force: bool) {
        if force || self.steps_since_snapshot >= self.stride {
            self.traj.snapshots.push(self.sys.clone());
            self.steps_since_snapshot = 0;
        }
    }

    /// Remove bubbles below the vanish threshold, recording disappearance
    /// events at their centroids. Returns the removed labels.
    fn vanish_sweep(&mut self) -> Result<Vec<u32>> {
        let vanish = vanish_area(self.h);
        let mut removed = Vec::new();
        loop {
            let idx = self
                .sys
                .bubbles
                .iter()
                .position(|b| b.curve.area() < vanish);
            let Some(i) = idx else { break };
            let b = self.sys.bubbles.remove(i);
            let c = b.curve.centroid();
            removed.push(b.label);
            self.push_event(EventKind::Disappearance, c, vec![b.label])?;
        }
        Ok(removed)
    }

    /// Split any bubble whose boundary pinches below clearance 2h. Children
    /// get fresh labels (larger child first) and are resampled. Returns true
    /// if a split happened.
    fn pinch_sweep(&mut self) -> Result<bool> {
        let clearance = 2.0 * self.h;
        for i in 0..self.sys.bubbles.len() {
            let parts = split_on_pinch(&self.sys.bubbles[i].curve, clearance)?;
            if parts.len() < 2 {
                continue;
            }
            let parent = self.sys.bubbles[i].label;
            let mut parts = parts;
            parts.sort_by(|a, b| b.area().partial_cmp(&a.area()).unwrap());
            let (_, location) = closest_approach(&parts[0], &parts[1]);
            let first = self.sys.next_label();
            let vanish = vanish_area(self.h);
            let mut children = Vec::new();
            for (k, c) in parts.into_iter().enumerate() {
                let c = despike(&c)?;
                let curve = if c.area() >= vanish { c.resample(self.h)? } else { c };
                children.push(Bubble {
                    label: first + k as u32,
                    curve,
                });
            }
            let labels = vec![parent, children[0].label, children[1].label];
            self.sys.bubbles.remove(i);
            self.sys.bubbles.extend(children);
            self.push_event(EventKind::Breakup, location, labels)?;
            return Ok(true);
        }
        Ok(false)
    }
}

fn resample_initial(initial: &BubbleSystem, h: f64) -> Result<BubbleSystem> {
    let vanish = vanish_area(h);
    let mut sys = initial.clone();
    for b in &mut sys.bubbles {
        if b.curve.area() >= vanish {
            b.curve = b.curve.resample(h)?;
        }
    }
    Ok(sys)
}

/// Pick dt from the stability bound, clipped so the step ends exactly at
/// the next stopping time.
fn propose_dt(h: f64, max_speed: f64, remaining: f64) -> f64 {
    let cfl = if max_speed > 0.0 {
        STEP_SAFETY * h / max_speed
    } else {
        f64::INFINITY
    };
    cfl.min(remaining)
}

fn step_with_halving(state: &RunState, sol: &FieldSolution, flux: &FluxSpec, dt0: f64) -> Result<(BubbleSystem, f64)> {
    let mut dt = dt0;
    let mut halvings = 0;
    loop {
        match attempt_step(&state.sys, sol, flux, dt, state.h) {
            Ok(s) => return Ok((s, dt)),
            Err(Reject::Retry(_)) => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(Error::StepUnderflow {
                        t: state.sys.time,
                        dt,
                    });
                }
                dt *= 0.5;
            }
            Err(Reject::Fatal(e)) => return Err(e),
        }
    }
}

/// Free contraction from `initial` at total rate q until t_end (at most the
/// complete-extraction time), gluing weak-solution transitions: pinches
/// split bubbles with fresh labels, sub-resolution bubbles disappear at
/// their contraction points, cusps are recorded and the run continues
/// (free boundaries re-smooth).
pub fn run_free(
    initial: &BubbleSystem,
    q: f64,
    t_end: f64,
    opts: &RunOptions,
) -> Result<Trajectory> {
    initial.validate()?;
    if !q.is_finite() || q <= 0.0 {
        return Err(Error::validation(format!("free rate must be positive, got {q}")));
    }
    let s0 = initial.total_area();
    let t0 = initial.time;
    let t_star = t0 + s0 / q;
    if !t_end.is_finite() || t_end <= t0 {
        return Err(Error::validation(format!(
            "t_end = {t_end} must exceed the initial time {t0}"
        )));
    }
    if t_end > t_star + 1e-9 * (s0 / q) {
        return Err(Error::validation(format!(
            "t_end = {t_end} exceeds the complete-extraction time {t_star}"
        )));
    }

    let gf = opts.grid();
    if !gf.is_finite() || gf <= 0.0 || gf > 0.1 {
        return Err(Error::validation(format!(
            "grid fraction must be in (0, 0.1], got {gf}"
        )));
    }
    let h = gf * s0.sqrt();
    let flux = FluxSpec::Free { q };
    let sys = resample_initial(initial, h)?;
    let mut state = RunState::new(sys, h, t_star, opts);
    // initial data below resolution vanishes immediately
    state.vanish_sweep()?;
    let t_eps = 1e-12 * t_end.abs().max(1.0);

    while !state.sys.bubbles.is_empty() && state.sys.time < t_end - t_eps {
        if state.accepted >= MAX_STEPS {
            return Err(Error::numerical("accepted-step cap exceeded"));
        }
        let sol = solve_field(&state.sys, &flux)?;
        state.log_field(&sol);
        let dt = propose_dt(h, sol.max_speed(), t_end - state.sys.time);
        let (next, _) = step_with_halving(&state, &sol, &flux, dt)?;
        state.sys = next;
        state.accepted += 1;
        state.steps_since_snapshot += 1;

        // surgery sweeps run to a fixed point: a split can expose a child
        // that is itself below resolution
        let mut surgered = false;
        loop {
            if state.pinch_sweep()? {
                surgered = true;
                continue;
            }
            if !state.vanish_sweep()?.is_empty() {
                surgered = true;
                continue;
            }
            break;
        }

        if !state.sys.bubbles.is_empty() {
            let cusps = state.monitor.observe(&state.sys, sol.condition);
            for c in cusps {
                state.push_event(EventKind::Cusp, c.location, vec![c.label])?;
                surgered = true;
            }
        }
        state.snapshot(surgered);
    }

    if !state.sys.bubbles.is_empty() {
        if let Ok(sol) = solve_field(&state.sys, &flux) {
            state.log_field(&sol);
        }
        state.snapshot(true);
    }
    state.traj.total_time = state.sys.time - t0;
    Ok(state.traj)
}

/// Regulated contraction of exactly two bubbles under a piecewise-constant
/// rate schedule. No topological transitions are admitted in this regime:
/// a pinch is an error, a cusp (or near contact between the bubbles,
/// which is about to become one) stops the run with a cusp outcome, and a
/// single disappearance stops it with bubble_vanished.
pub fn run_regulated(
    initial: &BubbleSystem,
    strategy: &Strategy,
    opts: &RunOptions,
) -> Result<(Trajectory, RegulatedOutcome)> {
    initial.validate()?;
    strategy.validate()?;
    if initial.bubbles.len() != 2 {
        return Err(Error::validation(format!(
            "regulated contraction needs exactly two bubbles, got {}",
            initial.bubbles.len()
        )));
    }
    let t0 = initial.time;
    if t0 < 0.0 || t0 >= strategy.end_time() {
        return Err(Error::validation(format!(
            "initial time {t0} is outside the strategy horizon"
        )));
    }
    let areas = initial.areas();
    let (v1, v2) = strategy.volumes_between(t0, strategy.end_time());
    if v1 > areas[0] * (1.0 + 1e-9) || v2 > areas[1] * (1.0 + 1e-9) {
        return Err(Error::validation(format!(
            "strategy volumes ({v1:.6e}, {v2:.6e}) exceed initial areas ({:.6e}, {:.6e})",
            areas[0], areas[1]
        )));
    }

    let s0 = initial.total_area();
    let gf = opts.grid();
    if !gf.is_finite() || gf <= 0.0 || gf > 0.1 {
        return Err(Error::validation(format!(
            "grid fraction must be in (0, 0.1], got {gf}"
        )));
    }
    let h = gf * s0.sqrt();
    let t_star = strategy.drain_time(t0, s0).unwrap_or(f64::INFINITY);
    let sys = resample_initial(initial, h)?;
    let mut state = RunState::new(sys, h, t_star, opts);
    let t_end = strategy.end_time();
    let t_eps = 1e-12 * t_end.abs().max(1.0);
    let vanish = vanish_area(h);

    let outcome = loop {
        let t = state.sys.time;
        if t >= t_end - t_eps {
            break RegulatedOutcome::StrategyExhausted { time: t };
        }
        if state.accepted >= MAX_STEPS {
            return Err(Error::numerical("accepted-step cap exceeded"));
        }
        let Some((q1, q2)) = strategy.rate_at(t) else {
            break RegulatedOutcome::StrategyExhausted { time: t };
        };
        let flux = FluxSpec::Regulated { q1, q2 };

        // near contact: the forming structure is a cusp directed into the
        // gap; regulated continuation past it is ill-posed
        let (gap, gap_mid) = closest_approach(
            &state.sys.bubbles[0].curve,
            &state.sys.bubbles[1].curve,
        );
        if gap < 2.0 * h {
            let labels: Vec<u32> = state.sys.bubbles.iter().map(|b| b.label).collect();
            state.push_event(EventKind::Cusp, gap_mid, labels)?;
            state.snapshot(true);
            break RegulatedOutcome::Cusp {
                location: gap_mid,
                time: t,
            };
        }

        let sol = solve_field(&state.sys, &flux)?;
        state.log_field(&sol);
        let stop = strategy
            .next_breakpoint_after(t)
            .map_or(t_end, |b| b.min(t_end));
        let dt = propose_dt(h, sol.max_speed(), stop - t);
        let (next, _) = step_with_halving(&state, &sol, &flux, dt)?;
        state.sys = next;
        state.accepted += 1;
        state.steps_since_snapshot += 1;

        // breakup is excluded by assumption in this regime
        let clearance = 2.0 * h;
        for b in &state.sys.bubbles {
            if split_on_pinch(&b.curve, clearance)?.len() > 1 {
                return Err(Error::numerical(format!(
                    "bubble {} pinched during regulated contraction; breakup is excluded in this regime",
                    b.label
                )));
            }
        }

        let below: Vec<u32> = state
            .sys
            .bubbles
            .iter()
            .filter(|b| b.curve.area() < vanish)
            .map(|b| b.label)
            .collect();
        if below.len() == 2 {
            let t_now = state.sys.time;
            state.vanish_sweep()?;
            state.snapshot(true);
            break RegulatedOutcome::Completed { time: t_now };
        }
        if below.len() == 1 {
            let t_now = state.sys.time;
            state.vanish_sweep()?;
            state.snapshot(true);
            break RegulatedOutcome::BubbleVanished {
                label: below[0],
                time: t_now,
            };
        }

        let cusps = state.monitor.observe(&state.sys, sol.condition);
        if let Some(c) = cusps.into_iter().next() {
            state.push_event(EventKind::Cusp, c.location, vec![c.label])?;
            state.snapshot(true);
            break RegulatedOutcome::Cusp {
                location: c.location,
                time: state.sys.time,
            };
        }
        state.snapshot(false);
    };

    if state.sys.bubbles.len() == 2 {
        if let Some((q1, q2)) = strategy.rate_at(state.sys.time) {
            if let Ok(sol) = solve_field(&state.sys, &FluxSpec::Regulated { q1, q2 }) {
                state.log_field(&sol);
            }
        }
        state.snapshot(true);
    }
    state.traj.total_time = state.sys.time - t0;
    Ok((state.traj, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{disk_curve, ellipse_curve, pt};
    use std::f64::consts::PI;

    #[test]
    fn one_step_circle_obeys_the_area_law() {
        let r = 1.0;
        let q = 1.0;
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), r, 256)]).unwrap();
        let dt = 1e-3;
        let next = step(&sys, &FluxSpec::Free { q }, dt).unwrap();
        let expect = PI * r * r - q * dt;
        let got = next.total_area();
        assert!(
            ((got - expect) / expect).abs() < 1e-6,
            "area {got}, expect {expect}"
        );
        assert_eq!(next.time, dt);
        // still a circle: radius spread stays tiny
        let c = next.bubbles[0].curve.centroid();
        let radii: Vec<f64> = next.bubbles[0].curve.points().iter().map(|p| p.dist(c)).collect();
        let rmin = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        let rmax = radii.iter().cloned().fold(0.0f64, f64::max);
        assert!(rmax - rmin < 1e-4 * r);
    }

    #[test]
    fn step_rejects_dt_beyond_the_stability_bound() {
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 128)]).unwrap();
        let err = step(&sys, &FluxSpec::Free { q: 1.0 }, 1.0).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn regulated_zero_flux_bubble_keeps_its_area() {
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(-2.0, 0.0), 1.0, 200),
            disk_curve(pt(2.0, 0.0), 1.0, 200),
        ])
        .unwrap();
        let a2 = sys.bubbles[1].curve.area();
        let dt = 2e-3;
        let next = step(&sys, &FluxSpec::Regulated { q1: 1.0, q2: 0.0 }, dt).unwrap();
        let b2 = next.bubbles[1].curve.area();
        assert!(((b2 - a2) / a2).abs() < 1e-6, "area drifted: {a2} -> {b2}");
        let b1 = next.bubbles[0].curve.area();
        assert!(((b1 - (a2 - dt)) / a2).abs() < 1e-6);
    }

    /// Axis-aligned semi-axes recovered from the polygon's second moments
    /// (exact for an ellipse: Ixx/S = a^2/4, Iyy/S = b^2/4).
    fn moment_axes(curve: &BoundaryCurve) -> (f64, f64) {
        let c = curve.centroid();
        let pts = curve.points();
        let n = pts.len();
        let (mut s, mut ixx, mut iyy) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let p = pts[i] - c;
            let q = pts[(i + 1) % n] - c;
            let cr = p.cross(q);
            s += cr * 0.5;
            ixx += cr * (p.x * p.x + p.x * q.x + q.x * q.x) / 12.0;
            iyy += cr * (p.y * p.y + p.y * q.y + q.y * q.y) / 12.0;
        }
        (2.0 * (ixx / s).sqrt(), 2.0 * (iyy / s).sqrt())
    }

    #[test]
    fn ellipse_stays_elliptical_under_free_suction() {
        let sys = BubbleSystem::new(vec![ellipse_curve(pt(0.0, 0.0), 2.0, 1.0, 256)]).unwrap();
        let q = 1.0;
        let t_end = 0.5;
        let traj = run_free(&sys, q, t_end, &RunOptions::default()).unwrap();
        let last = traj.final_system();
        assert_eq!(last.bubbles.len(), 1);
        let curve = &last.bubbles[0].curve;
        // aspect ratio is a contraction invariant for an ellipse
        let (a, b) = moment_axes(curve);
        assert!(
            (a / b - 2.0).abs() < 5e-3,
            "aspect drifted to {}",
            a / b
        );
        // every vertex sits on the moment-fitted ellipse: normalized radius
        // deviation below 1e-3 of the (normalized) diameter
        let c = curve.centroid();
        for p in curve.points() {
            let d = *p - c;
            let rho = ((d.x / a).powi(2) + (d.y / b).powi(2)).sqrt();
            assert!((rho - 1.0).abs() < 2e-3, "vertex off the ellipse: rho = {rho}");
        }
        // area law held over the run
        let expect = sys.total_area() - q * t_end;
        assert!((last.total_area() - expect).abs() < 1e-4 * sys.total_area());
    }

    #[test]
    fn unit_disk_drains_to_a_central_disappearance() {
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 64)]).unwrap();
        let traj = run_free(&sys, 1.0, PI, &RunOptions::coarse(0.02)).unwrap();
        assert!(traj.final_system().bubbles.is_empty());
        assert_eq!(traj.events.len(), 1, "events: {:?}", traj.events);
        let e = &traj.events[0];
        assert_eq!(e.kind, EventKind::Disappearance);
        // the bubble is removed once its area falls below the vanish
        // threshold, slightly before the exact extinction time
        let vanish = vanish_area(0.02 * PI.sqrt());
        assert!(e.time <= PI && e.time > PI - vanish - 0.02, "vanish at {}", e.time);
        assert!(e.location.norm() < 0.05, "contraction point {:?}", e.location);
        // snapshot areas strictly decrease
        for w in traj.snapshots.windows(2) {
            assert!(w[1].total_area() < w[0].total_area());
        }
        // probe-free run still logs constants every accepted step
        assert!(traj.constants.len() > 30);
        assert!((traj.t_star - PI).abs() < 1e-12);
    }

    #[test]
    fn smaller_of_two_disks_disappears_first() {
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(0.0, 0.0), 1.0, 64),
            disk_curve(pt(3.0, 0.0), 0.5, 64),
        ])
        .unwrap();
        let t_star = sys.total_area(); // q = 1
        let traj = run_free(&sys, 1.0, t_star, &RunOptions::coarse(0.02)).unwrap();
        let disappearances: Vec<&Event> =
            traj.events_of_kind(EventKind::Disappearance).collect();
        assert_eq!(disappearances.len(), 2);
        assert_eq!(disappearances[0].labels, vec![1], "smaller bubble first");
        assert_eq!(disappearances[1].labels, vec![0]);
        assert!(disappearances[0].time < disappearances[1].time);
        // small disk contracts near its own center
        assert!((disappearances[0].location - pt(3.0, 0.0)).norm() < 0.2);
    }

    #[test]
    fn equal_disks_regulated_completes_symmetrically() {
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(-2.0, 0.0), 1.0, 64),
            disk_curve(pt(2.0, 0.0), 1.0, 64),
        ])
        .unwrap();
        let strategy = Strategy::constant(1.0, 1.0, PI);
        let (traj, outcome) = run_regulated(&sys, &strategy, &RunOptions::coarse(0.02)).unwrap();
        match outcome {
            RegulatedOutcome::Completed { time } => {
                assert!((time - PI).abs() < 0.06, "completed at {time}");
            }
            other => panic!("expected completion, got {other:?}"),
        }
        assert_eq!(
            traj.events_of_kind(EventKind::Disappearance).count(),
            2
        );
        // contraction points stay mirror-symmetric
        let locs: Vec<Point> = traj
            .events_of_kind(EventKind::Disappearance)
            .map(|e| e.location)
            .collect();
        assert!((locs[0].x + locs[1].x).abs() < 1e-2);
        assert!(locs[0].y.abs() < 1e-2 && locs[1].y.abs() < 1e-2);
    }

    #[test]
    fn regulated_one_sided_extraction_vanishes_bubble_one() {
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(-2.0, 0.0), 1.0, 64),
            disk_curve(pt(2.0, 0.0), 1.0, 64),
        ])
        .unwrap();
        let strategy = Strategy::constant(1.0, 0.0, PI);
        let (traj, outcome) = run_regulated(&sys, &strategy, &RunOptions::coarse(0.02)).unwrap();
        match outcome {
            RegulatedOutcome::BubbleVanished { label, time } => {
                assert_eq!(label, 0);
                assert!(time <= PI && time > PI - 0.06, "vanished at {time}");
            }
            other => panic!("expected bubble_vanished, got {other:?}"),
        }
        // the untouched bubble keeps its area through the whole run
        let last = traj.final_system();
        assert_eq!(last.bubbles.len(), 1);
        assert_eq!(last.bubbles[0].label, 1);
        assert!((last.bubbles[0].curve.area() - PI).abs() < 1e-4 * PI);
    }

    #[test]
    fn strategy_exhaustion_reports_and_preserves_bubbles() {
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(-2.0, 0.0), 1.0, 64),
            disk_curve(pt(2.0, 0.0), 1.0, 64),
        ])
        .unwrap();
        let strategy = Strategy::constant(0.5, 0.5, 0.4);
        let (traj, outcome) = run_regulated(&sys, &strategy, &RunOptions::coarse(0.02)).unwrap();
        assert!(matches!(outcome, RegulatedOutcome::StrategyExhausted { .. }));
        let last = traj.final_system();
        assert_eq!(last.bubbles.len(), 2);
        let expect = 2.0 * PI - 0.4;
        assert!((last.total_area() - expect).abs() < 1e-4 * expect);
        assert!((last.time - 0.4).abs() < 1e-9);
    }

    #[test]
    fn probes_are_logged_every_step() {
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 64)]).unwrap();
        let mut opts = RunOptions::with_probes(vec![pt(2.0, 0.0), pt(0.0, 3.0)]);
        opts.grid_fraction = 0.02;
        let traj = run_free(&sys, 1.0, 1.0, &opts).unwrap();
        assert!(traj.probe_log.len() > 10);
        for w in traj.probe_log.windows(2) {
            assert!(w[1].time > w[0].time);
        }
        // disk: phi(p) = -(q/2pi) ln(|p|/R(t)) at probe 1; R shrinks, so
        // |phi| grows with time
        let first = traj.probe_log.first().unwrap().phi[0];
        let last = traj.probe_log.last().unwrap().phi[0];
        assert!(first < 0.0 && last < first);
        assert_eq!(traj.probe_log[0].phi.len(), 2);
    }

    #[test]
    fn free_run_rejects_overlong_horizon() {
        let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 64)]).unwrap();
        assert!(run_free(&sys, 1.0, PI + 0.1, &RunOptions::default()).is_err());
        assert!(run_free(&sys, -1.0, 1.0, &RunOptions::default()).is_err());
    }

    /// Symmetric barbell: width profile w(x) = (1-x^2)(neck + 1.2 x^2) on
    /// [-1, 1], sampled with cos-clustered abscissae.
    fn barbell(neck: f64, n: usize) -> BoundaryCurve {
        let mut pts = Vec::new();
        for i in 1..n {
            let phi = PI * i as f64 / n as f64;
            let x = phi.cos();
            let w = (1.0 - x * x) * (neck + 1.2 * x * x);
            pts.push(pt(x, w));
        }
        for i in 1..n {
            let phi = PI * i as f64 / n as f64;
            let x = -(phi.cos());
            let w = (1.0 - x * x) * (neck + 1.2 * x * x);
            pts.push(pt(x, -w));
        }
        BoundaryCurve::new_fast(pts).unwrap()
    }

    #[test]
    fn pinch_sweep_splits_and_relabels() {
        let curve = barbell(0.015, 400);
        assert!(curve.area() > 0.0);
        let sys = BubbleSystem {
            bubbles: vec![Bubble { label: 4, curve }],
            time: 3.0,
        };
        sys.validate().unwrap();
        let h = 0.02; // clearance 2h = 0.04 exceeds the 0.03 neck
        let mut state = RunState::new(sys, h, f64::INFINITY, &RunOptions::default());
        assert!(state.pinch_sweep().unwrap());
        assert_eq!(state.sys.bubbles.len(), 2);
        let labels: Vec<u32> = state.sys.bubbles.iter().map(|b| b.label).collect();
        assert!(labels.contains(&5) && labels.contains(&6), "labels {labels:?}");
        let e = &state.traj.events[0];
        assert_eq!(e.kind, EventKind::Breakup);
        assert_eq!(e.time, 3.0);
        assert_eq!(e.labels, vec![4, 5, 6]);
        assert!(e.location.norm() < 0.1, "pinch located at {:?}", e.location);
        // children sit on either side of the neck with comparable areas
        let a0 = state.sys.bubbles[0].curve.area();
        let a1 = state.sys.bubbles[1].curve.area();
        assert!((a0 / a1 - 1.0).abs() < 0.2);
        state.sys.validate().unwrap();
        // no further pinch
        assert!(!state.pinch_sweep().unwrap());
    }

    #[test]
    fn despike_clips_fold_artifacts_only() {
        let clean = disk_curve(pt(0.0, 0.0), 1.0, 64);
        let out = despike(&clean).unwrap();
        assert_eq!(out.len(), 64);
        assert_eq!(out.points(), clean.points());

        // graft an out-and-back filament onto one vertex: the boundary walks
        // a full spacing sideways and folds straight back through a base of
        // width 1e-5, the shape that stalls the spline resample
        let mut pts: Vec<Point> = clean.points().to_vec();
        let spike_at = 10usize;
        let base = pts[spike_at];
        let tip = base + pt(0.09, 0.0) * 1.0;
        pts.insert(spike_at + 1, base + pt(0.0, 1e-5));
        pts.insert(spike_at + 1, tip);
        let folded = BoundaryCurve::new_fast(pts).unwrap();
        assert!(folded.is_simple(), "out-and-back folds stay simple");
        let out = despike(&folded).unwrap();
        assert_eq!(out.len(), 65, "only the fold tip goes");
        // the surviving base vertex sits 1e-5 off the original ring
        assert!((out.area() - clean.area()).abs() < 1e-5);
        for p in out.points() {
            assert!(p.dist(tip) > 0.05, "tip vertex removed");
        }
        out.resample(0.1).unwrap().validate(true).unwrap();
    }

    #[test]
    fn vanish_sweep_removes_subresolution_bubbles() {
        let sys = BubbleSystem {
            bubbles: vec![
                Bubble {
                    label: 2,
                    curve: disk_curve(pt(0.0, 0.0), 1.0, 64),
                },
                Bubble {
                    label: 9,
                    curve: disk_curve(pt(2.0, 1.0), 0.02, 16),
                },
            ],
            time: 1.5,
        };
        let h = 0.02; // vanish threshold (3h)^2 = 3.6e-3 > pi (0.02)^2
        let mut state = RunState::new(sys, h, f64::INFINITY, &RunOptions::default());
        let removed = state.vanish_sweep().unwrap();
        assert_eq!(removed, vec![9]);
        assert_eq!(state.sys.bubbles.len(), 1);
        assert_eq!(state.sys.bubbles[0].label, 2);
        let e = &state.traj.events[0];
        assert_eq!(e.kind, EventKind::Disappearance);
        assert_eq!(e.labels, vec![9]);
        assert!((e.location - pt(2.0, 1.0)).norm() < 1e-6);
    }

    #[test]
    fn thin_neck_dumbbell_breaks_under_free_suction() {
        let curve = barbell(0.05, 600);
        let sys = BubbleSystem::new(vec![curve]).unwrap();
        let s0 = sys.total_area();
        // drain two thirds of the area; the waist must pinch well before
        let traj = run_free(&sys, 1.0, 0.66 * s0, &RunOptions::coarse(0.02)).unwrap();
        let breakup = traj
            .first_event(EventKind::Breakup)
            .expect("thin neck should pinch");
        assert!(breakup.location.norm() < 0.15, "pinch at {:?}", breakup.location);
        // after the split the system carries two bubbles until they drain
        let post = traj.snapshot_at(breakup.time + 1e-9);
        assert!(post.bubbles.len() >= 2);
        // area accounting still exact across surgery within the neck cutout
        let last = traj.final_system();
        if !last.bubbles.is_empty() {
            let expect = s0 - traj.total_time;
            let defect = (last.total_area() - expect).abs();
            assert!(defect < 5e-3 * s0, "area defect {defect:.3e}");
        }
    }

    #[test]
    fn regulated_rejects_overdraining_strategy() {
        let sys = BubbleSystem::new(vec![
            disk_curve(pt(-2.0, 0.0), 1.0, 64),
            disk_curve(pt(2.0, 0.0), 1.0, 64),
        ])
        .unwrap();
        let strategy = Strategy::constant(2.0, 0.0, PI); // drains 2 pi from a pi bubble
        assert!(run_regulated(&sys, &strategy, &RunOptions::default()).is_err());
    }
}
