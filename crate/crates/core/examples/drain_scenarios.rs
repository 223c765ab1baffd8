// Drives the evolution runners on three representative scenarios and prints
// what a consumer of the library would observe: event times, mass budgets,
// and solver health. Used as the smoke-drive for the public API.

use heleshaw::evolution::{EventKind, FluxSpec, RegulatedOutcome, RunOptions, Strategy};
use heleshaw::geometry::{disk_curve, pt, BubbleSystem, Point};
use heleshaw::{run_free, run_regulated, solve_field};

fn barbell(neck: f64, n: usize) -> heleshaw::geometry::BoundaryCurve {
    let w = |x: f64| (1.0 - x * x) * (neck + 1.2 * x * x);
    let mut pts: Vec<Point> = Vec::with_capacity(2 * n);
    for k in 0..n {
        let u = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let x = u.cos();
        pts.push(pt(x, w(x)));
    }
    for k in 0..n {
        let u = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
        let x = -u.cos();
        pts.push(pt(x, -w(x)));
    }
    heleshaw::geometry::BoundaryCurve::new(pts).expect("barbell profile is simple")
}

fn main() {
    // 1. instantaneous field on a unit disk: solver health check
    let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 256)]).unwrap();
    let sol = solve_field(&sys, &FluxSpec::Free { q: 1.0 }).unwrap();
    println!(
        "disk field: flux {:.6} condition {:.2e} boundary speed {:.6} (exact {:.6})",
        sol.fluxes[0],
        sol.condition,
        sol.max_speed(),
        1.0 / (2.0 * std::f64::consts::PI)
    );

    // 2. free drain of the unit disk to complete extraction
    let sys = BubbleSystem::new(vec![disk_curve(pt(0.0, 0.0), 1.0, 64)]).unwrap();
    let horizon = sys.total_area();
    let traj = run_free(&sys, 1.0, horizon, &RunOptions::coarse(0.02)).unwrap();
    let gone = traj
        .first_event(EventKind::Disappearance)
        .expect("disk should drain away");
    println!(
        "disk drain: disappearance at t={:.4} (complete-extraction time {:.4}), {} snapshots, {} field logs",
        gone.time,
        horizon,
        traj.snapshots.len(),
        traj.constants.len()
    );

    // 3. dumbbell breakup under free suction
    let sys = BubbleSystem::new(vec![barbell(0.05, 600)]).unwrap();
    let s0 = sys.total_area();
    let traj = run_free(&sys, 1.0, 0.66 * s0, &RunOptions::coarse(0.02)).unwrap();
    let snap = traj.final_system();
    let brk = traj
        .first_event(EventKind::Breakup)
        .expect("thin neck should pinch");
    let drained = s0 - (traj.total_time - 0.0);
    let defect = (snap.total_area() - drained).abs() / s0;
    println!(
        "dumbbell: breakup at t={:.4} near ({:+.3},{:+.3}), {} bubbles at the end, area defect {:.2e}",
        brk.time,
        brk.location.x,
        brk.location.y,
        snap.bubbles.len(),
        defect
    );

    // 4. regulated twin disks drained symmetrically to completion
    let sys = BubbleSystem::new(
        vec![
            disk_curve(pt(-2.0, 0.0), 1.0, 64),
            disk_curve(pt(2.0, 0.0), 1.0, 64),
        ],
    )
    .unwrap();
    let strat = Strategy::constant(1.0, 1.0, std::f64::consts::PI);
    let (traj, outcome) = run_regulated(&sys, &strat, &RunOptions::coarse(0.02)).unwrap();
    match outcome {
        RegulatedOutcome::Completed { time } => println!(
            "regulated twins: completed at t={:.4} (exact {:.4}), {} events",
            time,
            std::f64::consts::PI,
            traj.events.len()
        ),
        other => println!("regulated twins: unexpected outcome {other:?}"),
    }

    // pretty-print one serialized event to exercise the wire format
    if let Some(e) = traj.events.first() {
        println!("sample event json: {}", serde_json::to_string(e).unwrap());
    }
}
