// Drives the public potential API end to end: build a two-bubble system,
// probe the field, locate critical points, and print what a caller sees.

use heleshaw::{disk_curve, eval_potential, find_critical_points, pt, BubbleSystem, Rect};

fn main() -> heleshaw::Result<()> {
    let system = BubbleSystem::new(vec![
        disk_curve(pt(0.0, 0.0), 1.0, 512),
        disk_curve(pt(4.0, 0.0), 1.0, 512),
    ])?;

    for (x, y) in [(2.0, 0.0), (2.0 - 3.0f64.sqrt(), 0.0), (6.0, 3.0)] {
        let p = eval_potential(&system, pt(x, y))?;
        println!(
            "probe ({x:.4}, {y:.4}): value {:+.8} grad ({:+.3e}, {:+.3e}) hess trace {:+.6}",
            p.value,
            p.gradient.x,
            p.gradient.y,
            p.hessian.trace()
        );
    }

    let search = find_critical_points(&system, Rect::new(pt(-2.0, -2.0), pt(6.0, 2.0)))?;
    println!("critical points: {}", search.points.len());
    for c in &search.points {
        println!(
            "  {:?} at ({:+.6}, {:+.6}) eigs ({:+.6}, {:+.6}) global_min {}",
            c.kind, c.location.x, c.location.y, c.hessian_eigenvalues.0, c.hessian_eigenvalues.1, c.is_global_min
        );
    }
    Ok(())
}
