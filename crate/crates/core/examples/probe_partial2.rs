// Second probe: where does the traced small loop go, and how well does the
// uniform-angle trace resolve it near the disappearance?

use heleshaw::conformal::{kufarev_solve, trace_boundary, ConformalMap};
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() {
    let (a, r1, r2, q) = (3.0, 1.0, 0.5, 1.0);
    let t0 = PI * r2 * r2 / q; // map time of the physical initial state
    println!("map time of physical start: {t0:.6}");
    for t in [t0, 1.0, 1.5, 2.0, 2.5, 2.8, 2.9, 2.95, 3.0, 3.004, 3.0048, 3.00484] {
        let m = kufarev_solve(a, r1, r2, q, t).unwrap();
        for n in [4096usize, 65536] {
            let curve = trace_boundary(&m, n).unwrap();
            let pts = curve.points();
            let mut crossings = vec![];
            for i in 0..pts.len() {
                let p = pts[i];
                let s = pts[(i + 1) % pts.len()];
                if (p.y > 0.0) != (s.y > 0.0) {
                    crossings.push(p.x + (s.x - p.x) * (0.0 - p.y) / (s.y - p.y));
                }
            }
            crossings.sort_by(|u, v| u.partial_cmp(v).unwrap());
            let shoelace = curve.area();
            let right: Vec<_> = crossings.iter().filter(|x| **x > 2.0).collect();
            println!(
                "t = {t:<8} n = {n:<6} shoelace = {:.9} analytic = {:.9} right-crossings = {:?}",
                shoelace,
                m.enclosed_area(),
                right
            );
        }
        // where on the unit circle is the preimage of the small loop? walk
        // angles and report sign of Re f - 2.0 transitions
        let mut arcs = vec![];
        let n = 1 << 18;
        let mut prev_right = false;
        let mut start = 0.0;
        for k in 0..=n {
            let th = 2.0 * PI * k as f64 / n as f64;
            let z = m.eval(Complex64::from_polar(1.0, th));
            let right = z.re > 2.0;
            if right && !prev_right {
                start = th;
            }
            if !right && prev_right {
                arcs.push((start, th));
            }
            prev_right = right;
        }
        println!(
            "          preimage arcs with Re f > 2: {:?}",
            arcs.iter()
                .map(|(s, e)| format!("[{:.4},{:.4}] len {:.2e}", s, e, e - s))
                .collect::<Vec<_>>()
        );
    }
}
