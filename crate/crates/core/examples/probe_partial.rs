// Scratch probe for the two-circle exact solution near the small bubble's
// disappearance. Establishes the validity window of kufarev_solve, the sign
// structure of the on-axis gradient of the difference potential, and the
// behavior of F(t) = D(z0(t)) - K_t used by the partial-contraction solver.

use heleshaw::conformal::{kufarev_solve, trace_boundary, ConformalMap};
use heleshaw::geometry::{pt, BoundaryCurve, BubbleSystem, Point};
use heleshaw::potential::eval_potential;
use num_complex::Complex64;
use std::f64::consts::PI;

fn raw_circle(c: Point, r: f64, n: usize) -> BoundaryCurve {
    let pts = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            pt(c.x + r * t.cos(), c.y + r * t.sin())
        })
        .collect();
    BoundaryCurve::new_fast(pts).unwrap()
}

// difference potential (value, x-gradient); None when inside a guard band
fn d_probe(b0: &BubbleSystem, bt: &BubbleSystem, p: Point) -> Option<(f64, f64)> {
    let u0 = eval_potential(b0, p).ok()?;
    let ut = eval_potential(bt, p).ok()?;
    Some((u0.value - ut.value, u0.gradient.x - ut.gradient.x))
}

fn main() {
    let (a, r1, r2, q) = (3.0, 1.0, 0.5, 1.0);
    println!("== validity window scan ==");
    for t in [
        2.9, 3.0, 3.004, 3.0048, 3.00484, 3.004848, 3.00484859, 3.0048486, 3.00485, 3.0049,
        3.005, 3.01, 3.1,
    ] {
        match kufarev_solve(a, r1, r2, q, t) {
            Ok(m) => {
                let curve = trace_boundary(&m, 2048).unwrap();
                let ptsv = curve.points();
                let mut crossings = vec![];
                for i in 0..ptsv.len() {
                    let p = ptsv[i];
                    let s = ptsv[(i + 1) % ptsv.len()];
                    if (p.y > 0.0) != (s.y > 0.0) {
                        crossings.push(p.x + (s.x - p.x) * (0.0 - p.y) / (s.y - p.y));
                    }
                }
                crossings.sort_by(|u, v| u.partial_cmp(v).unwrap());
                println!(
                    "t = {t:<12} alpha = {:.9} area = {:.9} crossings = {:?}",
                    m.alpha,
                    m.enclosed_area(),
                    crossings
                        .iter()
                        .map(|x| format!("{x:.6}"))
                        .collect::<Vec<_>>()
                );
            }
            Err(e) => println!("t = {t:<12} ERR {e}"),
        }
    }

    println!("\n== D_x sign structure on the axis ==");
    let b0 = BubbleSystem::new(vec![
        raw_circle(pt(0.0, 0.0), r1, 2048),
        raw_circle(pt(a, 0.0), r2, 1024),
    ])
    .unwrap();
    for t in [1.0, 2.0, 2.8, 2.95, 3.0, 3.0045, 3.00484] {
        let m = kufarev_solve(a, r1, r2, q, t).unwrap();
        let curve = trace_boundary(&m, 4096).unwrap();
        let bt = BubbleSystem::new(vec![curve]).unwrap();
        print!("t = {t:<8}");
        for x in [2.55, 2.7, 2.8, 2.846, 2.9, 3.0, 3.2, 3.44] {
            match d_probe(&b0, &bt, pt(x, 0.0)) {
                Some((_, gx)) => print!(" {x}:{gx:+.4e}"),
                None => print!(" {x}:guard"),
            }
        }
        println!();
        let left = m.eval(Complex64::new(-1.0, 0.0));
        let kin = pt(left.re + 0.05 * r1, 0.0);
        match d_probe(&b0, &bt, kin) {
            Some((kv, kg)) => {
                println!("         K_t = {kv:.8} gradK_x = {kg:.2e} (left edge {:.4})", left.re)
            }
            None => println!("         K_t probe guarded (left edge {:.4})", left.re),
        }
    }

    println!("\n== F(t) = D(z0(t)) - K_t ==");
    for t in [
        1.0, 1.5, 2.0, 2.5, 2.8, 2.9, 2.95, 3.0, 3.003, 3.0045, 3.00475, 3.00483, 3.004845,
        3.0048486, 3.00485, 3.005, 3.01, 3.05, 3.1,
    ] {
        let m = kufarev_solve(a, r1, r2, q, t).unwrap();
        let curve = trace_boundary(&m, 4096).unwrap();
        let bt = BubbleSystem::new(vec![curve]).unwrap();
        let gx = |x: f64| -> Option<f64> { d_probe(&b0, &bt, pt(x, 0.0)).map(|(_, g)| g) };
        let (mut lo, mut hi) = (a - r2 + 5e-3, a + r2 - 5e-3);
        let (glo, ghi) = match (gx(lo), gx(hi)) {
            (Some(u), Some(v)) => (u, v),
            _ => {
                println!("t = {t:<9} bracket endpoint guarded");
                continue;
            }
        };
        if glo.signum() == ghi.signum() {
            println!("t = {t:<9} no sign change: g({lo:.3}) = {glo:.3e}, g({hi:.3}) = {ghi:.3e}");
            continue;
        }
        let mut guarded = 0;
        for _ in 0..60 {
            let mut mid = 0.5 * (lo + hi);
            let mut g = gx(mid);
            if g.is_none() {
                mid += 1e-9;
                g = gx(mid);
                guarded += 1;
            }
            match g {
                Some(v) if v.signum() == glo.signum() => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        let z0 = 0.5 * (lo + hi);
        let dz0 = match d_probe(&b0, &bt, pt(z0, 0.0)) {
            Some((v, _)) => v,
            None => {
                println!("t = {t:<9} z0 = {z0:.8} (value guarded)");
                continue;
            }
        };
        let left = m.eval(Complex64::new(-1.0, 0.0));
        let kin = pt(left.re + 0.05 * r1, 0.0);
        let kv = d_probe(&b0, &bt, kin).map(|(v, _)| v).unwrap_or(f64::NAN);
        println!(
            "t = {t:<9} z0 = {z0:.8} D(z0) = {dz0:.8} K = {kv:.8} F = {:+.3e} guarded_mid = {guarded}",
            dz0 - kv
        );
    }
}
