// Drives the conformal-map API: exact families, the two-circle solution,
// area bookkeeping, and the singularity-correspondence residual.

use heleshaw::{
    exact_family, kufarev_solve, map_area, richardson_residual, saddle_node_curve,
    trace_boundary, FamilyKind,
};
use num_complex::Complex64;

fn main() -> heleshaw::Result<()> {
    let quartic = exact_family(FamilyKind::Quartic, 0.1, 1.0)?;
    println!(
        "quartic A=0.1 beta=1: a1 {:+.10} a3 {:+.10} area {:.6e}",
        quartic.coeffs[1].re,
        quartic.coeffs[3].re,
        map_area(&quartic)?
    );
    let h = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-2.0, 0.0),
    ];
    println!("  residual vs local model: {:.3e}", richardson_residual(&quartic, &h));

    let kuf = kufarev_solve(3.0, 1.0, 0.5, 1.0, 0.0)?;
    println!(
        "kufarev t=0: alpha {:.12} beta {:.12} gamma {:.12}",
        kuf.alpha, kuf.beta, kuf.gamma
    );
    let curve = trace_boundary(&kuf, 4096)?;
    println!(
        "  enclosed area {:.9} (exact), {:.9} (shoelace), physical time {:+.6}",
        kuf.enclosed_area(),
        curve.area(),
        kuf.physical_time()
    );

    let saddle = saddle_node_curve(0.8, 2048)?;
    let fit = heleshaw::cusp_exponent(&saddle, heleshaw::pt(-0.5, 0.0))?;
    println!(
        "saddle-node curve: cusp exponent {:.4}, sharpness {:.1}, is_cusp {}",
        fit.exponent, fit.sharpness, fit.is_cusp
    );
    Ok(())
}
