//! Small numerical kernels shared across modules: scalar root finding,
//! real cubic roots, polynomial roots, least-squares polynomial fits,
//! and periodic (trigonometric) interpolation of closed curves.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Brent-style bracketing root finder on `[a, b]`. `fa`/`fb` must have
/// opposite signs. Tolerance is absolute on the argument.
pub fn brent_root(
    mut f: impl FnMut(f64) -> f64,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::numerical(format!(
            "brent_root: no sign change on [{a}, {b}] (f = {fa:.3e}, {fb:.3e})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.abs() > fc.abs() {
            (a, b, c) = (b, c, b);
            (fa, fb, fc) = (fb, fc, fb);
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() < tol || fa.abs() <= fb.abs() {
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                // secant
                (2.0 * m * s, 1.0 - s)
            } else {
                // inverse quadratic
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol * m.signum() };
        fb = f(b);
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            e = b - a;
            d = e;
        }
    }
    Err(Error::numerical("brent_root: max iterations".to_string()))
}

/// All real roots of `c3 x^3 + c2 x^2 + c1 x + c0 = 0`, ascending.
/// Uses the trigonometric method for three real roots and Cardano otherwise.
pub fn cubic_real_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c3 == 0.0 {
        // quadratic fallback
        if c2 == 0.0 {
            if c1 == 0.0 {
                return vec![];
            }
            return vec![-c0 / c1];
        }
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        let mut r = vec![(-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2)];
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return r;
    }
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;
    // depressed cubic t^3 + p t + q, x = t - a/3
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    let mut roots = if disc > 0.0 {
        // three distinct real roots
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect::<Vec<_>>()
    } else {
        // one real root (Cardano); possible double root handled by disc ~ 0
        let half_q = q / 2.0;
        let inner = half_q * half_q + p * p * p / 27.0;
        if inner >= 0.0 {
            let s = inner.sqrt();
            let u = (-half_q + s).cbrt();
            let v = (-half_q - s).cbrt();
            vec![u + v + shift]
        } else {
            // numerically disc ~ 0 with roundoff; treat as triple-ish
            let m = 2.0 * (-p / 3.0).sqrt();
            vec![m * (1.0f64).acos().cos() + shift]
        }
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // one Newton polish per root
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let f = ((c3 * *r + c2) * *r + c1) * *r + c0;
            let df = (3.0 * c3 * *r + 2.0 * c2) * *r + c1;
            if df != 0.0 {
                *r -= f / df;
            }
        }
    }
    roots
}

/// All complex roots of `sum_k coeffs[k] z^k` by Durand-Kerner iteration.
/// Leading coefficient must be nonzero.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    if n < 2 {
        return Ok(vec![]);
    }
    let lead = coeffs[n - 1];
    if lead.norm() == 0.0 {
        return polynomial_roots(&coeffs[..n - 1]);
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let deg = n - 1;
    let eval = |z: Complex64| -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        for &c in monic.iter().rev() {
            v = v * z + c;
        }
        v
    };
    // scale initial guesses to the root magnitude bound
    let bound = 1.0
        + monic[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| bound * seed.powu(k as u32 + 1)).collect();
    for _ in 0..400 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-30, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 * bound.max(1.0) {
            return Ok(z);
        }
    }
    Err(Error::numerical(
        "polynomial_roots: Durand-Kerner did not converge".to_string(),
    ))
}

/// Least-squares fit of `y ~ sum_k c_k x^k` up to `degree`; returns c_0..c_degree.
pub fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    assert_eq!(x.len(), y.len());
    if x.len() < degree + 1 {
        return Err(Error::numerical(format!(
            "polyfit: {} points for degree {}",
            x.len(),
            degree
        )));
    }
    let m = x.len();
    let n = degree + 1;
    let mut a = nalgebra::DMatrix::<f64>::zeros(m, n);
    for i in 0..m {
        let mut p = 1.0;
        for j in 0..n {
            a[(i, j)] = p;
            p *= x[i];
        }
    }
    let b = nalgebra::DVector::<f64>::from_column_slice(y);
    let svd = a.svd(true, true);
    let c = svd
        .solve(&b, 1e-13)
        .map_err(|e| Error::numerical(format!("polyfit: {e}")))?;
    Ok(c.iter().copied().collect())
}

/// Trigonometric (band-limited) resampling of a closed complex sequence to
/// `m` points. Spectrally accurate for smooth, uniformly parametrized input.
pub fn trig_resample_complex(z: &[Complex64], m: usize) -> Vec<Complex64> {
    let n = z.len();
    assert!(n >= 2 && m >= 2);
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut buf: Vec<Complex64> = z.to_vec();
    fft.process(&mut buf);
    // place coefficients into the larger spectrum, splitting Nyquist
    let mut spec = vec![Complex64::new(0.0, 0.0); m];
    let kmax = n / 2;
    for k in 0..=kmax.min(m / 2) {
        spec[k] = buf[k];
    }
    for k in 1..n - kmax {
        spec[m - k] = buf[n - k];
    }
    if n % 2 == 0 && m > n {
        // shared Nyquist bin must be split to keep the signal real-symmetric
        spec[kmax] = buf[kmax] * 0.5;
        spec[m - kmax] = buf[kmax] * 0.5;
    }
    let ifft = planner.plan_fft_inverse(m);
    ifft.process(&mut spec);
    let scale = 1.0 / n as f64;
    spec.iter_mut().for_each(|v| *v *= scale);
    spec
}

/// Forward DFT coefficients (unnormalized), convenience wrapper.
pub fn dft(z: &[Complex64]) -> Vec<Complex64> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(z.len());
    let mut buf = z.to_vec();
    fft.process(&mut buf);
    buf
}

/// Hager-style 1-norm condition estimate of a square matrix given its LU
/// decomposition. Cheap (a few solves), order-of-magnitude accurate.
pub fn condition_estimate_1norm(
    a: &nalgebra::DMatrix<f64>,
    lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 1.0;
    }
    let norm_a = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    // estimate ||A^-1||_1 by power-ish iteration on the dual norm
    let mut x = nalgebra::DVector::<f64>::from_element(n, 1.0 / n as f64);
    let mut est = 0.0f64;
    for _ in 0..5 {
        let Some(y) = lu.solve(&x) else { return f64::INFINITY };
        let y1: f64 = y.iter().map(|v| v.abs()).sum();
        let xi = nalgebra::DVector::<f64>::from_iterator(n, y.iter().map(|v| v.signum()));
        let Some(z) = lu.u().transpose().solve_lower_triangular(&xi).and_then(|t| {
            lu.l().transpose().solve_upper_triangular(&t)
        }) else {
            // fall back to solving with A^T via the decomposition of A
            est = est.max(y1);
            break;
        };
        // undo row permutation of A = P L U: A^T z computed via (LU)^T with P applied last
        let mut zp = z;
        lu.p().inv_permute_rows(&mut zp);
        let (jmax, zmax) = zp
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(j, v)| (j, v.abs()))
            .unwrap();
        est = est.max(y1);
        if zmax <= zp.dot(&x).abs() {
            break;
        }
        x.fill(0.0);
        x[jmax] = 1.0;
    }
    est * norm_a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn cubic_three_roots_sorted() {
        // (x-1)(x-2)(x-3) = x^3 -6x^2 +11x -6
        let r = cubic_real_roots(1.0, -6.0, 11.0, -6.0);
        assert_eq!(r.len(), 3);
        assert!((r[0] - 1.0).abs() < 1e-12);
        assert!((r[1] - 2.0).abs() < 1e-12);
        assert!((r[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_two_circle_configuration() {
        // configuration a=3, R=1, r=0.5, q=1, t=0 used by the exact two-circle map
        let r = cubic_real_roots(162.0, -99.0, 0.0, 2.25);
        assert_eq!(r.len(), 3);
        assert!((r[0] - -0.136316717553).abs() < 1e-9);
        assert!((r[1] - 0.179355530015).abs() < 1e-9);
        assert!((r[2] - 0.568072298649).abs() < 1e-9);
    }

    #[test]
    fn durand_kerner_quartic() {
        // z^4 - 1: roots are the 4th roots of unity
        let c = [
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let mut roots = polynomial_roots(&c).unwrap();
        roots.sort_by(|a, b| a.arg().partial_cmp(&b.arg()).unwrap());
        assert_eq!(roots.len(), 4);
        for r in roots {
            assert!((r.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn polyfit_recovers_coefficients() {
        let x: Vec<f64> = (0..50).map(|i| -1.0 + 2.0 * i as f64 / 49.0).collect();
        let y: Vec<f64> = x.iter().map(|&t| 0.5 - 1.25 * t + 2.0 * t * t * t).collect();
        let c = polyfit(&x, &y, 3).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-10);
        assert!((c[1] + 1.25).abs() < 1e-10);
        assert!(c[2].abs() < 1e-10);
        assert!((c[3] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn trig_resample_circle_lands_on_circle() {
        let n = 64;
        let z: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        let w = trig_resample_complex(&z, 256);
        for v in w {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
