//! Residual of the singularity correspondence: on the unit circle the
//! boundary values of conj(f) must agree with a polynomial h applied to f,
//! up to a function extending holomorphically through the disk. The mass of
//! the non-positive Fourier modes of the mismatch measures the failure.

use crate::conformal::laurent::ConformalMap;
use crate::numeric::dft;
use num_complex::Complex64;

const RESIDUAL_SAMPLES: usize = 2048;

/// l^2 mass of the Fourier modes m <= 0 (constant included) of
/// g(zeta) = conj(f(zeta)) - h(f(zeta)) on |zeta| = 1. Near zero exactly
/// when `h_poly` (ascending coefficients) is the interior polynomial
/// matched to the map.
pub fn richardson_residual<M: ConformalMap>(map: &M, h_poly: &[Complex64]) -> f64 {
    let n = RESIDUAL_SAMPLES;
    let mut g = Vec::with_capacity(n);
    for j in 0..n {
        let th = std::f64::consts::TAU * j as f64 / n as f64;
        let z = map.eval(Complex64::new(th.cos(), th.sin()));
        let mut h = Complex64::new(0.0, 0.0);
        for &c in h_poly.iter().rev() {
            h = h * z + c;
        }
        g.push(z.conj() - h);
    }
    let coeffs = dft(&g);
    // frequency j holds mode m = j for j < n/2 and m = j - n otherwise;
    // Nyquist counts as negative
    let mut mass = coeffs[0].norm_sqr();
    for c in &coeffs[n / 2..] {
        mass += c.norm_sqr();
    }
    (mass / (n as f64 * n as f64)).sqrt()
}
