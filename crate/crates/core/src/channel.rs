//! Small-scale fading: i.i.d. Rayleigh channel matrices.

use num_complex::Complex;
use rand::Rng;

use crate::linalg::CMatrix;
use crate::real::Real;

/// Draws an `rx x tx` matrix with i.i.d. CN(0, 1) entries.
///
/// Real and imaginary parts are independent N(0, 1/2), so each entry has
/// unit expected power. Entries are drawn in row-major order, which pins
/// the output for a given RNG state.
pub fn rayleigh_channel<F: Real, R: Rng + ?Sized>(rx: usize, tx: usize, rng: &mut R) -> CMatrix<F> {
    let half = F::of(0.5).sqrt();
    let mut h = CMatrix::<F>::zeros((rx, tx));
    for r in 0..rx {
        for t in 0..tx {
            let re = F::standard_normal(rng) * half;
            let im = F::standard_normal(rng) * half;
            h[[r, t]] = Complex::new(re, im);
        }
    }
    h
}
