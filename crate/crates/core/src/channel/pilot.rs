use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::CMatrix;

/// Row-orthogonal pilot `Pi` (`n x phi`) with unit-modulus entries, so that
/// `Pi Pi^H = phi I_n`. Rows are the first `n` rows of the unnormalised
/// `phi`-point DFT matrix.
pub fn generate_pilot(n: usize, phi: usize) -> Result<CMatrix> {
    if phi < n {
        return Err(Error::PilotTooShort { n, phi });
    }
    Ok(CMatrix::from_fn(n, phi, |k, t| {
        // Reduce k*t mod phi first so the angle stays in [0, 2pi).
        let idx = (k * t) % phi;
        let theta = -2.0 * PI * idx as f64 / phi as f64;
        Complex64::from_polar(1.0, theta)
    }))
}
