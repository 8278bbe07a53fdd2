//! Pilot-window mutual information from the joint Gaussian covariance.
//!
//! Vectorisation conventions and dimensions:
//!
//! ```text
//! symbol   definition                          size
//! y_A      vec(Y_A1),  Y_A1 = sqrt(g_AB) H_AB Pi_B + W_A     n_A phi_B
//! y_Bt     vec(Y_B1^T), Y_B1 = sqrt(g_BA) H_BA Pi_A + W_B    n_B phi_A
//! A        E[y_A y_A^H]  = g_AB (Pi_B^T Pi_B^* (x) I_nA) + I  n_A phi_B square
//! B        E[y_Bt y_Bt^H] = g_BA (I_nB (x) Pi_A^T Pi_A^*) + I  n_B phi_A square
//! C        E[y_A y_Bt^H] = rho sqrt(g_AB g_BA) (Pi_B^T (x) Pi_A^*)
//!                                                        n_A phi_B x n_B phi_A
//! ```
//!
//! `vec` stacks columns. `C` uses `E[vec(H_AB) vec(H_BA^T)^H] = rho I`.

use num_complex::Complex64;

use crate::channel::{generate_pilot, ProbingConfig};
use crate::error::{Error, Result};
use crate::numerics::{block2x2, kron, logdet_hermitian_pd, CMatrix};

/// Largest covariance block order the oracle will factor.
pub const PILOT_MI_GUARD: usize = 4096;

/// The three covariance blocks `(A, B, C)`.
pub fn pilot_covariances(config: &ProbingConfig) -> Result<(CMatrix, CMatrix, CMatrix)> {
    config.validate()?;
    let side_a = config.n_a * config.phi_b;
    let side_b = config.n_b * config.phi_a;
    for size in [side_a, side_b] {
        if size > PILOT_MI_GUARD {
            return Err(Error::DimensionGuard {
                size,
                limit: PILOT_MI_GUARD,
            });
        }
    }
    let gam = config.gammas()?;
    let pi_a = generate_pilot(config.n_a, config.phi_a)?;
    let pi_b = generate_pilot(config.n_b, config.phi_b)?;
    let pi_a_t = pi_a.transpose();
    let pi_b_t = pi_b.transpose();

    let mut a = kron(
        &pi_b_t.matmul(&pi_b.conj())?,
        &CMatrix::identity(config.n_a),
    )
    .scale(gam.ab);
    a.add_diag(1.0);
    let mut b = kron(
        &CMatrix::identity(config.n_b),
        &pi_a_t.matmul(&pi_a.conj())?,
    )
    .scale(gam.ba);
    b.add_diag(1.0);
    let coupling = config.rho * Complex64::new((gam.ab * gam.ba).sqrt(), 0.0);
    let c = kron(&pi_b_t, &pi_a.conj()).scale_complex(coupling);
    Ok((a, b, c))
}

/// `I(Y_A1; Y_B1)` in bits, computed as
/// `log|A| + log|B| - log|[[A, C], [C^H, B]]|` with no sampling.
pub fn pilot_direct_mi(config: &ProbingConfig) -> Result<f64> {
    let (a, b, c) = pilot_covariances(config)?;
    let joint = block2x2(&a, &c, &c.adjoint(), &b)?;
    Ok(logdet_hermitian_pd(&a)? + logdet_hermitian_pd(&b)? - logdet_hermitian_pd(&joint)?)
}
