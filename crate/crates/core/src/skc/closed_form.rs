use std::f64::consts::{E, PI};

use crate::channel::ProbingConfig;
use crate::error::{Error, Result};
use crate::numerics::{capacity_logdet, CMatrix};

/// Pilot-window correlation factor `g`:
///
/// ```text
///            (x + 1)(y + 1)
/// g = ------------------------------,   x = gamma_AB psi_B,  y = gamma_BA psi_A
///     (1 - |rho|^2) x y + x + y + 1
/// ```
///
/// `g >= 1`, with equality iff `rho = 0` (or either side has zero SNR).
pub fn g_factor(config: &ProbingConfig) -> Result<f64> {
    let gam = config.gammas()?;
    let x = gam.ab * config.psi_b();
    let y = gam.ba * config.psi_a();
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::NonFiniteSnr(
            "pilot SNR products must be finite".into(),
        ));
    }
    let r = config.rho_abs_sq().min(1.0);
    let num = (x + 1.0) * (y + 1.0);
    let den = (1.0 - r) * x * y + x + y + 1.0;
    Ok(num / den)
}

/// Mutual information between the two pilot windows, `n_A n_B log2 g` bits.
pub fn cs1(config: &ProbingConfig) -> Result<f64> {
    Ok((config.n_a * config.n_b) as f64 * g_factor(config)?.log2())
}

/// `I(Y; X | H)` for `Y = sqrt(gamma) H X + W` over `m` slots, for one
/// realization of `H`: `m log2 det(gamma H H^H + I)`.
pub fn gaussian_mi(h: &CMatrix, gamma: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Ok(0.0);
    }
    Ok(m as f64 * capacity_logdet(h, gamma)?)
}

/// `h(Y | H) = N M log2(pi e) + I(Y; X | H)` for one realization of `H` (`N x K`).
pub fn gaussian_entropy(h: &CMatrix, gamma: f64, m: usize) -> Result<f64> {
    let n = h.rows();
    Ok((n * m) as f64 * (PI * E).log2() + gaussian_mi(h, gamma, m)?)
}
