//! Pilot-based channel estimation error, the quantitative content of
//! "treat H as known" for long pilots.

use num_complex::Complex64;

use crate::channel::{generate_pilot, ProbingConfig};
use crate::error::{Error, Result};
use crate::mc::{run_trials, Estimate, McSettings};
use crate::numerics::cgaussian_matrix;

use super::outcome::{ToleranceKind, VerificationOutcome};

/// Relative tolerance on the error variance.
pub const MMSE_REL_TOL: f64 = 0.05;

/// Empirical pilot-estimation statistics for `Y = sqrt(gamma) H Pi + W`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PilotMmseStats {
    /// Per-entry `E|H - H_hat|^2`.
    pub error_variance: Estimate,
    /// `1 / (gamma psi + 1)`.
    pub analytic_variance: f64,
    /// Per-entry power of `sqrt(gamma) (H - H_hat) x` for a CN(0, I) symbol `x`,
    /// i.e. the extra noise a random-window observation sees when `H_hat` replaces `H`.
    pub window2_perturbation: Estimate,
    /// `gamma n_tx / (gamma psi + 1)`.
    pub analytic_perturbation: f64,
}

/// Monte Carlo pilot error for an `n_rx x n_tx` channel trained with a
/// `phi`-slot pilot (`psi = phi`).
pub fn pilot_mmse_error(
    gamma: f64,
    n_rx: usize,
    n_tx: usize,
    phi: usize,
    mc: &McSettings,
) -> Result<PilotMmseStats> {
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "gamma = {gamma} must be finite and >= 0"
        )));
    }
    if n_rx == 0 || n_tx == 0 {
        return Err(Error::InvalidConfig("antenna counts must be >= 1".into()));
    }
    let pi = generate_pilot(n_tx, phi)?;
    let pi_h = pi.adjoint();
    let psi = phi as f64;
    let shrink = gamma.sqrt() / (gamma * psi + 1.0);
    let entries = (n_rx * n_tx) as f64;
    let rows = run_trials(mc, mc.trials, |_, stream| {
        let mut rng = stream.rng();
        let h = cgaussian_matrix(n_rx, n_tx, &mut rng);
        let w = cgaussian_matrix(n_rx, phi, &mut rng);
        let x = cgaussian_matrix(n_tx, 1, &mut rng);
        let y = &(&h * &pi).scale(gamma.sqrt()) + &w;
        let h_hat = (&y * &pi_h).scale(shrink);
        let err = &h - &h_hat;
        let mse = err.iter().map(|z| z.norm_sqr()).sum::<f64>() / entries;
        let e2 = (&err * &x).scale(gamma.sqrt());
        let pert = e2.iter().map(Complex64::norm_sqr).sum::<f64>() / n_rx as f64;
        Ok((mse, pert))
    })?;
    let mse: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let pert: Vec<f64> = rows.iter().map(|r| r.1).collect();
    Ok(PilotMmseStats {
        error_variance: Estimate::from_samples(&mse),
        analytic_variance: 1.0 / (gamma * psi + 1.0),
        window2_perturbation: Estimate::from_samples(&pert),
        analytic_perturbation: gamma * n_tx as f64 / (gamma * psi + 1.0),
    })
}

/// Checks the estimate of `H_BA` from Alice's pilot as seen by Bob.
pub fn pilot_mmse_check(config: &ProbingConfig, mc: &McSettings) -> Result<VerificationOutcome> {
    config.validate()?;
    let gamma = config.gammas()?.ba;
    let stats = pilot_mmse_error(gamma, config.n_b, config.n_a, config.phi_a, mc)?;
    Ok(outcome_from_stats(&stats, gamma, config.phi_a))
}

pub fn outcome_from_stats(stats: &PilotMmseStats, gamma: f64, phi: usize) -> VerificationOutcome {
    let detail = format!(
        "gamma = {gamma}, psi = {phi}, stderr = {:.3e}, window-2 perturbation {:.4e} (analytic {:.4e})",
        stats.error_variance.stderr,
        stats.window2_perturbation.mean,
        stats.analytic_perturbation
    );
    VerificationOutcome::compare(
        "pilot_mmse",
        stats.analytic_variance,
        stats.error_variance.mean,
        MMSE_REL_TOL,
        ToleranceKind::Relative,
        detail,
    )
}
