use num_complex::Complex64;

use crate::error::{Error, Result};

/// `|rho|` at or above `1 - RHO_UNIT_TOL` counts as perfectly reciprocal.
pub const RHO_UNIT_TOL: f64 = 1e-12;

/// Scenario parameters for one coherence period of two-way probing.
///
/// Alice sends a pilot of `phi_a` slots then `v_a` random slots; Bob does the
/// same with `phi_b` and `v_b`. Pilot entries have unit power, so the pilot
/// row norm `psi` equals `phi` and is derived rather than stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbingConfig {
    pub n_a: usize,
    pub n_b: usize,
    pub n_e: usize,
    pub v_a: usize,
    pub v_b: usize,
    pub phi_a: usize,
    pub phi_b: usize,
    /// `alpha_A P`, Alice's per-antenna transmit power (linear).
    pub alpha_a_p: f64,
    /// `alpha_B P`.
    pub alpha_b_p: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
    /// Eve's noise relative to the channel from Alice; zero means noiseless.
    pub lambda_ea: f64,
    pub lambda_eb: f64,
    /// Reciprocity correlation between `vec(H_AB^T)` and `vec(H_BA)`.
    pub rho: Complex64,
}

/// Pilot length used when none is given: large enough that pilot-based
/// channel estimates are effectively exact.
pub fn default_phi(n: usize) -> usize {
    (100 * n).max(64)
}

impl ProbingConfig {
    /// Config with the given antenna counts and default everything else:
    /// `v_A = v_B = 1`, `phi = max(100 n, 64)`, unit powers, unit noise, `rho = 0`.
    pub fn new(n_a: usize, n_b: usize, n_e: usize) -> Self {
        Self {
            n_a,
            n_b,
            n_e,
            v_a: 1,
            v_b: 1,
            phi_a: default_phi(n_a),
            phi_b: default_phi(n_b),
            alpha_a_p: 1.0,
            alpha_b_p: 1.0,
            lambda_a: 1.0,
            lambda_b: 1.0,
            lambda_ea: 1.0,
            lambda_eb: 1.0,
            rho: Complex64::new(0.0, 0.0),
        }
    }

    pub fn psi_a(&self) -> f64 {
        self.phi_a as f64
    }

    pub fn psi_b(&self) -> f64 {
        self.phi_b as f64
    }

    pub fn rho_abs_sq(&self) -> f64 {
        self.rho.norm_sqr()
    }

    /// `delta_rho` of the DoF formula.
    pub fn rho_is_unit(&self) -> bool {
        self.rho.norm() >= 1.0 - RHO_UNIT_TOL
    }

    pub fn gammas(&self) -> Result<GammaSet> {
        derive_gammas(self)
    }

    /// Checks every structural and numeric invariant.
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("n_A", self.n_a), ("n_B", self.n_b), ("n_E", self.n_e)] {
            if n == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be >= 1")));
            }
        }
        if self.phi_a < self.n_a {
            return Err(Error::PilotTooShort {
                n: self.n_a,
                phi: self.phi_a,
            });
        }
        if self.phi_b < self.n_b {
            return Err(Error::PilotTooShort {
                n: self.n_b,
                phi: self.phi_b,
            });
        }
        for (name, p) in [("alpha_A_P", self.alpha_a_p), ("alpha_B_P", self.alpha_b_p)] {
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} = {p} must be finite and >= 0"
                )));
            }
        }
        check_noise(self)?;
        let r = self.rho.norm();
        if !r.is_finite() || r > 1.0 + RHO_UNIT_TOL {
            return Err(Error::InvalidConfig(format!("|rho| = {r} exceeds 1")));
        }
        Ok(())
    }

    /// Exchanges the roles of Alice and Bob. Applying it twice is the identity.
    pub fn swapped(&self) -> Self {
        Self {
            n_a: self.n_b,
            n_b: self.n_a,
            n_e: self.n_e,
            v_a: self.v_b,
            v_b: self.v_a,
            phi_a: self.phi_b,
            phi_b: self.phi_a,
            alpha_a_p: self.alpha_b_p,
            alpha_b_p: self.alpha_a_p,
            lambda_a: self.lambda_b,
            lambda_b: self.lambda_a,
            lambda_ea: self.lambda_eb,
            lambda_eb: self.lambda_ea,
            rho: self.rho.conj(),
        }
    }

    /// Both transmit powers multiplied by `p`.
    pub fn with_power_scale(&self, p: f64) -> Self {
        Self {
            alpha_a_p: self.alpha_a_p * p,
            alpha_b_p: self.alpha_b_p * p,
            ..self.clone()
        }
    }
}

fn check_noise(c: &ProbingConfig) -> Result<()> {
    for (name, l) in [("lambda_A", c.lambda_a), ("lambda_B", c.lambda_b)] {
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidNoise(format!("{name} = {l} must be > 0")));
        }
    }
    for (name, l) in [("lambda_EA", c.lambda_ea), ("lambda_EB", c.lambda_eb)] {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::InvalidNoise(format!("{name} = {l} must be >= 0")));
        }
    }
    Ok(())
}

/// Receive SNRs. `ea`/`eb` are `+inf` when Eve's noise variance is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaSet {
    /// `gamma_AB = alpha_B P / lambda_A` (Bob to Alice).
    pub ab: f64,
    /// `gamma_BA = alpha_A P / lambda_B` (Alice to Bob).
    pub ba: f64,
    /// `gamma_EA = alpha_A P / lambda_EA`.
    pub ea: f64,
    /// `gamma_EB = alpha_B P / lambda_EB`.
    pub eb: f64,
}

impl GammaSet {
    pub fn eve_a_noiseless(&self) -> bool {
        self.ea.is_infinite()
    }

    pub fn eve_b_noiseless(&self) -> bool {
        self.eb.is_infinite()
    }
}

fn snr(power: f64, noise: f64) -> f64 {
    if power == 0.0 {
        0.0
    } else if noise == 0.0 {
        f64::INFINITY
    } else {
        power / noise
    }
}

pub fn derive_gammas(config: &ProbingConfig) -> Result<GammaSet> {
    check_noise(config)?;
    Ok(GammaSet {
        ab: config.alpha_b_p / config.lambda_a,
        ba: config.alpha_a_p / config.lambda_b,
        ea: snr(config.alpha_a_p, config.lambda_ea),
        eb: snr(config.alpha_b_p, config.lambda_eb),
    })
}
