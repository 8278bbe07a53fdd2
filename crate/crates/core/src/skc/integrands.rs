//! Per-realization integrands. Each expectation in the capacity expressions
//! is the mean of one of these over channel draws.
//!
//! Every quantity has two algebraically equivalent evaluations that go
//! through different matrices, so the pair checks itself sample by sample.

use crate::channel::{ChannelRealization, GammaSet, ProbingConfig};
use crate::error::{Error, Result};
use crate::numerics::{
    capacity_logdet, capacity_logdet_gram_side, cholesky_hpd, logdet_hermitian_pd,
    logdet_i_plus_gram, logdet_i_plus_gram_times_inverse, logdet_i_plus_outer, CMatrix,
};

use super::closed_form::cs1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiForm {
    /// `log|gamma_EA G~^H G~ + I| - log|gamma_EA G_A^H G_A + I|` on the `n_A` side.
    Direct,
    /// `log|I + gamma_BA H_BA^H H_BA (gamma_EA G_A^H G_A + I)^{-1}|`.
    /// Also defined for a noiseless eavesdropper.
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapForm {
    /// Stacked receiver `[H_AB; sqrt(lambda_A/lambda_EB) G_B]`, `(n_A + n_E)`-side determinants.
    Stacked,
    /// `log|I + gamma_EB G_B^H G_B (I + gamma_AB H_AB^H H_AB)^{-1}|`.
    Inverse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CbForm {
    /// `n_A`/`n_B`-side square determinants with `xi_B`.
    Square,
    /// Determinants on the receive sides, including the stacked `(n_B + n_E)` one.
    Rectangular,
}

fn check_shapes(real: &ChannelRealization, config: &ProbingConfig) -> Result<()> {
    if real.matches(config) {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(
            "channel realization does not match the configured antenna counts".into(),
        ))
    }
}

/// `K = gamma I + ...`: returns `gamma G^H G + I`.
fn shifted_gram(g: &CMatrix, gamma: f64) -> CMatrix {
    let mut k = g.gram().scale(gamma);
    k.add_diag(1.0);
    k
}

/// `xi_B` in the limit `lambda_EA -> 0`.
///
/// `(c G^H G + I)^{-1}` tends to the projector `P` onto the null space of
/// `G_A`, which is zero when `n_E >= n_A` (full column rank almost surely).
/// Otherwise the limit is `log|I + gamma_BA P H^H H P|`.
fn xi_noiseless_limit(real: &ChannelRealization, gamma_ba: f64) -> Result<f64> {
    let (n_e, n_a) = real.g_a.shape();
    if n_e >= n_a {
        return Ok(0.0);
    }
    // P = I - G^H (G G^H)^{-1} G
    let g = &real.g_a;
    let chol = cholesky_hpd(&g.outer_gram())?;
    let mut p = &CMatrix::identity(n_a) - &(&g.adjoint() * &chol.solve(g)?);
    // Symmetrize before use; P is Hermitian up to rounding.
    p = CMatrix::from_fn(n_a, n_a, |i, j| (p[(i, j)] + p[(j, i)].conj()) * 0.5);
    let b = (&real.h_ba * &p).scale(gamma_ba.sqrt());
    logdet_i_plus_gram(&b)
}

fn xi_with_gammas(real: &ChannelRealization, gam: &GammaSet, form: XiForm) -> Result<f64> {
    if gam.ba == 0.0 {
        return Ok(0.0);
    }
    if gam.eve_a_noiseless() {
        return match form {
            XiForm::Inverse => xi_noiseless_limit(real, gam.ba),
            XiForm::Direct => Err(Error::NonFiniteSnr(
                "direct xi_B form is undefined for lambda_EA = 0".into(),
            )),
        };
    }
    let k = shifted_gram(&real.g_a, gam.ea);
    match form {
        XiForm::Direct => {
            let with_bob = &k + &real.h_ba.gram().scale(gam.ba);
            Ok(logdet_hermitian_pd(&with_bob)? - logdet_hermitian_pd(&k)?)
        }
        XiForm::Inverse => logdet_i_plus_gram_times_inverse(&real.h_ba.scale(gam.ba.sqrt()), &k),
    }
}

/// Per-realization integrand of `xi_B` (bits per probing slot).
pub fn xi_b_sample(real: &ChannelRealization, config: &ProbingConfig, form: XiForm) -> Result<f64> {
    check_shapes(real, config)?;
    xi_with_gammas(real, &config.gammas()?, form)
}

fn gap_with_gammas(
    real: &ChannelRealization,
    config: &ProbingConfig,
    gam: &GammaSet,
    form: GapForm,
) -> Result<f64> {
    if config.v_b == 0 {
        return Ok(0.0);
    }
    if gam.eve_b_noiseless() {
        return Err(Error::NonFiniteSnr(
            "gap is unbounded for lambda_EB = 0 with v_B > 0".into(),
        ));
    }
    let v_b = config.v_b as f64;
    let per_slot = match form {
        GapForm::Stacked => {
            let stacked = real
                .h_ab
                .scale(gam.ab.sqrt())
                .vstack(&real.g_b.scale(gam.eb.sqrt()))?;
            logdet_i_plus_outer(&stacked)? - capacity_logdet(&real.h_ab, gam.ab)?
        }
        GapForm::Inverse => {
            let k = shifted_gram(&real.h_ab, gam.ab);
            logdet_i_plus_gram_times_inverse(&real.g_b.scale(gam.eb.sqrt()), &k)?
        }
    };
    Ok(v_b * per_slot)
}

/// Per-realization integrand of `C_Z - C_B` (bits per coherence period).
/// Exactly zero when `v_B = 0`.
pub fn gap_sample(real: &ChannelRealization, config: &ProbingConfig, form: GapForm) -> Result<f64> {
    check_shapes(real, config)?;
    gap_with_gammas(real, config, &config.gammas()?, form)
}

fn c_b_with(
    real: &ChannelRealization,
    config: &ProbingConfig,
    gam: &GammaSet,
    cs1_bits: f64,
    form: CbForm,
) -> Result<f64> {
    let mut total = cs1_bits;
    if config.v_a > 0 {
        let v_a = config.v_a as f64;
        match form {
            CbForm::Square => {
                let xi_form = if gam.eve_a_noiseless() {
                    XiForm::Inverse
                } else {
                    XiForm::Direct
                };
                total += v_a * xi_with_gammas(real, gam, xi_form)?;
            }
            CbForm::Rectangular => {
                if gam.eve_a_noiseless() {
                    return Err(Error::NonFiniteSnr(
                        "rectangular C_B form needs lambda_EA > 0".into(),
                    ));
                }
                let stacked = real
                    .h_ba
                    .scale(gam.ba.sqrt())
                    .vstack(&real.g_a.scale(gam.ea.sqrt()))?;
                total +=
                    v_a * (logdet_i_plus_outer(&stacked)? - capacity_logdet(&real.g_a, gam.ea)?);
            }
        }
    }
    if config.v_b > 0 {
        if gam.eve_b_noiseless() {
            return Err(Error::NonFiniteSnr(
                "C_B is unbounded below for lambda_EB = 0 with v_B > 0".into(),
            ));
        }
        let v_b = config.v_b as f64;
        let (eve, bob_to_alice) = match form {
            CbForm::Square => (
                capacity_logdet_gram_side(&real.g_b, gam.eb)?,
                capacity_logdet_gram_side(&real.h_ab, gam.ab)?,
            ),
            CbForm::Rectangular => (
                capacity_logdet(&real.g_b, gam.eb)?,
                capacity_logdet(&real.h_ab, gam.ab)?,
            ),
        };
        total += v_b * (bob_to_alice - eve);
    }
    Ok(total)
}

/// Per-realization integrand of `C_B` (bits per coherence period).
pub fn c_b_sample(real: &ChannelRealization, config: &ProbingConfig, form: CbForm) -> Result<f64> {
    check_shapes(real, config)?;
    c_b_with(real, config, &config.gammas()?, cs1(config)?, form)
}

/// Per-realization integrand of `C_A`: the `C_B` integrand with Alice and Bob exchanged.
pub fn c_a_sample(real: &ChannelRealization, config: &ProbingConfig, form: CbForm) -> Result<f64> {
    c_b_sample(&real.swapped(), &config.swapped(), form)
}

/// All report integrands evaluated on one realization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleTerms {
    pub xi_b: f64,
    pub gap: f64,
    pub c_b: f64,
    pub c_a: f64,
    pub c_z: f64,
}

/// Precomputed per-config state for evaluating many realizations.
#[derive(Clone, Debug)]
pub struct SkcEvaluator {
    config: ProbingConfig,
    swapped: ProbingConfig,
    gammas: GammaSet,
    gammas_swapped: GammaSet,
    cs1: f64,
    cs1_swapped: f64,
}

impl SkcEvaluator {
    pub fn new(config: &ProbingConfig) -> Result<Self> {
        config.validate()?;
        let swapped = config.swapped();
        Ok(Self {
            gammas: config.gammas()?,
            gammas_swapped: swapped.gammas()?,
            cs1: cs1(config)?,
            cs1_swapped: cs1(&swapped)?,
            config: config.clone(),
            swapped,
        })
    }

    pub fn config(&self) -> &ProbingConfig {
        &self.config
    }

    pub fn cs1(&self) -> f64 {
        self.cs1
    }

    pub fn xi_b(&self, real: &ChannelRealization) -> Result<f64> {
        xi_with_gammas(real, &self.gammas, XiForm::Inverse)
    }

    pub fn gap(&self, real: &ChannelRealization) -> Result<f64> {
        gap_with_gammas(real, &self.config, &self.gammas, GapForm::Inverse)
    }

    pub fn c_b(&self, real: &ChannelRealization) -> Result<f64> {
        c_b_with(real, &self.config, &self.gammas, self.cs1, CbForm::Square)
    }

    pub fn c_a(&self, real: &ChannelRealization) -> Result<f64> {
        c_b_with(
            &real.swapped(),
            &self.swapped,
            &self.gammas_swapped,
            self.cs1_swapped,
            CbForm::Square,
        )
    }

    /// `C_Z = C_B + gap` on the same realization.
    pub fn c_z(&self, real: &ChannelRealization) -> Result<f64> {
        Ok(self.c_b(real)? + self.gap(real)?)
    }

    pub fn terms(&self, real: &ChannelRealization) -> Result<SampleTerms> {
        check_shapes(real, &self.config)?;
        let xi_b = self.xi_b(real)?;
        let gap = self.gap(real)?;
        let c_b = self.c_b(real)?;
        let c_a = self.c_a(real)?;
        Ok(SampleTerms {
            xi_b,
            gap,
            c_b,
            c_a,
            c_z: c_b + gap,
        })
    }
}
