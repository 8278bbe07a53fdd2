use super::config::ProbingConfig;
use super::pilot::generate_pilot;
use super::realization::ChannelRealization;
use crate::error::{Error, Result};
use crate::numerics::{cgaussian_matrix, CMatrix, RngStream};

/// Received signals of one probing round. Each `y_*` is `[pilot window, random window]`.
#[derive(Clone, Debug)]
pub struct ProbingObservation {
    /// Alice's receive matrix, `n_A x (phi_B + v_B)`.
    pub y_a: CMatrix,
    /// Bob's receive matrix, `n_B x (phi_A + v_A)`.
    pub y_b: CMatrix,
    /// Eve listening to Alice, `n_E x (phi_A + v_A)`.
    pub y_ea: CMatrix,
    /// Eve listening to Bob, `n_E x (phi_B + v_B)`.
    pub y_eb: CMatrix,
    pub x_a: CMatrix,
    pub x_b: CMatrix,
    pub pi_a: CMatrix,
    pub pi_b: CMatrix,
}

impl ProbingObservation {
    /// Bob's pilot window `Y_B^(1)`.
    pub fn y_b_pilot(&self) -> CMatrix {
        self.y_b.columns(0, self.pi_a.cols())
    }

    /// Bob's random window `Y_B^(2)`.
    pub fn y_b_random(&self) -> CMatrix {
        self.y_b.columns(self.pi_a.cols(), self.y_b.cols())
    }

    pub fn y_a_pilot(&self) -> CMatrix {
        self.y_a.columns(0, self.pi_b.cols())
    }

    pub fn y_a_random(&self) -> CMatrix {
        self.y_a.columns(self.pi_b.cols(), self.y_a.cols())
    }
}

/// `sqrt(gamma) H [Pi, X] + W`.
fn received(
    gamma: f64,
    h: &CMatrix,
    pilot: &CMatrix,
    payload: &CMatrix,
    noise: &CMatrix,
) -> Result<CMatrix> {
    let signal = h.matmul(&pilot.hstack(payload)?)?;
    Ok(&signal.scale(gamma.sqrt()) + noise)
}

/// Simulates the four received matrices for the given channels.
///
/// Payloads and noise come from forks of `stream`, so the channel draw
/// (which normally uses `stream` itself) is never reused.
pub fn simulate_probing(
    config: &ProbingConfig,
    realization: &ChannelRealization,
    stream: &RngStream,
) -> Result<ProbingObservation> {
    config.validate()?;
    if !realization.matches(config) {
        return Err(Error::ShapeMismatch(format!(
            "realization shapes do not match n_A = {}, n_B = {}, n_E = {}",
            config.n_a, config.n_b, config.n_e
        )));
    }
    let g = config.gammas()?;
    if g.eve_a_noiseless() || g.eve_b_noiseless() {
        return Err(Error::NonFiniteSnr(
            "cannot simulate a noiseless eavesdropper; use the closed forms".into(),
        ));
    }
    let pi_a = generate_pilot(config.n_a, config.phi_a)?;
    let pi_b = generate_pilot(config.n_b, config.phi_b)?;

    let mut payload_rng = stream.fork(1).rng();
    let x_a = cgaussian_matrix(config.n_a, config.v_a, &mut payload_rng);
    let x_b = cgaussian_matrix(config.n_b, config.v_b, &mut payload_rng);

    let mut noise_rng = stream.fork(2).rng();
    let cols_a = config.phi_a + config.v_a;
    let cols_b = config.phi_b + config.v_b;
    let w_a = cgaussian_matrix(config.n_a, cols_b, &mut noise_rng);
    let w_b = cgaussian_matrix(config.n_b, cols_a, &mut noise_rng);
    let w_ea = cgaussian_matrix(config.n_e, cols_a, &mut noise_rng);
    let w_eb = cgaussian_matrix(config.n_e, cols_b, &mut noise_rng);

    let r = realization;
    Ok(ProbingObservation {
        y_a: received(g.ab, &r.h_ab, &pi_b, &x_b, &w_a)?,
        y_b: received(g.ba, &r.h_ba, &pi_a, &x_a, &w_b)?,
        y_ea: received(g.ea, &r.g_a, &pi_a, &x_a, &w_ea)?,
        y_eb: received(g.eb, &r.g_b, &pi_b, &x_b, &w_eb)?,
        x_a,
        x_b,
        pi_a,
        pi_b,
    })
}
