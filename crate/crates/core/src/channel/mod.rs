//! The probing scenario: configuration, correlated channel draws, pilots,
//! and simulation of the four received signal matrices.

mod config;
mod pilot;
mod probing;
mod realization;

pub use config::{default_phi, derive_gammas, GammaSet, ProbingConfig, RHO_UNIT_TOL};
pub use pilot::generate_pilot;
pub use probing::{simulate_probing, ProbingObservation};
pub use realization::{sample_channels, ChannelRealization};
