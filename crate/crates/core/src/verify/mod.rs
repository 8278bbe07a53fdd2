//! Independent oracles: exact covariance MI, pilot estimation error,
//! quadrature, and per-realization determinant identities.

mod identities;
mod mmse;
mod outcome;
mod pilot_mi;
mod quadrature;
mod suite;

pub use identities::{identity_suite, GAP_SIGN_FLOOR, IDENTITY_TOL, MIN_REALIZATIONS};
pub use mmse::{pilot_mmse_check, pilot_mmse_error, PilotMmseStats, MMSE_REL_TOL};
pub use outcome::{ToleranceKind, VerificationOutcome};
pub use pilot_mi::{pilot_covariances, pilot_direct_mi, PILOT_MI_GUARD};
pub use quadrature::{integrate, scalar_capacity_oracle};
pub use suite::{
    pilot_mi_check, run_verification_suite, scalar_cross_check, SuiteEntry, SuiteOptions,
    VerificationSummary, MMSE_MIN_TRIALS, PILOT_MI_REL_TOL, SCALAR_GAMMAS,
};
