//! Dense complex linear algebra, Hermitian log-determinants and reproducible
//! random streams. All logarithms are base 2.

mod linalg;
mod matrix;
mod rng;

pub use linalg::{
    block2x2, capacity_logdet, capacity_logdet_gram_side, cholesky_hpd, kron, logdet_hermitian_pd,
    logdet_i_plus_gram, logdet_i_plus_gram_times_inverse, logdet_i_plus_outer, Cholesky,
    HERMITIAN_TOL, JITTER_REL,
};
pub use matrix::{CMatrix, ONE, ZERO};
pub use rng::{cgaussian, cgaussian_matrix, sample_cgaussian, RngStream};
