use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::CMatrix;

/// Identifies one reproducible random stream.
///
/// The generator is ChaCha8 keyed by `master_seed` with the 64-bit ChaCha
/// stream selector set to `stream_id`. The sequence for a given pair is fixed
/// regardless of which thread draws it or in what order trials run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// A stream with the same `stream_id` under a key derived from `(master_seed, tag)`.
    /// Used to give independent sub-streams (noise, payloads) to one trial.
    pub fn fork(&self, tag: u64) -> Self {
        Self {
            master_seed: splitmix64(self.master_seed ^ splitmix64(tag.wrapping_add(0x5EED))),
            stream_id: self.stream_id,
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One CN(0, 1) draw: real and imaginary parts each N(0, 1/2).
#[inline]
pub fn cgaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// `rows x cols` matrix of iid CN(0, 1) entries drawn from `rng` in row-major order.
pub fn cgaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cgaussian(rng))
}

/// `rows x cols` matrix of iid CN(0, 1) entries from a fresh generator on `stream`.
pub fn sample_cgaussian(rows: usize, cols: usize, stream: &RngStream) -> CMatrix {
    cgaussian_matrix(rows, cols, &mut stream.rng())
}
