use num_complex::Complex64;

use super::config::ProbingConfig;
use crate::numerics::{cgaussian_matrix, CMatrix, RngStream};

/// One coherence period's channel matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelRealization {
    /// Alice to Bob, `n_B x n_A`.
    pub h_ba: CMatrix,
    /// Bob to Alice, `n_A x n_B`.
    pub h_ab: CMatrix,
    /// Alice to Eve, `n_E x n_A`.
    pub g_a: CMatrix,
    /// Bob to Eve, `n_E x n_B`.
    pub g_b: CMatrix,
}

impl ChannelRealization {
    /// Relabels the realization for the role-swapped config.
    pub fn swapped(&self) -> Self {
        Self {
            h_ba: self.h_ab.clone(),
            h_ab: self.h_ba.clone(),
            g_a: self.g_b.clone(),
            g_b: self.g_a.clone(),
        }
    }

    pub fn matches(&self, config: &ProbingConfig) -> bool {
        self.h_ba.shape() == (config.n_b, config.n_a)
            && self.h_ab.shape() == (config.n_a, config.n_b)
            && self.g_a.shape() == (config.n_e, config.n_a)
            && self.g_b.shape() == (config.n_e, config.n_b)
    }
}

/// Draws `{H_BA, H_AB, G_A, G_B}`.
///
/// `vec(H_AB^T) = rho vec(H_BA) + sqrt(1 - |rho|^2) e` with `e` iid CN(0, 1).
/// Draw order is fixed (`H_BA`, `e`, `G_A`, `G_B`) and does not depend on
/// `rho`, so sweeps over `rho` share the same underlying draws.
pub fn sample_channels(config: &ProbingConfig, stream: &RngStream) -> ChannelRealization {
    let mut rng = stream.rng();
    let (n_a, n_b, n_e) = (config.n_a, config.n_b, config.n_e);
    let h_ba = cgaussian_matrix(n_b, n_a, &mut rng);
    let innovation = cgaussian_matrix(n_b, n_a, &mut rng);
    let g_a = cgaussian_matrix(n_e, n_a, &mut rng);
    let g_b = cgaussian_matrix(n_e, n_b, &mut rng);

    let rho = config.rho;
    let residual = (1.0 - config.rho_abs_sq()).max(0.0).sqrt();
    // H_AB^T = rho H_BA + residual * innovation, entrywise.
    let h_ab = CMatrix::from_fn(n_a, n_b, |i, j| {
        rho * h_ba[(j, i)] + Complex64::new(residual, 0.0) * innovation[(j, i)]
    });
    ChannelRealization {
        h_ba,
        h_ab,
        g_a,
        g_b,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rho: f64) -> ProbingConfig {
        let mut c = ProbingConfig::new(2, 3, 1);
        c.rho = Complex64::new(rho, 0.0);
        c
    }

    #[test]
    fn perfect_reciprocity() {
        let r = sample_channels(&cfg(1.0), &RngStream::new(3, 9));
        assert_eq!(r.h_ab, r.h_ba.transpose());
        assert!(r.matches(&cfg(1.0)));
    }

    #[test]
    fn shared_draws_across_rho() {
        let s = RngStream::new(3, 1);
        let a = sample_channels(&cfg(0.2), &s);
        let b = sample_channels(&cfg(0.7), &s);
        assert_eq!(a.h_ba, b.h_ba);
        assert_eq!(a.g_a, b.g_a);
        assert_eq!(a.g_b, b.g_b);
    }

    #[test]
    fn swap_relabels() {
        let r = sample_channels(&cfg(0.5), &RngStream::new(1, 1));
        let s = r.swapped();
        assert!(s.matches(&cfg(0.5).swapped()));
        assert_eq!(s.swapped(), r);
    }

    fn empirical_cross_correlation(rho: f64, draws: u64) -> (Complex64, f64) {
        let mut c = ProbingConfig::new(1, 1, 1);
        c.rho = Complex64::new(rho, 0.0);
        let mut cross = Complex64::new(0.0, 0.0);
        let mut resid_var = 0.0;
        for id in 0..draws {
            let r = sample_channels(&c, &RngStream::new(77, id));
            let (hab, hba) = (r.h_ab[(0, 0)], r.h_ba[(0, 0)]);
            cross += hab * hba.conj();
            resid_var += (hab - c.rho * hba).norm_sqr();
        }
        (cross / draws as f64, resid_var / draws as f64)
    }

    #[test]
    fn correlation_is_empirically_rho() {
        let (c0, v0) = empirical_cross_correlation(0.0, 100_000);
        assert!(c0.norm() < 0.02, "{c0}");
        assert!((v0 - 1.0).abs() < 0.02);
        let (c8, v8) = empirical_cross_correlation(0.8, 100_000);
        assert!((c8.re - 0.8).abs() < 0.01, "{c8}");
        assert!(c8.im.abs() < 0.01);
        assert!((v8 - 0.36).abs() < 0.02 * 0.36, "{v8}");
    }
}
