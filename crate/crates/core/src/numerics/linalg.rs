use std::f64::consts::LN_2;

use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

/// Maximum tolerated `|M_ij - conj(M_ji)|` for inputs treated as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative diagonal jitter applied on the single factorisation retry.
pub const JITTER_REL: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `M = L L^H`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: CMatrix,
}

impl Cholesky {
    /// Factors a Hermitian matrix without validating symmetry; only the lower
    /// triangle of `m` is read.
    pub fn factor(m: &CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Cholesky of a {}x{} matrix",
                m.rows(),
                m.cols()
            )));
        }
        let n = m.rows();
        let mut l = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn factor_matrix(&self) -> &CMatrix {
        &self.l
    }

    /// `log2 det(M)`.
    pub fn logdet2(&self) -> f64 {
        let n = self.l.rows();
        2.0 * (0..n).map(|i| self.l[(i, i)].re.ln()).sum::<f64>() / LN_2
    }

    /// Solves `L X = B`.
    pub fn solve_lower(&self, b: &CMatrix) -> Result<CMatrix> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "triangular solve with {n}x{n} factor and {} rhs rows",
                b.rows()
            )));
        }
        let mut x = b.clone();
        for c in 0..b.cols() {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        Ok(x)
    }

    /// Solves `L^H X = B`.
    pub fn solve_upper(&self, b: &CMatrix) -> Result<CMatrix> {
        let n = self.l.rows();
        if b.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "triangular solve with {n}x{n} factor and {} rhs rows",
                b.rows()
            )));
        }
        let mut x = b.clone();
        for c in 0..b.cols() {
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.l[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        Ok(x)
    }

    /// Solves `M X = B`.
    pub fn solve(&self, b: &CMatrix) -> Result<CMatrix> {
        self.solve_upper(&self.solve_lower(b)?)
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFiniteSnr("matrix has non-finite entries".into()));
    }
    let asymmetry = m.max_abs_asymmetry();
    if asymmetry > HERMITIAN_TOL {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

fn symmetrized(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    })
}

/// Cholesky of a Hermitian positive-definite matrix with the tolerance check,
/// symmetrisation, and one jittered retry.
pub fn cholesky_hpd(m: &CMatrix) -> Result<Cholesky> {
    check_hermitian(m)?;
    let sym = symmetrized(m);
    match Cholesky::factor(&sym) {
        Ok(c) => Ok(c),
        Err(Error::NotPositiveDefinite) => {
            let n = sym.rows().max(1) as f64;
            let mut jittered = sym;
            jittered.add_diag(JITTER_REL * jittered.trace().re.abs() / n);
            Cholesky::factor(&jittered)
        }
        Err(e) => Err(e),
    }
}

/// `log2 det(M)` for Hermitian positive-definite `M`.
pub fn logdet_hermitian_pd(m: &CMatrix) -> Result<f64> {
    Ok(cholesky_hpd(m)?.logdet2())
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() {
        return Err(Error::NonFiniteSnr(format!("gamma = {gamma}")));
    }
    if gamma < 0.0 {
        return Err(Error::InvalidConfig(format!("negative SNR {gamma}")));
    }
    Ok(())
}

/// `log2 det(gamma H H^H + I_N)` for `H` of shape `N x K`.
pub fn capacity_logdet(h: &CMatrix, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let mut m = h.outer_gram().scale(gamma);
    m.add_diag(1.0);
    logdet_hermitian_pd(&m)
}

/// `log2 det(gamma H^H H + I_K)`; equal to [`capacity_logdet`] by Sylvester's identity.
pub fn capacity_logdet_gram_side(h: &CMatrix, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let mut m = h.gram().scale(gamma);
    m.add_diag(1.0);
    logdet_hermitian_pd(&m)
}

/// `log2 det(I + B^H B)`.
pub fn logdet_i_plus_gram(b: &CMatrix) -> Result<f64> {
    let mut m = b.gram();
    m.add_diag(1.0);
    logdet_hermitian_pd(&m)
}

/// `log2 det(I + B B^H)`.
pub fn logdet_i_plus_outer(b: &CMatrix) -> Result<f64> {
    let mut m = b.outer_gram();
    m.add_diag(1.0);
    logdet_hermitian_pd(&m)
}

/// `log2 det(I + B^H B K^{-1})` for Hermitian positive-definite `K`.
///
/// With `K = L L^H` the argument is similar to `I + V V^H`, `V = L^{-1} B^H`,
/// so the determinant is evaluated on a Hermitian matrix.
pub fn logdet_i_plus_gram_times_inverse(b: &CMatrix, k: &CMatrix) -> Result<f64> {
    if k.rows() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{} but K is {}x{}",
            b.rows(),
            b.cols(),
            k.rows(),
            k.cols()
        )));
    }
    let chol = cholesky_hpd(k)?;
    let v = chol.solve_lower(&b.adjoint())?;
    logdet_i_plus_outer(&v)
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Assembles `[[A, C], [Ch, B]]`.
pub fn block2x2(a: &CMatrix, c: &CMatrix, ch: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    if c.shape() != (ra, cb) || ch.shape() != (rb, ca) {
        return Err(Error::DimensionMismatch(format!(
            "blocks A {ra}x{ca}, C {}x{}, Ch {}x{}, B {rb}x{cb} are not conformable",
            c.rows(),
            c.cols(),
            ch.rows(),
            ch.cols()
        )));
    }
    Ok(CMatrix::from_fn(ra + rb, ca + cb, |i, j| {
        match (i < ra, j < ca) {
            (true, true) => a[(i, j)],
            (true, false) => c[(i, j - ca)],
            (false, true) => ch[(i - ra, j)],
            (false, false) => b[(i - ra, j - ca)],
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rng::{sample_cgaussian, RngStream};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hpd(n: usize, seed: u64) -> CMatrix {
        let g = sample_cgaussian(n, n + 2, &RngStream::new(seed, 0));
        let mut m = g.outer_gram();
        m.add_diag(0.5);
        m
    }

    #[test]
    fn logdet_identity_and_diag() {
        assert_eq!(logdet_hermitian_pd(&CMatrix::identity(3)).unwrap(), 0.0);
        let d = CMatrix::from_real_diag(&[2.0, 2.0]);
        assert!((logdet_hermitian_pd(&d).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn logdet_rank_one_update() {
        // det(I + h h^H) = 1 + |h|^2 = 3 for h = (1, i).
        let h = CMatrix::from_vec(2, 1, vec![c(1., 0.), c(0., 1.)]).unwrap();
        let got = capacity_logdet(&h, 1.0).unwrap();
        assert!((got - 3f64.log2()).abs() < 1e-14);
        assert!((got - 1.584_962_500_721_156).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = CMatrix::from_vec(2, 2, vec![c(2., 0.), c(1., 0.), c(0., 0.), c(2., 0.)]).unwrap();
        assert!(matches!(
            logdet_hermitian_pd(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rejects_indefinite_after_retry() {
        let m = CMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(matches!(
            logdet_hermitian_pd(&m),
            Err(Error::NotPositiveDefinite)
        ));
        let z = CMatrix::zeros(2, 2);
        assert!(matches!(
            logdet_hermitian_pd(&z),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn jitter_rescues_semidefinite_rounding() {
        // Singular PSD matrix: rank one, the retry adds 1e-12 * trace / n.
        let h = CMatrix::from_vec(2, 1, vec![c(1., 0.), c(1., 0.)]).unwrap();
        let m = h.outer_gram();
        let l = logdet_hermitian_pd(&m).unwrap();
        assert!(l < -30.0);
    }

    #[test]
    fn capacity_edge_values() {
        let h = sample_cgaussian(3, 4, &RngStream::new(1, 1));
        assert_eq!(capacity_logdet(&h, 0.0).unwrap(), 0.0);
        assert!((capacity_logdet(&CMatrix::identity(2), 3.0).unwrap() - 4.0).abs() < 1e-14);
        assert!(capacity_logdet(&h, f64::INFINITY).is_err());
    }

    #[test]
    fn sylvester_on_3x5() {
        let h = sample_cgaussian(3, 5, &RngStream::new(11, 4));
        let a = capacity_logdet(&h, 2.5).unwrap();
        let b = capacity_logdet_gram_side(&h, 2.5).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn kron_examples() {
        let m = CMatrix::from_vec(2, 2, vec![c(1., 1.), c(2., 0.), c(0., -1.), c(3., 0.)]).unwrap();
        let k = kron(&CMatrix::identity(2), &m);
        assert_eq!(k.shape(), (4, 4));
        assert_eq!(k.columns(0, 2).rows(), 4);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(k[(i, j)], m[(i, j)]);
                assert_eq!(k[(i + 2, j + 2)], m[(i, j)]);
                assert_eq!(k[(i, j + 2)], ZERO);
                assert_eq!(k[(i + 2, j)], ZERO);
            }
        }
        let a = CMatrix::scalar(c(2., 1.));
        let b = CMatrix::scalar(c(0., 3.));
        assert_eq!(kron(&a, &b)[(0, 0)], c(2., 1.) * c(0., 3.));
    }

    #[test]
    fn kron_mixed_product() {
        let s = |id| sample_cgaussian(2, 2, &RngStream::new(5, id));
        let (a, b, cm, d) = (s(0), s(1), s(2), s(3));
        let lhs = &kron(&a, &b) * &kron(&cm, &d);
        let rhs = kron(&(&a * &cm), &(&b * &d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn block_examples() {
        let one = CMatrix::identity(1);
        let zero = CMatrix::zeros(1, 1);
        assert_eq!(
            block2x2(&one, &zero, &zero, &one).unwrap(),
            CMatrix::identity(2)
        );
        let i2 = CMatrix::identity(2);
        let z2 = CMatrix::zeros(2, 2);
        let blk = block2x2(&i2, &z2, &z2, &i2).unwrap();
        assert!(logdet_hermitian_pd(&blk).unwrap().abs() < 1e-15);
        assert!(block2x2(&i2, &CMatrix::zeros(2, 3), &z2, &i2).is_err());
    }

    #[test]
    fn block_schur_complement() {
        let a = random_hpd(3, 21);
        let b = random_hpd(2, 22);
        let cm = sample_cgaussian(3, 2, &RngStream::new(23, 0)).scale(0.3);
        let blk = block2x2(&a, &cm, &cm.adjoint(), &b).unwrap();
        let full = logdet_hermitian_pd(&blk).unwrap();
        let chol_a = cholesky_hpd(&a).unwrap();
        let schur = &b - &(&cm.adjoint() * &chol_a.solve(&cm).unwrap());
        let schur = symmetrized(&schur);
        let split = chol_a.logdet2() + logdet_hermitian_pd(&schur).unwrap();
        assert!((full - split).abs() <= 1e-9 * full.abs().max(1.0));
    }

    #[test]
    fn whitened_product_matches_direct_difference() {
        let b = sample_cgaussian(4, 3, &RngStream::new(31, 0));
        let k = random_hpd(3, 32);
        let lhs = logdet_i_plus_gram_times_inverse(&b, &k).unwrap();
        let rhs =
            logdet_hermitian_pd(&(&k + &b.gram())).unwrap() - logdet_hermitian_pd(&k).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn solve_roundtrip() {
        let m = random_hpd(4, 41);
        let rhs = sample_cgaussian(4, 2, &RngStream::new(42, 0));
        let x = cholesky_hpd(&m).unwrap().solve(&rhs).unwrap();
        assert!((&m * &x).max_abs_diff(&rhs) < 1e-10);
    }
}
