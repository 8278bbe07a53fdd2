use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use mimo_skc::channel::{sample_channels, ProbingConfig};
use mimo_skc::numerics::{
    block2x2, capacity_logdet, capacity_logdet_gram_side, kron, logdet_hermitian_pd,
    sample_cgaussian, CMatrix, RngStream,
};
use mimo_skc::skc::{c_b_sample, gap_sample, xi_b_sample, CbForm, GapForm, XiForm};

fn gaussian(rows: usize, cols: usize, seed: u64) -> CMatrix {
    sample_cgaussian(rows, cols, &RngStream::new(seed, 0))
}

fn to_nalgebra(m: &CMatrix) -> DMatrix<Complex64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// `log2 det` of a Hermitian PD matrix from nalgebra's eigenvalues.
fn eig_logdet(m: &CMatrix) -> f64 {
    to_nalgebra(m)
        .symmetric_eigenvalues()
        .iter()
        .map(|l| l.log2())
        .sum()
}

fn hpd(n: usize, seed: u64, shift: f64) -> CMatrix {
    let mut k = gaussian(n + 2, n, seed).gram();
    k.add_diag(shift);
    k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn logdet_matches_eigenvalues(n in 1usize..9, seed in any::<u64>(), shift in 0.01f64..10.0) {
        let k = hpd(n, seed, shift);
        let ours = logdet_hermitian_pd(&k).unwrap();
        prop_assert!((ours - eig_logdet(&k)).abs() < 1e-9 * (1.0 + ours.abs()));
    }

    #[test]
    fn sylvester(r in 1usize..9, c in 1usize..9, seed in any::<u64>(), gamma in 0.001f64..1e3) {
        let h = gaussian(r, c, seed);
        let outer = capacity_logdet(&h, gamma).unwrap();
        let inner = capacity_logdet_gram_side(&h, gamma).unwrap();
        prop_assert!((outer - inner).abs() < 1e-9 * (1.0 + outer.abs()), "{outer} {inner}");
    }

    #[test]
    fn schur_complement(n in 1usize..6, m in 1usize..6, seed in any::<u64>()) {
        let a = hpd(n, seed, 1.0);
        let b = hpd(m, seed.wrapping_add(1), 1.0);
        // Small coupling keeps the joint matrix positive definite.
        let c = gaussian(n, m, seed.wrapping_add(2)).scale(0.1);
        let joint = block2x2(&a, &c, &c.adjoint(), &b).unwrap();
        let a_inv_c = {
            let na = to_nalgebra(&a).try_inverse().unwrap();
            na * to_nalgebra(&c)
        };
        let schur = to_nalgebra(&b) - to_nalgebra(&c).adjoint() * a_inv_c;
        let schur = CMatrix::from_fn(m, m, |i, j| (schur[(i, j)] + schur[(j, i)].conj()) * 0.5);
        let lhs = logdet_hermitian_pd(&joint).unwrap();
        let rhs = logdet_hermitian_pd(&a).unwrap() + eig_logdet(&schur);
        prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn kron_mixed_product(p in 1usize..4, q in 1usize..4, r in 1usize..4, seed in any::<u64>()) {
        let a = gaussian(p, q, seed);
        let b = gaussian(r, p, seed ^ 1);
        let c = gaussian(q, r, seed ^ 2);
        let d = gaussian(p, q, seed ^ 3);
        // (A (x) B)(C (x) D) = AC (x) BD
        let lhs = kron(&a, &b).matmul(&kron(&c, &d)).unwrap();
        let rhs = kron(&a.matmul(&c).unwrap(), &b.matmul(&d).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12 * (1.0 + lhs.max_abs()));
    }

    #[test]
    fn kron_logdet_factorises(n in 1usize..4, m in 1usize..4, seed in any::<u64>()) {
        let a = hpd(n, seed, 0.5);
        let b = hpd(m, seed ^ 7, 0.5);
        let want = m as f64 * logdet_hermitian_pd(&a).unwrap() + n as f64 * logdet_hermitian_pd(&b).unwrap();
        let got = logdet_hermitian_pd(&kron(&a, &b)).unwrap();
        prop_assert!((got - want).abs() < 1e-9 * (1.0 + want.abs()));
    }
}

/// Random configs with all dimensions at most 8, over 1000 realizations in total.
#[test]
fn integrand_forms_agree_over_random_configs() {
    let mut checked = 0;
    for k in 0..50u64 {
        let mut rng = RngStream::new(99, k).rng();
        use rand::Rng;
        let mut c = ProbingConfig::new(
            rng.random_range(1..=8),
            rng.random_range(1..=8),
            rng.random_range(1..=8),
        );
        c.v_a = rng.random_range(0..=3);
        c.v_b = rng.random_range(0..=3);
        c.alpha_a_p = 10f64.powf(rng.random_range(-2.0..3.0));
        c.alpha_b_p = 10f64.powf(rng.random_range(-2.0..3.0));
        c.lambda_ea = 10f64.powf(rng.random_range(-2.0..2.0));
        c.lambda_eb = 10f64.powf(rng.random_range(-2.0..2.0));
        c.rho = Complex64::new(rng.random_range(-1.0..1.0), 0.0) * 0.7;
        for t in 0..20 {
            let r = sample_channels(&c, &RngStream::new(k, t));
            let gs = gap_sample(&r, &c, GapForm::Stacked).unwrap();
            let gi = gap_sample(&r, &c, GapForm::Inverse).unwrap();
            let xd = xi_b_sample(&r, &c, XiForm::Direct).unwrap();
            let xi = xi_b_sample(&r, &c, XiForm::Inverse).unwrap();
            let cs = c_b_sample(&r, &c, CbForm::Square).unwrap();
            let cr = c_b_sample(&r, &c, CbForm::Rectangular).unwrap();
            assert!((gs - gi).abs() < 1e-9, "gap {gs} {gi} {c:?}");
            assert!((xd - xi).abs() < 1e-9, "xi {xd} {xi} {c:?}");
            assert!((cs - cr).abs() < 1e-9, "c_b {cs} {cr} {c:?}");
            assert!(gi >= -1e-12);
            if c.v_b == 0 {
                assert_eq!((gs, gi), (0.0, 0.0));
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}
