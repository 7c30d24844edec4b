use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wy_skew::sampling::{random_density_matrix, random_hermitian, random_product_state, random_pure_state, random_unitary};
use wy_skew::skew::{
    bipartite_slack, concavity_probe, correlation_slack, n_partite_slack, symmetric_slack, wy_entropy,
    wy_entropy_commutator,
};
use wy_skew::states::{local_sum_moments, pure_to_density};
use wy_skew::{DensityMatrix, HermitianMatrix};

proptest! {
    #[test]
    fn entropy_is_non_positive(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(&mut rng, dim);
        let k = random_hermitian(&mut rng, dim);
        prop_assert!(wy_entropy(&rho, &k).unwrap() <= 1e-12);
    }

    #[test]
    fn entropy_ignores_identity_shift(seed in any::<u64>(), dim in 1usize..=6, c in -5.0f64..5.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(&mut rng, dim);
        let k = random_hermitian(&mut rng, dim);
        let shifted = k.combine(1.0, &HermitianMatrix::identity(dim), c).unwrap();
        let a = wy_entropy(&rho, &k).unwrap();
        let b = wy_entropy(&rho, &shifted).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + c.abs()).powi(2) * (1.0 + k.frobenius_norm()).powi(2));
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), dim in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(&mut rng, dim);
        let k = random_hermitian(&mut rng, dim);
        let u = random_unitary(&mut rng, dim);
        let rho_u = DensityMatrix::state(rho.matrix().conjugate_by(&u).unwrap()).unwrap();
        let k_u = k.conjugate_by(&u).unwrap();
        let a = wy_entropy(&rho, &k).unwrap();
        let b = wy_entropy(&rho_u, &k_u).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + k.frobenius_norm()).powi(2));
    }

    #[test]
    fn pure_state_entropy_is_minus_variance(seed in any::<u64>(), dims in prop::collection::vec(2usize..=3, 1..=3)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure_state(&mut rng, &dims, true);
        let ks: Vec<HermitianMatrix> = dims.iter().map(|&d| random_hermitian(&mut rng, d)).collect();
        let refs: Vec<&HermitianMatrix> = ks.iter().collect();
        let var = local_sum_moments(&psi, &refs).unwrap().variance();
        // the same operator, built on the full space
        let total: usize = dims.iter().product();
        let op = {
            let mut sum = wy_skew::Matrix::zeros(total);
            for (site, k) in ks.iter().enumerate() {
                let mut m = wy_skew::Matrix::identity(1);
                for (j, &d) in dims.iter().enumerate() {
                    m = wy_skew::linalg::kron(&m, &if j == site { k.to_matrix() } else { wy_skew::Matrix::identity(d) });
                }
                sum = wy_skew::Matrix::from_fn(total, |i, j| sum.get(i, j) + m.get(i, j));
            }
            HermitianMatrix::symmetrize(&sum).unwrap()
        };
        let s = wy_entropy(&pure_to_density(&psi).unwrap(), &op).unwrap();
        prop_assert!((s + var).abs() <= 1e-10 * (1.0 + var));
    }

    #[test]
    fn bipartite_holds(seed in any::<u64>(), d1 in 2usize..=4, d2 in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure_state(&mut rng, &[d1, d2], true);
        let k1 = random_hermitian(&mut rng, d1);
        let k2 = random_hermitian(&mut rng, d2);
        prop_assert!(bipartite_slack(&psi, &k1, &k2).unwrap().slack >= -1e-10);
    }

    #[test]
    fn two_site_symmetric_holds(seed in any::<u64>(), d in 2usize..=4, complex in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure_state(&mut rng, &[d, d], complex);
        let k = random_hermitian(&mut rng, d);
        prop_assert!(symmetric_slack(&psi, &k).unwrap().slack >= -1e-10);
    }

    #[test]
    fn correlation_form_equals_symmetric_form(seed in any::<u64>(), n in 2usize..=4, d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_pure_state(&mut rng, &vec![d; n], true);
        let k = random_hermitian(&mut rng, d);
        let a = symmetric_slack(&psi, &k).unwrap();
        let b = correlation_slack(&psi, &k).unwrap();
        prop_assert!((a.slack - b.slack).abs() <= 1e-10 * (1.0 + k.frobenius_norm()).powi(2));
    }

    #[test]
    fn commutator_form_equals_trace_form(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(&mut rng, dim);
        let k = random_hermitian(&mut rng, dim);
        let a = wy_entropy(&rho, &k).unwrap();
        let b = wy_entropy_commutator(&rho, &k).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + k.frobenius_norm()).powi(2));
    }

    #[test]
    fn entropy_is_concave(seed in any::<u64>(), dim in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r1 = random_density_matrix(&mut rng, dim);
        let r2 = random_density_matrix(&mut rng, dim);
        let k = random_hermitian(&mut rng, dim);
        let lambda: f64 = rng.random_range(0.0..=1.0);
        prop_assert!(concavity_probe(&r1, &r2, &k, lambda).unwrap() >= -1e-10);
    }

    #[test]
    fn product_states_saturate_per_site_form(seed in any::<u64>(), n in 2usize..=4) {
        // with no correlations both sides are the sum of local variances
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_product_state(&mut rng, &vec![2; n]);
        let ks: Vec<HermitianMatrix> = (0..n).map(|_| random_hermitian(&mut rng, 2)).collect();
        let refs: Vec<&HermitianMatrix> = ks.iter().collect();
        prop_assert!(n_partite_slack(&psi, &refs).unwrap().slack.abs() <= 1e-10);
    }
}
