use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wy_skew::linalg::{commutator, eig_hermitian, real_trace_product, sqrt_gram, sqrt_psd, Matrix};
use wy_skew::sampling::{random_hermitian, random_psd, random_unitary};
use wy_skew::{Complex, HermitianMatrix};

fn max_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.sub(b).unwrap().as_slice().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), dim in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&mut rng, dim);
        let eig = eig_hermitian(&a).unwrap();
        let back = eig.reconstruct().unwrap();
        prop_assert!(max_diff(&back.to_matrix(), &a.to_matrix()) <= 1e-10 * (1.0 + a.frobenius_norm()));
        let v = &eig.eigenvectors;
        prop_assert!(max_diff(&v.adjoint().matmul(v).unwrap(), &Matrix::identity(dim)) <= 1e-12);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), dim in 1usize..=8, rank_frac in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rank = 1 + (rank_frac * dim as f64) as usize;
        let a = random_psd(&mut rng, dim, rank.min(dim));
        let r = sqrt_psd(&a).unwrap();
        let sq = r.matmul(&r).unwrap();
        prop_assert!(max_diff(&sq, &a.to_matrix()) <= 1e-9 * a.frobenius_norm());
        let eig = eig_hermitian(&r).unwrap();
        prop_assert!(eig.eigenvalues[0] >= -1e-12);
    }

    #[test]
    fn gram_root_agrees_with_spectral_root(seed in any::<u64>(), dim in 1usize..=6, cols in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_hermitian(&mut rng, dim.max(cols));
        let b: Vec<Complex> = (0..dim * cols).map(|i| g.as_slice()[i]).collect();
        let gram = HermitianMatrix::from_fn(dim, |i, j| {
            (0..cols).map(|k| b[i * cols + k] * b[j * cols + k].conj()).sum()
        }).unwrap();
        let via_gram = sqrt_gram(dim, &b).unwrap();
        let sq = via_gram.matmul(&via_gram).unwrap();
        prop_assert!(max_diff(&sq, &gram.to_matrix()) <= 1e-12 * (1.0 + gram.frobenius_norm()));
        if cols >= dim {
            // full rank almost surely, where the spectral route is accurate too
            let via_eig = sqrt_psd(&gram).unwrap();
            let scale = 1.0 + via_eig.frobenius_norm();
            let min_eig = eig_hermitian(&gram).unwrap().eigenvalues[0];
            prop_assume!(min_eig > 1e-6 * gram.frobenius_norm());
            prop_assert!(max_diff(&via_gram.to_matrix(), &via_eig.to_matrix()) <= 1e-9 * scale);
        }
    }

    #[test]
    fn sqrt_is_unitarily_covariant(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_psd(&mut rng, dim, dim);
        let u = random_unitary(&mut rng, dim);
        let lhs = sqrt_psd(&a.conjugate_by(&u).unwrap()).unwrap();
        let rhs = sqrt_psd(&a).unwrap().conjugate_by(&u).unwrap();
        prop_assert!(max_diff(&lhs.to_matrix(), &rhs.to_matrix()) <= 1e-9 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn sqrt_matches_two_by_two_closed_form(a in 0.01f64..10.0, c in 0.01f64..10.0, t in -1.0f64..1.0, phase in 0.0f64..6.3) {
        // |b| < √(ac) keeps the matrix positive definite
        let b = Complex::from_polar(0.999 * t * (a * c).sqrt(), phase);
        let m = HermitianMatrix::from_rows(&[vec![Complex::new(a, 0.0), b], vec![b.conj(), Complex::new(c, 0.0)]], 0.0).unwrap();
        let s = (a * c - b.norm_sqr()).sqrt();
        let t = (a + c + 2.0 * s).sqrt();
        let expected = HermitianMatrix::from_rows(&[
            vec![Complex::new((a + s) / t, 0.0), b / t],
            vec![b.conj() / t, Complex::new((c + s) / t, 0.0)],
        ], 0.0).unwrap();
        let r = sqrt_psd(&m).unwrap();
        prop_assert!(max_diff(&r.to_matrix(), &expected.to_matrix()) <= 1e-10 * (1.0 + t));
    }

    #[test]
    fn squared_commutator_trace_is_non_positive(seed in any::<u64>(), dim in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hermitian(&mut rng, dim);
        let b = random_hermitian(&mut rng, dim);
        let c = commutator(&a, &b).unwrap();
        let tr = 0.5 * c.matmul(&c).unwrap().trace();
        prop_assert!(tr.re <= 1e-12 * (1.0 + a.frobenius_norm() * b.frobenius_norm()).powi(2));
        prop_assert!(tr.im.abs() <= 1e-10 * (1.0 + a.frobenius_norm() * b.frobenius_norm()).powi(2));
    }

    #[test]
    fn trace_products_are_cyclic(seed in any::<u64>(), dim in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_psd(&mut rng, dim, dim);
        let k = random_hermitian(&mut rng, dim);
        let r = sqrt_psd(&a).unwrap();
        let x = real_trace_product(&[&r, &k, &r, &k]).unwrap();
        let y = real_trace_product(&[&k, &r, &k, &r]).unwrap();
        prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
    }
}
