//! Random ensembles used by the property checks and the search.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{eig_hermitian, Complex, HermitianMatrix, Matrix};
use crate::states::{DensityMatrix, Normalization, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    Complex::new(gaussian(rng), gaussian(rng))
}

/// Gaussian Hermitian matrix (GUE up to normalization).
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let entries: Vec<Complex> = (0..dim * dim).map(|_| complex_gaussian(rng)).collect();
    HermitianMatrix::from_fn(dim, |i, j| entries[i * dim + j]).expect("finite gaussian entries")
}

/// Gaussian real symmetric matrix.
pub fn random_real_symmetric<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let entries: Vec<f64> = (0..dim * dim).map(|_| gaussian(rng)).collect();
    HermitianMatrix::from_fn(dim, |i, j| Complex::new(entries[i * dim + j], 0.0)).expect("finite gaussian entries")
}

/// `G·G†` for a `dim × rank` complex Gaussian `G`; PSD with rank at most `rank`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, dim: usize, rank: usize) -> HermitianMatrix {
    let g: Vec<Complex> = (0..dim * rank).map(|_| complex_gaussian(rng)).collect();
    HermitianMatrix::from_fn(dim, |i, j| {
        (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
    })
    .expect("finite gaussian entries")
}

/// Unit-trace density matrix of uniformly random rank in `1..=dim`.
pub fn random_density_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let rank = rng.random_range(1..=dim);
    let m = random_psd(rng, dim, rank);
    let m = m.scale(1.0 / m.trace());
    let tr = m.trace();
    DensityMatrix::new(m, None, tr).expect("Gram matrices are PSD")
}

/// Haar-ish random pure state: normalized Gaussian amplitudes.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, local_dims: &[usize], complex: bool) -> PureState {
    let total: usize = local_dims.iter().product();
    let amps: Vec<Complex> = (0..total)
        .map(|_| {
            if complex {
                complex_gaussian(rng)
            } else {
                Complex::new(gaussian(rng), 0.0)
            }
        })
        .collect();
    PureState::new(local_dims.to_vec(), amps, Normalization::Rescale).expect("nonzero gaussian vector")
}

/// Random product state of the given local dimensions.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R, local_dims: &[usize]) -> PureState {
    let factors: Vec<Vec<Complex>> = local_dims
        .iter()
        .map(|&d| (0..d).map(|_| complex_gaussian(rng)).collect())
        .collect();
    PureState::product(&factors).expect("nonzero gaussian factors")
}

/// Unitary from the eigenvectors of a random Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Matrix {
    eig_hermitian(&random_hermitian(rng, dim))
        .expect("Jacobi converges on gaussian input")
        .eigenvectors
}

/// Point drawn uniformly from the unit sphere in `ℝ^len`.
pub fn unit_sphere_point<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}
