//! Multipartite pure states, density matrices and partial traces.
//!
//! Basis ordering is lexicographic with site 0 most significant: the basis
//! vector `|s₀ s₁ … s_{N−1}⟩` sits at flat index `Σᵢ sᵢ·Π_{j>i} d_j`. For
//! qubits, local index 0 is "up" and 1 is "down".

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, sqrt_gram, Complex, HermitianMatrix, PSD_CLAMP};

/// Tolerance on `‖ψ‖² − 1` accepted by [`Normalization::Strict`].
pub const NORM_TOL: f64 = 1e-12;

/// Tolerance on a density matrix trace against its declared value.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Reject amplitudes whose squared norm is off by more than [`NORM_TOL`].
    Strict,
    /// Rescale to unit norm.
    Rescale,
}

/// A normalized vector in `⊗ᵢ ℂ^{dᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    local_dims: Vec<usize>,
    amplitudes: Vec<Complex>,
}

impl PureState {
    pub fn new(
        local_dims: Vec<usize>,
        amplitudes: Vec<Complex>,
        normalization: Normalization,
    ) -> Result<Self> {
        let total = total_dim(&local_dims)?;
        if amplitudes.len() != total {
            return Err(Error::LengthMismatch {
                expected: total,
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("amplitudes"));
        }
        let norm_sqr = squared_norm(&amplitudes);
        if !(norm_sqr > 0.0) || !norm_sqr.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let amplitudes = match normalization {
            Normalization::Strict => {
                if (norm_sqr - 1.0).abs() > NORM_TOL {
                    return Err(Error::NotNormalized(norm_sqr));
                }
                amplitudes
            }
            Normalization::Rescale => {
                let inv = 1.0 / norm_sqr.sqrt();
                amplitudes.into_iter().map(|z| z * inv).collect()
            }
        };
        Ok(Self {
            local_dims,
            amplitudes,
        })
    }

    pub fn from_real(local_dims: Vec<usize>, amplitudes: &[f64], normalization: Normalization) -> Result<Self> {
        let amps = amplitudes.iter().map(|&x| Complex::new(x, 0.0)).collect();
        Self::new(local_dims, amps, normalization)
    }

    /// Computational basis state with the given local indices.
    pub fn basis(local_dims: Vec<usize>, digits: &[usize]) -> Result<Self> {
        let total = total_dim(&local_dims)?;
        let index = flat_index(&local_dims, digits)?;
        let mut amps = vec![Complex::new(0.0, 0.0); total];
        amps[index] = Complex::new(1.0, 0.0);
        Self::new(local_dims, amps, Normalization::Strict)
    }

    /// Tensor product of single-site vectors, each normalized first.
    pub fn product(factors: &[Vec<Complex>]) -> Result<Self> {
        let local_dims: Vec<usize> = factors.iter().map(Vec::len).collect();
        total_dim(&local_dims)?;
        let mut amps = vec![Complex::new(1.0, 0.0)];
        for f in factors {
            let norm = squared_norm(f).sqrt();
            if !(norm > 0.0) {
                return Err(Error::ZeroNorm);
            }
            amps = amps
                .iter()
                .flat_map(|a| f.iter().map(move |b| a * b / norm))
                .collect();
        }
        Self::new(local_dims, amps, Normalization::Rescale)
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex> {
        Ok(self.amplitudes[flat_index(&self.local_dims, digits)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        squared_norm(&self.amplitudes)
    }

    /// Common local dimension, if all sites share one.
    pub fn uniform_local_dim(&self) -> Option<usize> {
        let d = self.local_dims[0];
        self.local_dims.iter().all(|&x| x == d).then_some(d)
    }

    /// `(left, d, right)` so that the amplitude tensor reshapes to
    /// `left × d × right` around `site`.
    fn split_at_site(&self, site: usize) -> Result<(usize, usize, usize)> {
        let n = self.n_sites();
        if site >= n {
            return Err(Error::SiteOutOfRange { site, n_sites: n });
        }
        let left = self.local_dims[..site].iter().product();
        let right = self.local_dims[site + 1..].iter().product();
        Ok((left, self.local_dims[site], right))
    }
}

/// `Σᵢ |zᵢ|²`.
pub fn squared_norm(amplitudes: &[Complex]) -> f64 {
    amplitudes.iter().map(|z| z.norm_sqr()).sum()
}

fn total_dim(local_dims: &[usize]) -> Result<usize> {
    if local_dims.is_empty() || local_dims.contains(&0) {
        return Err(Error::InvalidLocalDims);
    }
    local_dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or(Error::InvalidLocalDims)
}

/// Flat index of the basis vector with local indices `digits`.
pub fn flat_index(local_dims: &[usize], digits: &[usize]) -> Result<usize> {
    if digits.len() != local_dims.len() {
        return Err(Error::LengthMismatch {
            expected: local_dims.len(),
            found: digits.len(),
        });
    }
    let mut index = 0;
    for (site, (&s, &d)) in digits.iter().zip(local_dims).enumerate() {
        if s >= d {
            return Err(Error::LocalIndexOutOfRange { site, index: s, dim: d });
        }
        index = index * d + s;
    }
    Ok(index)
}

/// Inverse of [`flat_index`].
pub fn digits_of(local_dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; local_dims.len()];
    for (slot, &d) in digits.iter_mut().zip(local_dims).rev() {
        *slot = index % d;
        index /= d;
    }
    digits
}

/// A positive semidefinite Hermitian matrix with a declared trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: HermitianMatrix,
    local_dims: Option<Vec<usize>>,
    trace: f64,
}

impl DensityMatrix {
    /// Validates PSD (within [`PSD_CLAMP`]) and the trace (within
    /// [`TRACE_TOL`]) before wrapping.
    pub fn new(matrix: HermitianMatrix, local_dims: Option<Vec<usize>>, declared_trace: f64) -> Result<Self> {
        if let Some(dims) = &local_dims {
            let total = total_dim(dims)?;
            if total != matrix.dim() {
                return Err(Error::DimensionMismatch {
                    left: total,
                    right: matrix.dim(),
                });
            }
        }
        let tr = matrix.trace();
        if !((tr - declared_trace).abs() <= TRACE_TOL) {
            return Err(Error::TraceMismatch {
                expected: declared_trace,
                found: tr,
            });
        }
        let lowest = eig_hermitian(&matrix)?.eigenvalues[0];
        if lowest < -PSD_CLAMP {
            return Err(Error::NotPsd(lowest));
        }
        Ok(Self {
            matrix,
            local_dims,
            trace: declared_trace,
        })
    }

    /// A unit-trace state without multipartite structure.
    pub fn state(matrix: HermitianMatrix) -> Result<Self> {
        Self::new(matrix, None, 1.0)
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn local_dims(&self) -> Option<&[usize]> {
        self.local_dims.as_deref()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::WeightOutOfRange(lambda));
        }
        let m = self.matrix.combine(lambda, &other.matrix, 1.0 - lambda)?;
        let tr = lambda * self.trace + (1.0 - lambda) * other.trace;
        let dims = if self.local_dims == other.local_dims {
            self.local_dims.clone()
        } else {
            None
        };
        DensityMatrix::new(m, dims, tr)
    }
}

/// Sites kept by a partial trace: non-empty, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSubset(Vec<usize>);

impl SiteSubset {
    pub fn new(sites: Vec<usize>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidSubset("empty"));
        }
        if sites.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset("sites must be strictly increasing"));
        }
        Ok(Self(sites))
    }

    pub fn single(site: usize) -> Self {
        Self(vec![site])
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }
}

/// `|ψ⟩⟨ψ|`, keeping the multipartite structure.
pub fn pure_to_density(psi: &PureState) -> Result<DensityMatrix> {
    let a = &psi.amplitudes;
    let m = HermitianMatrix::from_fn(a.len(), |i, j| a[i] * a[j].conj())?;
    DensityMatrix::new(m, Some(psi.local_dims.clone()), 1.0)
}

/// Traces out every site not in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &SiteSubset) -> Result<DensityMatrix> {
    let dims = rho.local_dims().ok_or(Error::MissingLocalDims)?;
    let n = dims.len();
    if let Some(&bad) = keep.sites().iter().find(|&&s| s >= n) {
        return Err(Error::SiteOutOfRange { site: bad, n_sites: n });
    }
    let kept_dims: Vec<usize> = keep.sites().iter().map(|&s| dims[s]).collect();
    let traced: Vec<usize> = (0..n).filter(|s| !keep.sites().contains(s)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&s| dims[s]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let env_dim: usize = traced_dims.iter().product();

    // Flat index of (kept digits, traced digits) in the full space.
    let compose = |k: usize, e: usize| -> usize {
        let kd = digits_of(&kept_dims, k);
        let ed = digits_of(&traced_dims, e);
        let mut full = vec![0; n];
        for (slot, &s) in keep.sites().iter().enumerate() {
            full[s] = kd[slot];
        }
        for (slot, &s) in traced.iter().enumerate() {
            full[s] = ed[slot];
        }
        digits_to_index(dims, &full)
    };
    let table: Vec<Vec<usize>> = (0..out_dim)
        .map(|k| (0..env_dim).map(|e| compose(k, e)).collect())
        .collect();

    let m = rho.matrix();
    let reduced = HermitianMatrix::from_fn(out_dim, |a, b| {
        (0..env_dim).map(|e| m.get(table[a][e], table[b][e])).sum()
    })?;
    DensityMatrix::new(reduced, Some(kept_dims), rho.trace())
}

fn digits_to_index(dims: &[usize], digits: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&s, &d)| acc * d + s)
}

/// Reduced state on a single site, contracted directly from the amplitudes.
pub fn reduced_one_site(psi: &PureState, site: usize) -> Result<DensityMatrix> {
    let m = reduced_matrix(psi, site)?;
    DensityMatrix::new(m, Some(vec![psi.local_dims[site]]), 1.0)
}

fn reduced_matrix(psi: &PureState, site: usize) -> Result<HermitianMatrix> {
    let (left, d, right) = psi.split_at_site(site)?;
    let amps = &psi.amplitudes;
    HermitianMatrix::from_fn(d, |a, b| {
        let mut acc = Complex::new(0.0, 0.0);
        for l in 0..left {
            let base = l * d * right;
            for r in 0..right {
                acc += amps[base + a * right + r] * amps[base + b * right + r].conj();
            }
        }
        acc
    })
}

/// Amplitudes reshaped to a `d × (D/d)` matrix `M` with the given site as
/// row index, so that `ρ_site = M·M†`. Row-major.
pub fn site_factor(psi: &PureState, site: usize) -> Result<Vec<Complex>> {
    let (left, d, right) = psi.split_at_site(site)?;
    let mut out = Vec::with_capacity(psi.total_dim());
    for a in 0..d {
        for l in 0..left {
            let base = l * d * right + a * right;
            out.extend_from_slice(&psi.amplitudes[base..base + right]);
        }
    }
    Ok(out)
}

/// `ρ_site^{1/2}`, computed from the amplitude factor rather than from `ρ`.
pub fn reduced_one_site_sqrt(psi: &PureState, site: usize) -> Result<HermitianMatrix> {
    let factor = site_factor(psi, site)?;
    sqrt_gram(psi.local_dims[site], &factor)
}

/// `γ^{1/2}` from the factor `[M₀ | M₁ | …]` whose Gram matrix is `γ`.
pub fn one_particle_sqrt(psi: &PureState) -> Result<HermitianMatrix> {
    let d = psi.uniform_local_dim().ok_or(Error::UnequalLocalDims)?;
    let factors = (0..psi.n_sites())
        .map(|site| site_factor(psi, site))
        .collect::<Result<Vec<_>>>()?;
    let width = psi.total_dim() / d;
    let mut joined = Vec::with_capacity(width * d * psi.n_sites());
    for a in 0..d {
        for f in &factors {
            joined.extend_from_slice(&f[a * width..(a + 1) * width]);
        }
    }
    sqrt_gram(d, &joined)
}

/// One-particle density matrix `γ = Σᵢ ρᵢ`; trace equals the number of sites.
pub fn one_particle_dm(psi: &PureState) -> Result<DensityMatrix> {
    let d = psi.uniform_local_dim().ok_or(Error::UnequalLocalDims)?;
    let mut gamma = reduced_matrix(psi, 0)?;
    for site in 1..psi.n_sites() {
        gamma = gamma.add(&reduced_matrix(psi, site)?)?;
    }
    DensityMatrix::new(gamma, Some(vec![d]), psi.n_sites() as f64)
}

/// First and second moment of a sum of local observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub first: f64,
    pub second: f64,
}

impl Moments {
    pub fn variance(&self) -> f64 {
        self.second - self.first * self.first
    }
}

/// `⟨Σᵢ Kᵢ⟩` and `⟨(Σᵢ Kᵢ)²⟩` where `Kᵢ` acts on site `i`.
///
/// The sum is applied site by site to the amplitude vector, so the full
/// operator is never formed.
pub fn local_sum_moments(psi: &PureState, observables: &[&HermitianMatrix]) -> Result<Moments> {
    let n = psi.n_sites();
    if observables.len() != n {
        return Err(Error::ObservableCount {
            expected: n,
            found: observables.len(),
        });
    }
    let mut applied = vec![Complex::new(0.0, 0.0); psi.total_dim()];
    for (site, k) in observables.iter().enumerate() {
        apply_local(psi, site, k, &mut applied)?;
    }
    let first: Complex = psi
        .amplitudes
        .iter()
        .zip(&applied)
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(Moments {
        first: first.re,
        second: squared_norm(&applied),
    })
}

/// `out += K_site |ψ⟩`.
fn apply_local(psi: &PureState, site: usize, k: &HermitianMatrix, out: &mut [Complex]) -> Result<()> {
    let (left, d, right) = psi.split_at_site(site)?;
    if k.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: k.dim(),
        });
    }
    let amps = &psi.amplitudes;
    for l in 0..left {
        let base = l * d * right;
        for a in 0..d {
            for b in 0..d {
                let kab = k.get(a, b);
                if kab.re == 0.0 && kab.im == 0.0 {
                    continue;
                }
                for r in 0..right {
                    out[base + a * right + r] += kab * amps[base + b * right + r];
                }
            }
        }
    }
    Ok(())
}

/// [`local_sum_moments`] with the same `K` on every site.
pub fn collective_expectations(psi: &PureState, k: &HermitianMatrix) -> Result<Moments> {
    if psi.local_dims.iter().any(|&d| d != k.dim()) {
        return Err(Error::DimensionMismatch {
            left: psi.local_dims[0],
            right: k.dim(),
        });
    }
    let ks = vec![k; psi.n_sites()];
    local_sum_moments(psi, &ks)
}
