//! The Wigner-Yanase entropy and the subadditivity slack functionals.
//!
//! Sign convention: `S(ρ, K) = Tr ρ^{1/2}Kρ^{1/2}K − Tr ρK²`, which is
//! never positive. The skew information is `−S`.
//!
//! Every inequality is reported as a [`SlackReport`] oriented so that the
//! inequality holds exactly when `slack ≥ 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{commutator, real_trace_product, sqrt_psd, HermitianMatrix};
use crate::states::{
    collective_expectations, local_sum_moments, one_particle_dm, one_particle_sqrt, reduced_one_site,
    reduced_one_site_sqrt, DensityMatrix, PureState, TRACE_TOL,
};

/// Slack below `-DEFAULT_VIOLATION_TOL` counts as a violation.
pub const DEFAULT_VIOLATION_TOL: f64 = 1e-9;

/// Which inequality a [`SlackReport`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InequalityId {
    /// Two-site subadditivity with independent observables.
    Bipartite,
    /// N-site subadditivity, one observable per site.
    NPartite,
    /// Identical observables, rhs through the one-particle density matrix.
    Symmetric,
    /// Two-point correlation form of the symmetric inequality.
    Correlation,
}

impl InequalityId {
    pub const ALL: [InequalityId; 4] = [Self::Bipartite, Self::NPartite, Self::Symmetric, Self::Correlation];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Bipartite => "bipartite",
            Self::NPartite => "n_partite",
            Self::Symmetric => "symmetric",
            Self::Correlation => "correlation",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s || id.as_str().replace('_', "-") == s)
            .ok_or_else(|| format!("unknown inequality '{s}'"))
    }
}

/// One evaluated inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlackReport {
    #[serde(rename = "inequality_id")]
    pub inequality: InequalityId,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub violated: bool,
    pub violation_tol: f64,
}

impl SlackReport {
    pub fn new(inequality: InequalityId, lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self {
            inequality,
            lhs,
            rhs,
            slack,
            violated: slack < -DEFAULT_VIOLATION_TOL,
            violation_tol: DEFAULT_VIOLATION_TOL,
        }
    }

    pub fn with_violation_tol(mut self, tol: f64) -> Self {
        self.violation_tol = tol;
        self.violated = self.slack < -tol;
        self
    }
}

fn check_dim(rho_dim: usize, k: &HermitianMatrix) -> Result<()> {
    if rho_dim != k.dim() {
        return Err(Error::DimensionMismatch {
            left: rho_dim,
            right: k.dim(),
        });
    }
    Ok(())
}

/// `Tr mK² − Tr m^{1/2}Km^{1/2}K` for any PSD `m`; equals `−S(m, K)` and is
/// homogeneous of degree one in `m`.
fn skew_term(m: &HermitianMatrix, k: &HermitianMatrix) -> Result<f64> {
    skew_term_with_root(m, &sqrt_psd(m)?, k)
}

fn skew_term_with_root(m: &HermitianMatrix, root: &HermitianMatrix, k: &HermitianMatrix) -> Result<f64> {
    check_dim(m.dim(), k)?;
    let direct = real_trace_product(&[m, k, k])?;
    let cross = real_trace_product(&[root, k, root, k])?;
    Ok(direct - cross)
}

/// The Wigner-Yanase entropy `S(ρ, K) = Tr ρ^{1/2}Kρ^{1/2}K − Tr ρK²`.
pub fn wy_entropy(rho: &DensityMatrix, k: &HermitianMatrix) -> Result<f64> {
    check_dim(rho.dim(), k)?;
    if !((rho.trace() - 1.0).abs() <= TRACE_TOL) {
        return Err(Error::TraceMismatch {
            expected: 1.0,
            found: rho.trace(),
        });
    }
    let s = -skew_term(rho.matrix(), k)?;
    #[cfg(debug_assertions)]
    {
        let via_commutator = wy_entropy_commutator(rho, k)?;
        debug_assert!(
            (s - via_commutator).abs() <= 1e-10 * (1.0 + s.abs()),
            "trace form {s} and commutator form {via_commutator} disagree"
        );
    }
    Ok(s)
}

/// `½ Tr [ρ^{1/2}, K]²`, the commutator route to the same quantity as
/// [`wy_entropy`].
pub fn wy_entropy_commutator(rho: &DensityMatrix, k: &HermitianMatrix) -> Result<f64> {
    check_dim(rho.dim(), k)?;
    let root = sqrt_psd(rho.matrix())?;
    let comm = commutator(&root, k)?;
    Ok(0.5 * comm.matmul(&comm)?.trace().re)
}

/// `−S(ρ_site, K)` with the square root taken from the amplitudes.
fn reduced_skew_term(psi: &PureState, site: usize, k: &HermitianMatrix) -> Result<f64> {
    let rho = reduced_one_site(psi, site)?;
    skew_term_with_root(rho.matrix(), &reduced_one_site_sqrt(psi, site)?, k)
}

/// Two-site subadditivity for pure states:
/// `S(|ψ⟩⟨ψ|, K₁⊗1 + 1⊗K₂) ≤ S(ρ₁, K₁) + S(ρ₂, K₂)`.
///
/// `lhs` is the subsystem sum, `rhs` the joint entropy.
pub fn bipartite_slack(psi: &PureState, k1: &HermitianMatrix, k2: &HermitianMatrix) -> Result<SlackReport> {
    if psi.n_sites() != 2 {
        return Err(Error::NotBipartite(psi.n_sites()));
    }
    let lhs = -reduced_skew_term(psi, 0, k1)? - reduced_skew_term(psi, 1, k2)?;
    // ρ^{1/2} = ρ for a pure state, so the joint entropy is minus a variance.
    let rhs = -local_sum_moments(psi, &[k1, k2])?.variance();
    Ok(SlackReport::new(InequalityId::Bipartite, lhs, rhs))
}

/// `Var_ψ(Σᵢ Kᵢ) ≥ Σᵢ (Tr ρᵢKᵢ² − Tr ρᵢ^{1/2}Kᵢρᵢ^{1/2}Kᵢ)`.
pub fn n_partite_slack(psi: &PureState, observables: &[&HermitianMatrix]) -> Result<SlackReport> {
    let lhs = local_sum_moments(psi, observables)?.variance();
    let mut rhs = 0.0;
    for (site, k) in observables.iter().enumerate() {
        rhs += reduced_skew_term(psi, site, k)?;
    }
    Ok(SlackReport::new(InequalityId::NPartite, lhs, rhs))
}

/// `Var_ψ(Σᵢ Kᵢ) ≥ Tr γK² − Tr γ^{1/2}Kγ^{1/2}K` with `γ` the one-particle
/// density matrix.
pub fn symmetric_slack(psi: &PureState, k: &HermitianMatrix) -> Result<SlackReport> {
    let moments = collective_expectations(psi, k)?;
    let gamma = one_particle_dm(psi)?;
    let rhs = skew_term_with_root(gamma.matrix(), &one_particle_sqrt(psi)?, k)?;
    Ok(SlackReport::new(InequalityId::Symmetric, moments.variance(), rhs))
}

/// `⟨ψ|Σ_{i≠j} KᵢKⱼ|ψ⟩ ≥ (Tr γK)² − Tr γ^{1/2}Kγ^{1/2}K`.
pub fn correlation_slack(psi: &PureState, k: &HermitianMatrix) -> Result<SlackReport> {
    let moments = collective_expectations(psi, k)?;
    let gamma = one_particle_dm(psi)?;
    let g = gamma.matrix();
    check_dim(g.dim(), k)?;
    let root = one_particle_sqrt(psi)?;
    let one_body_sq = real_trace_product(&[g, k, k])?;
    let one_body = real_trace_product(&[g, k])?;
    let cross = real_trace_product(&[&root, k, &root, k])?;
    let lhs = moments.second - one_body_sq;
    let rhs = one_body * one_body - cross;
    Ok(SlackReport::new(InequalityId::Correlation, lhs, rhs))
}

/// `S(λρ₁ + (1−λ)ρ₂, K) − λS(ρ₁, K) − (1−λ)S(ρ₂, K)`; concavity says
/// this is never negative.
pub fn concavity_probe(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    k: &HermitianMatrix,
    lambda: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::WeightOutOfRange(lambda));
    }
    check_dim(rho1.dim(), k)?;
    check_dim(rho2.dim(), k)?;
    let mixed = rho1.mix(rho2, lambda)?;
    Ok(wy_entropy(&mixed, k)? - lambda * wy_entropy(rho1, k)? - (1.0 - lambda) * wy_entropy(rho2, k)?)
}

/// Evaluates `id` on `psi`.
///
/// Observable counts: two for `bipartite`, one per site for `n_partite`
/// (a single one is replicated), exactly one for `symmetric` and
/// `correlation`.
pub fn evaluate(id: InequalityId, psi: &PureState, observables: &[HermitianMatrix]) -> Result<SlackReport> {
    let n = psi.n_sites();
    let count_err = |expected| Error::ObservableCount {
        expected,
        found: observables.len(),
    };
    match id {
        InequalityId::Bipartite => match observables {
            [k1, k2] => bipartite_slack(psi, k1, k2),
            [k] => bipartite_slack(psi, k, k),
            _ => Err(count_err(2)),
        },
        InequalityId::NPartite => {
            let ks: Vec<&HermitianMatrix> = match observables {
                [k] => vec![k; n],
                ks if ks.len() == n => ks.iter().collect(),
                _ => return Err(count_err(n)),
            };
            n_partite_slack(psi, &ks)
        }
        InequalityId::Symmetric | InequalityId::Correlation => {
            let [k] = observables else {
                return Err(count_err(1));
            };
            if id == InequalityId::Symmetric {
                symmetric_slack(psi, k)
            } else {
                correlation_slack(psi, k)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Complex;
    use crate::states::{pure_to_density, Normalization};
    use approx::assert_abs_diff_eq;

    fn proj_up() -> HermitianMatrix {
        HermitianMatrix::diagonal(&[1.0, 0.0]).unwrap()
    }

    fn witness() -> PureState {
        PureState::from_real(
            vec![2, 2, 2],
            &[2.0, 4.0, 4.0, 1.0, 4.0, 1.0, 1.0, 0.0],
            Normalization::Rescale,
        )
        .unwrap()
    }

    fn all_up() -> PureState {
        PureState::basis(vec![2, 2, 2], &[0, 0, 0]).unwrap()
    }

    #[test]
    fn report_orientation() {
        let r = SlackReport::new(InequalityId::Symmetric, 1.0, 1.5);
        assert_eq!(r.slack, -0.5);
        assert!(r.violated);
        let r = SlackReport::new(InequalityId::Symmetric, 1.0, 1.0 + 1e-10);
        assert!(!r.violated);
        assert!(r.with_violation_tol(1e-11).violated);
        assert_eq!("n-partite".parse::<InequalityId>(), Ok(InequalityId::NPartite));
        assert!("nope".parse::<InequalityId>().is_err());
    }

    #[test]
    fn wy_pure_state_is_negative_variance() {
        let phi = PureState::from_real(vec![2], &[0.6, 0.8], Normalization::Strict).unwrap();
        let k = HermitianMatrix::from_real_rows(&[vec![1.0, 0.5], vec![0.5, -1.0]], 0.0).unwrap();
        let m = local_sum_moments(&phi, &[&k]).unwrap();
        let s = wy_entropy(&pure_to_density(&phi).unwrap(), &k).unwrap();
        assert_abs_diff_eq!(s, m.first * m.first - m.second, epsilon = 1e-12);
    }

    #[test]
    fn wy_maximally_mixed_is_zero() {
        let rho = DensityMatrix::state(HermitianMatrix::diagonal(&[0.5, 0.5]).unwrap()).unwrap();
        assert_abs_diff_eq!(wy_entropy(&rho, &proj_up()).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn wy_reduced_witness_closed_form() {
        let rho1 = reduced_one_site(&witness(), 0).unwrap();
        let s410 = 410f64.sqrt();
        let expected = (37.0 + s410).powi(2) / (55.0 * (55.0 + 2.0 * s410)) - 37.0 / 55.0;
        let s = wy_entropy(&rho1, &proj_up()).unwrap();
        assert_abs_diff_eq!(s, expected, epsilon = 1e-13);
        assert_abs_diff_eq!(s, -0.048740, epsilon = 1e-6);
    }

    #[test]
    fn wy_errors() {
        let rho = DensityMatrix::state(HermitianMatrix::diagonal(&[0.5, 0.5]).unwrap()).unwrap();
        assert!(matches!(
            wy_entropy(&rho, &HermitianMatrix::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        let gamma = one_particle_dm(&witness()).unwrap();
        assert!(matches!(wy_entropy(&gamma, &proj_up()), Err(Error::TraceMismatch { .. })));
    }

    #[test]
    fn bipartite_examples() {
        let up = vec![Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
        let plus = vec![Complex::new(1.0, 0.0), Complex::new(1.0, 0.0)];
        let prod = PureState::product(&[up, plus]).unwrap();
        let x = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 0.0).unwrap();
        let r = bipartite_slack(&prod, &x, &proj_up()).unwrap();
        assert_abs_diff_eq!(r.slack, 0.0, epsilon = 1e-12);
        // −Var_X(|↑⟩) − Var_K(|+⟩) = −1 − 1/4
        assert_abs_diff_eq!(r.lhs, -1.25, epsilon = 1e-12);

        let bell = PureState::from_real(vec![2, 2], &[1.0, 0.0, 0.0, 1.0], Normalization::Rescale).unwrap();
        let r = bipartite_slack(&bell, &proj_up(), &proj_up()).unwrap();
        assert_abs_diff_eq!(r.lhs, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.rhs, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.slack, 1.0, epsilon = 1e-14);
        assert!(!r.violated);

        assert_eq!(bipartite_slack(&witness(), &proj_up(), &proj_up()), Err(Error::NotBipartite(3)));
    }

    #[test]
    fn n_partite_examples() {
        let k = proj_up();
        let r = n_partite_slack(&witness(), &[&k, &k, &k]).unwrap();
        assert_abs_diff_eq!(r.lhs, 384.0 / 3025.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.rhs, 0.146221, epsilon = 1e-6);
        assert!(r.violated);

        let bell = PureState::from_real(vec![2, 2], &[1.0, 0.5, -0.3, 1.0], Normalization::Rescale).unwrap();
        let x = HermitianMatrix::from_real_rows(&[vec![0.2, 1.0], vec![1.0, -0.7]], 0.0).unwrap();
        let a = n_partite_slack(&bell, &[&x, &k]).unwrap();
        let b = bipartite_slack(&bell, &x, &k).unwrap();
        assert_abs_diff_eq!(a.slack, b.slack, epsilon = 1e-12);

        let factors = vec![
            vec![Complex::new(0.3, 0.1), Complex::new(-0.8, 0.0)],
            vec![Complex::new(1.0, 0.0), Complex::new(0.0, 2.0)],
            vec![Complex::new(0.5, 0.0), Complex::new(0.5, 0.0)],
        ];
        let prod = PureState::product(&factors).unwrap();
        let r = n_partite_slack(&prod, &[&x, &k, &x]).unwrap();
        assert_abs_diff_eq!(r.slack, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.lhs, r.rhs, epsilon = 1e-12);

        assert!(matches!(
            n_partite_slack(&prod, &[&x, &k]),
            Err(Error::ObservableCount { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn symmetric_examples() {
        let r = symmetric_slack(&witness(), &proj_up()).unwrap();
        assert_abs_diff_eq!(r.lhs, 384.0 / 3025.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.rhs, 0.146221, epsilon = 1e-6);
        assert_abs_diff_eq!(r.slack, -0.019279, epsilon = 1e-6);
        assert!(r.violated);

        let r = symmetric_slack(&all_up(), &proj_up()).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_abs_diff_eq!(r.rhs, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.slack, 0.0, epsilon = 1e-14);

        let odd = PureState::basis(vec![2, 3], &[0, 0]).unwrap();
        assert!(symmetric_slack(&odd, &proj_up()).is_err());
    }

    #[test]
    fn correlation_examples() {
        let r = correlation_slack(&witness(), &proj_up()).unwrap();
        assert_abs_diff_eq!(r.lhs, 120.0 / 55.0, epsilon = 1e-13);
        let s = symmetric_slack(&witness(), &proj_up()).unwrap();
        assert_abs_diff_eq!(r.slack, s.slack, epsilon = 1e-12);

        let r = correlation_slack(&all_up(), &proj_up()).unwrap();
        assert_abs_diff_eq!(r.lhs, 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.rhs, 6.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.slack, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn concavity_endpoints() {
        let a = DensityMatrix::state(
            HermitianMatrix::from_real_rows(&[vec![0.7, 0.2], vec![0.2, 0.3]], 0.0).unwrap(),
        )
        .unwrap();
        let b = DensityMatrix::state(HermitianMatrix::diagonal(&[0.1, 0.9]).unwrap()).unwrap();
        let k = HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]], 0.0).unwrap();
        assert_abs_diff_eq!(concavity_probe(&a, &b, &k, 0.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(concavity_probe(&a, &b, &k, 1.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(concavity_probe(&a, &a, &k, 0.3).unwrap(), 0.0, epsilon = 1e-12);
        assert!(concavity_probe(&a, &b, &k, 0.5).unwrap() >= 0.0);
        assert_eq!(concavity_probe(&a, &b, &k, -0.1), Err(Error::WeightOutOfRange(-0.1)));
    }

    #[test]
    fn evaluate_dispatch() {
        let p = witness();
        let k = proj_up();
        let one = [k.clone()];
        assert_eq!(evaluate(InequalityId::Symmetric, &p, &one).unwrap(), symmetric_slack(&p, &k).unwrap());
        assert_eq!(
            evaluate(InequalityId::NPartite, &p, &one).unwrap(),
            n_partite_slack(&p, &[&k, &k, &k]).unwrap()
        );
        assert!(matches!(
            evaluate(InequalityId::Correlation, &p, &[k.clone(), k.clone()]),
            Err(Error::ObservableCount { expected: 1, found: 2 })
        ));
        assert_eq!(
            evaluate(InequalityId::Bipartite, &p, &one),
            Err(Error::NotBipartite(3))
        );
    }
}
