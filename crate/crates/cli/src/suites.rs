//! Randomized checks of the theorems and identities the toolkit relies on.
//!
//! Trial `t` of a run seeded with `s` draws everything from its own stream
//! seeded by `restart_seed(s, t)`, so any single failure can be replayed
//! without rerunning the trials before it.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wy_skew::sampling::{random_density_matrix, random_hermitian, random_pure_state};
use wy_skew::search::restart_seed;
use wy_skew::skew::{
    bipartite_slack, concavity_probe, correlation_slack, symmetric_slack, wy_entropy, wy_entropy_commutator,
};
use wy_skew::{DensityMatrix, HermitianMatrix, PureState, Result};

use crate::files::{ObservableFile, StateFile};

/// Values below `-CHECK_TOL` (inequalities) or above `CHECK_TOL`
/// (identities) fail a trial.
pub const CHECK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Two-site subadditivity on pure states up to 4⊗4.
    Bipartite,
    /// Concavity of the entropy on qubit and qutrit mixtures.
    Concavity,
    /// Symmetric vs correlation form, and commutator vs trace form.
    Identities,
    /// The symmetric inequality on two sites, where it must hold.
    TwoSite,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Bipartite, Suite::Concavity, Suite::Identities, Suite::TwoSite];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Bipartite => "bipartite",
            Suite::Concavity => "concavity",
            Suite::Identities => "identities",
            Suite::TwoSite => "two-site",
        }
    }

    /// Whether trial values are discrepancies (must stay small) rather
    /// than slacks (must stay non-negative).
    pub fn is_identity(self) -> bool {
        self == Suite::Identities
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Everything needed to replay one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reproducer {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateFile>,
    pub observables: Vec<ObservableFile>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub density_matrices: Vec<ObservableFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub trial_seed: u64,
    pub value: f64,
    pub reproducer: Reproducer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Smallest slack, or largest discrepancy for identity suites.
    pub worst_value: f64,
    pub worst_trial: usize,
    pub failures: Vec<TrialFailure>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Trial {
    value: f64,
    reproducer: Reproducer,
}

fn state_only(psi: &PureState, ks: &[&HermitianMatrix]) -> Reproducer {
    Reproducer {
        state: Some(StateFile::from_state(psi)),
        observables: ks.iter().map(|k| ObservableFile::from_matrix(k)).collect(),
        density_matrices: Vec::new(),
        lambda: None,
    }
}

fn mixed_only(rhos: &[&DensityMatrix], k: &HermitianMatrix, lambda: Option<f64>) -> Reproducer {
    Reproducer {
        state: None,
        observables: vec![ObservableFile::from_matrix(k)],
        density_matrices: rhos.iter().map(|r| ObservableFile::from_matrix(r.matrix())).collect(),
        lambda,
    }
}

fn run_trial(suite: Suite, rng: &mut ChaCha8Rng) -> Result<Trial> {
    match suite {
        Suite::Bipartite => {
            let (d1, d2) = (rng.random_range(2..=4), rng.random_range(2..=4));
            let psi = random_pure_state(rng, &[d1, d2], true);
            let k1 = random_hermitian(rng, d1);
            let k2 = random_hermitian(rng, d2);
            let value = bipartite_slack(&psi, &k1, &k2)?.slack;
            Ok(Trial {
                value,
                reproducer: state_only(&psi, &[&k1, &k2]),
            })
        }
        Suite::Concavity => {
            let dim = rng.random_range(2..=3);
            let r1 = random_density_matrix(rng, dim);
            let r2 = random_density_matrix(rng, dim);
            let k = random_hermitian(rng, dim);
            let lambda = rng.random_range(0.0..=1.0);
            let value = concavity_probe(&r1, &r2, &k, lambda)?;
            Ok(Trial {
                value,
                reproducer: mixed_only(&[&r1, &r2], &k, Some(lambda)),
            })
        }
        Suite::Identities => {
            let n = rng.random_range(2..=4);
            let d = rng.random_range(2..=3);
            let psi = random_pure_state(rng, &vec![d; n], true);
            let k = random_hermitian(rng, d);
            let forms = (symmetric_slack(&psi, &k)?.slack - correlation_slack(&psi, &k)?.slack).abs();
            let dim = rng.random_range(2..=4);
            let rho = random_density_matrix(rng, dim);
            let kr = random_hermitian(rng, dim);
            let entropy = (wy_entropy(&rho, &kr)? - wy_entropy_commutator(&rho, &kr)?).abs();
            let mut reproducer = state_only(&psi, &[&k]);
            reproducer.observables.push(ObservableFile::from_matrix(&kr));
            reproducer.density_matrices.push(ObservableFile::from_matrix(rho.matrix()));
            Ok(Trial {
                value: forms.max(entropy),
                reproducer,
            })
        }
        Suite::TwoSite => {
            let d = rng.random_range(2..=4);
            let complex = rng.random_bool(0.5);
            let psi = random_pure_state(rng, &[d, d], complex);
            let k = random_hermitian(rng, d);
            let value = symmetric_slack(&psi, &k)?.slack;
            Ok(Trial {
                value,
                reproducer: state_only(&psi, &[&k]),
            })
        }
    }
}

/// Runs `trials` trials of `suite`.
pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let mut outcome = SuiteOutcome {
        suite,
        trials,
        seed,
        tolerance: CHECK_TOL,
        worst_value: if suite.is_identity() { 0.0 } else { f64::INFINITY },
        worst_trial: 0,
        failures: Vec::new(),
    };
    for trial in 0..trials {
        let trial_seed = restart_seed(seed, trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
        let Trial { value, reproducer } = run_trial(suite, &mut rng)?;
        let (worse, failed) = if suite.is_identity() {
            (value > outcome.worst_value, !(value <= CHECK_TOL))
        } else {
            (value < outcome.worst_value, !(value >= -CHECK_TOL))
        };
        if worse {
            outcome.worst_value = value;
            outcome.worst_trial = trial;
        }
        if failed {
            outcome.failures.push(TrialFailure {
                trial,
                trial_seed,
                value,
                reproducer,
            });
        }
    }
    Ok(outcome)
}
