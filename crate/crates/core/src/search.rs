//! Multi-start Nelder-Mead search for pure states that violate a
//! subadditivity inequality.
//!
//! The optimizer works on raw, unnormalized amplitude vectors; every
//! evaluation normalizes first, so the objective is projectively invariant.
//! Restarts are independent and may run in parallel. Each one draws its
//! starting point from its own ChaCha8 stream seeded by
//! [`restart_seed`], and the merge prefers the lower restart index on ties,
//! so the result does not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Complex, HermitianMatrix};
use crate::sampling::unit_sphere_point;
use crate::skew::{evaluate, InequalityId, SlackReport};
use crate::states::{Normalization, PureState};

/// Objective value for parameter vectors that do not describe a state.
pub const REJECTION_VALUE: f64 = -1e18;

/// Identifier of the per-restart generator and seed derivation.
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64/splitmix64-mix-v1";

/// Golden-ratio increment of splitmix64.
pub const SEED_MIX_INCREMENT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Re-validation must reproduce the optimizer's value this closely.
pub const SOUNDNESS_TOL: f64 = 1e-12;

/// Iteration stride at which the best-so-far value is sampled into the trace.
pub const TRACE_STRIDE: usize = 50;

/// Inequalities the search can target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Symmetric,
    NPartite,
}

impl Objective {
    pub fn inequality(self) -> InequalityId {
        match self {
            Objective::Symmetric => InequalityId::Symmetric,
            Objective::NPartite => InequalityId::NPartite,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub n_sites: usize,
    pub local_dim: usize,
    pub objective: Objective,
    /// Single-site observable, applied identically on every site.
    pub observable: HermitianMatrix,
    pub complex_amplitudes: bool,
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop a restart once the simplex value spread is below this.
    pub tolerance: f64,
    pub master_seed: u64,
}

impl SearchConfig {
    /// Defaults: symmetric objective, real amplitudes, 64 restarts of at
    /// most 4000 iterations, spread tolerance 1e-12, seed 0.
    pub fn new(n_sites: usize, local_dim: usize, observable: HermitianMatrix) -> Self {
        Self {
            n_sites,
            local_dim,
            objective: Objective::Symmetric,
            observable,
            complex_amplitudes: false,
            restarts: 64,
            max_iters: 4000,
            tolerance: 1e-12,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.n_sites < 2 {
            return fail("n_sites must be at least 2");
        }
        if self.local_dim < 2 {
            return fail("local_dim must be at least 2");
        }
        if self.restarts == 0 {
            return fail("restarts must be positive");
        }
        if self.max_iters == 0 {
            return fail("max_iters must be positive");
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return fail("tolerance must be positive and finite");
        }
        if self.observable.dim() != self.local_dim {
            return Err(Error::InvalidConfig(format!(
                "observable has dimension {}, local_dim is {}",
                self.observable.dim(),
                self.local_dim
            )));
        }
        if self.state_dim().is_none() {
            return fail("state dimension overflows");
        }
        Ok(())
    }

    /// Hilbert space dimension `local_dim^n_sites`.
    pub fn state_dim(&self) -> Option<usize> {
        u32::try_from(self.n_sites)
            .ok()
            .and_then(|n| self.local_dim.checked_pow(n))
    }

    /// Length of the raw parameter vector.
    pub fn param_len(&self) -> usize {
        let d = self.state_dim().unwrap_or(0);
        if self.complex_amplitudes {
            2 * d
        } else {
            d
        }
    }

    /// Normalized state for raw parameters `x`.
    pub fn state_from_params(&self, x: &[f64]) -> Result<PureState> {
        let d = self.state_dim().ok_or(Error::InvalidLocalDims)?;
        if x.len() != self.param_len() {
            return Err(Error::LengthMismatch {
                expected: self.param_len(),
                found: x.len(),
            });
        }
        let amps: Vec<Complex> = if self.complex_amplitudes {
            (0..d).map(|i| Complex::new(x[i], x[d + i])).collect()
        } else {
            x.iter().map(|&v| Complex::new(v, 0.0)).collect()
        };
        PureState::new(vec![self.local_dim; self.n_sites], amps, Normalization::Rescale)
    }

    /// Evaluates the configured inequality through the skew module.
    pub fn evaluate_state(&self, psi: &PureState) -> Result<SlackReport> {
        evaluate(self.objective.inequality(), psi, std::slice::from_ref(&self.observable))
    }
}

/// `−slack` of the configured inequality at the state described by `x`;
/// positive values are violations. Degenerate inputs map to
/// [`REJECTION_VALUE`].
pub fn objective_eval(x: &[f64], cfg: &SearchConfig) -> f64 {
    let Ok(psi) = cfg.state_from_params(x) else {
        return REJECTION_VALUE;
    };
    match cfg.evaluate_state(&psi) {
        Ok(report) if report.slack.is_finite() => -report.slack,
        _ => REJECTION_VALUE,
    }
}

/// Seed of restart `index`: the splitmix64 finalizer applied to
/// `master + (index + 1)·SEED_MIX_INCREMENT`.
pub fn restart_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(SEED_MIX_INCREMENT));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub best: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOutcome {
    pub x_best: Vec<f64>,
    pub f_best: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Best value so far, sampled every [`TRACE_STRIDE`] iterations and at
    /// the end; non-decreasing.
    pub trace: Vec<TracePoint>,
}

/// Maximizes `f` with the Nelder-Mead simplex method.
///
/// Coefficients: reflection 1, expansion 2, contraction 0.5, shrink 0.5.
/// The initial simplex is `x0` plus a step of `max(0.05, 0.05·|x0ᵢ|)`
/// along each coordinate. Stops after `max_iters` iterations, or once the
/// spread of simplex values is below `tol` and every vertex lies within
/// `√tol` of the best one; the second condition keeps a simplex straddling
/// a symmetric optimum from stopping early.
pub fn nelder_mead<F>(f: F, x0: &[f64], max_iters: usize, tol: f64) -> NelderMeadOutcome
where
    F: Fn(&[f64]) -> f64,
{
    const ALPHA: f64 = 1.0;
    const GAMMA: f64 = 2.0;
    const RHO: f64 = 0.5;
    const SIGMA: f64 = 0.5;

    let n = x0.len();
    let x_tol = tol.sqrt();
    // Minimize g = −f internally.
    let g = |x: &[f64]| -f(x);

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += (0.05 * x0[i].abs()).max(0.05);
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| g(v)).collect();

    let mut order: Vec<usize> = (0..=n).collect();
    let sort = |order: &mut Vec<usize>, values: &[f64]| {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    };
    sort(&mut order, &values);

    let mut trace = vec![TracePoint {
        iteration: 0,
        best: -values[order[0]],
    }];
    let mut converged = false;
    let mut iterations = 0;
    let mut centroid = vec![0.0; n];

    while iterations < max_iters {
        let best = order[0];
        let worst = order[n];
        if n == 0 || (values[worst] - values[best] < tol && simplex_radius(&simplex, best) < x_tol) {
            converged = true;
            break;
        }
        iterations += 1;
        let second_worst = order[n - 1];

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x;
            }
        }
        centroid.iter_mut().for_each(|c| *c /= n as f64);

        let toward = |from: &[f64], coef: f64| -> Vec<f64> {
            centroid.iter().zip(from).map(|(c, x)| c + coef * (x - c)).collect()
        };

        let reflected = toward(&simplex[worst], -ALPHA);
        let g_r = g(&reflected);

        if g_r < values[best] {
            let expanded = toward(&reflected, GAMMA);
            let g_e = g(&expanded);
            if g_e < g_r {
                simplex[worst] = expanded;
                values[worst] = g_e;
            } else {
                simplex[worst] = reflected;
                values[worst] = g_r;
            }
        } else if g_r < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = g_r;
        } else {
            let (contracted, accept_bound) = if g_r < values[worst] {
                (toward(&reflected, RHO), g_r)
            } else {
                (toward(&simplex[worst], RHO), values[worst])
            };
            let g_c = g(&contracted);
            if g_c < accept_bound {
                simplex[worst] = contracted;
                values[worst] = g_c;
            } else {
                let anchor = simplex[best].clone();
                for idx in 0..=n {
                    if idx == best {
                        continue;
                    }
                    for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                        *x = a + SIGMA * (*x - a);
                    }
                    values[idx] = g(&simplex[idx]);
                }
            }
        }
        sort(&mut order, &values);
        if iterations % TRACE_STRIDE == 0 {
            trace.push(TracePoint {
                iteration: iterations,
                best: -values[order[0]],
            });
        }
    }

    let best = order[0];
    let f_best = -values[best];
    if trace.last().map(|t| t.iteration) != Some(iterations) {
        trace.push(TracePoint {
            iteration: iterations,
            best: f_best,
        });
    }
    NelderMeadOutcome {
        x_best: simplex[best].clone(),
        f_best,
        converged,
        iterations,
        trace,
    }
}

fn simplex_radius(simplex: &[Vec<f64>], best: usize) -> f64 {
    simplex
        .iter()
        .flat_map(|v| v.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

/// Per-restart summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart_index: usize,
    pub seed: u64,
    pub best_violation: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_state: PureState,
    /// `−slack` at `best_state`; positive when the inequality fails.
    pub best_violation: f64,
    /// Fresh evaluation of the configured inequality at `best_state`.
    pub report: SlackReport,
    pub restart_index: usize,
    pub iterations_used: usize,
    pub seed_used: u64,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
    pub restarts: Vec<RestartSummary>,
    pub rng_algorithm: &'static str,
}

struct RestartOutcome {
    summary: RestartSummary,
    outcome: NelderMeadOutcome,
}

fn run_restart(cfg: &SearchConfig, index: usize) -> RestartOutcome {
    let seed = restart_seed(cfg.master_seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = unit_sphere_point(&mut rng, cfg.param_len());
    let outcome = nelder_mead(|x| objective_eval(x, cfg), &x0, cfg.max_iters, cfg.tolerance);
    RestartOutcome {
        summary: RestartSummary {
            restart_index: index,
            seed,
            best_violation: outcome.f_best,
            iterations: outcome.iterations,
            converged: outcome.converged,
        },
        outcome,
    }
}

/// Runs the search on the global rayon pool.
pub fn run_search(cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate()?;
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(cfg, i))
        .collect();
    finish(cfg, outcomes)
}

/// Runs the search on a dedicated pool of `threads` workers.
pub fn run_search_with_threads(cfg: &SearchConfig, threads: usize) -> Result<SearchResult> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    pool.install(|| run_search(cfg))
}

fn finish(cfg: &SearchConfig, outcomes: Vec<RestartOutcome>) -> Result<SearchResult> {
    // Strict improvement only: on exact ties the lower restart index wins.
    let mut best_idx = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.summary.best_violation > outcomes[best_idx].summary.best_violation {
            best_idx = i;
        }
    }
    let restarts: Vec<RestartSummary> = outcomes.iter().map(|o| o.summary).collect();
    let RestartOutcome { summary, outcome } = outcomes.into_iter().nth(best_idx).expect("restarts > 0");

    let best_state = cfg.state_from_params(&outcome.x_best)?;
    let report = cfg.evaluate_state(&best_state)?;
    let recomputed = -report.slack;
    if !((recomputed - outcome.f_best).abs() <= SOUNDNESS_TOL) {
        return Err(Error::Unsound {
            reported: outcome.f_best,
            recomputed,
        });
    }
    Ok(SearchResult {
        best_state,
        best_violation: recomputed,
        report,
        restart_index: summary.restart_index,
        iterations_used: summary.iterations,
        seed_used: summary.seed,
        converged: summary.converged,
        trace: outcome.trace,
        restarts,
        rng_algorithm: RNG_ALGORITHM,
    })
}
