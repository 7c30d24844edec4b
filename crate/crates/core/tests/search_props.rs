use proptest::prelude::*;

use wy_skew::search::{nelder_mead, objective_eval, run_search, run_search_with_threads, Objective, SearchConfig};
use wy_skew::witness::paper_observable;

fn small_config(n_sites: usize, seed: u64) -> SearchConfig {
    let mut cfg = SearchConfig::new(n_sites, 2, paper_observable());
    cfg.restarts = 6;
    cfg.max_iters = 600;
    cfg.master_seed = seed;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn search_is_deterministic_across_pools(seed in any::<u64>(), n in 2usize..=3) {
        let cfg = small_config(n, seed);
        let a = run_search_with_threads(&cfg, 1).unwrap();
        let b = run_search_with_threads(&cfg, 3).unwrap();
        prop_assert_eq!(a.best_violation.to_bits(), b.best_violation.to_bits());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn trace_is_monotone_and_sound(seed in any::<u64>(), complex in any::<bool>()) {
        let mut cfg = small_config(3, seed);
        cfg.complex_amplitudes = complex;
        let r = run_search(&cfg).unwrap();
        prop_assert!(r.trace.windows(2).all(|w| w[0].best <= w[1].best));
        prop_assert!((r.best_violation + r.report.slack).abs() <= 1e-12);
        prop_assert!(r.restarts.iter().all(|s| s.best_violation <= r.best_violation));
    }

    #[test]
    fn objective_is_scale_invariant(x in prop::collection::vec(-1.0f64..1.0, 8), c in 0.1f64..10.0) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-3));
        let cfg = small_config(3, 0);
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        let a = objective_eval(&x, &cfg);
        let b = objective_eval(&scaled, &cfg);
        prop_assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn nelder_mead_never_loses_its_start(x0 in prop::collection::vec(-3.0f64..3.0, 1..=4)) {
        let f = |x: &[f64]| -x.iter().map(|v| (v - 1.0).powi(4)).sum::<f64>();
        let out = nelder_mead(f, &x0, 200, 1e-12);
        prop_assert!(out.f_best >= f(&x0));
    }
}

#[test]
fn per_site_objective_finds_the_same_violation_on_qubits() {
    let mut cfg = small_config(3, 5);
    cfg.objective = Objective::NPartite;
    cfg.restarts = 16;
    cfg.max_iters = 3000;
    let r = run_search(&cfg).unwrap();
    assert!(r.best_violation > 0.0192, "{}", r.best_violation);
}
