//! Subcommand implementations. Each returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use wy_skew::search::{run_search, run_search_with_threads, SearchConfig, SearchResult, RNG_ALGORITHM};
use wy_skew::skew::{evaluate, SlackReport};
use wy_skew::witness::{paper_observable, paper_state, verify_state, WitnessReport};
use wy_skew::{Error, HermitianMatrix};

use crate::args::{CheckArgs, Cli, Command, EvalArgs, SearchArgs, VerifyArgs};
use crate::exit;
use crate::files::{
    load_observable, load_state, write_json, InputError, ObservableFile, ReportFile, StateFile, Tolerances, NORM_WARN_TOL,
    SCHEMA,
};
use crate::suites::{run_suite, Suite, SuiteOutcome};

/// Largest Hilbert space the search accepts.
pub const MAX_SEARCH_DIM: usize = 1 << 16;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Runs `cli`, writing normal output to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::VerifyPaper(a) => verify_paper(a, out, err),
        Command::Eval(a) => eval(a, out, err),
        Command::Search(a) => search(a, out, err),
        Command::Check(a) => check(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Self {
            code: exit::INVALID,
            message: e.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Unsound { .. } => exit::MISMATCH,
            _ => exit::INVALID,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: exit::INVALID,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report payloads serialize")
}

fn base_report(command: String, violation_tol: f64, started: Instant) -> ReportFile {
    ReportFile {
        schema: SCHEMA.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        command,
        inequality_id: None,
        lhs: None,
        rhs: None,
        slack: None,
        violated: None,
        tolerances: Tolerances {
            violation_tol,
            search_tol: None,
            check_tol: None,
        },
        witness: None,
        search: None,
        check: None,
        duration_seconds: started.elapsed().as_secs_f64(),
    }
}

fn with_slack(mut report: ReportFile, s: &SlackReport) -> ReportFile {
    report.inequality_id = Some(s.inequality.as_str().to_string());
    report.lhs = Some(s.lhs);
    report.rhs = Some(s.rhs);
    report.slack = Some(s.slack);
    report.violated = Some(s.violated);
    report
}

/// Prints `report` as JSON if asked and writes it to `out_path` if given.
fn emit(report: &mut ReportFile, started: Instant, json: bool, out_path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    report.duration_seconds = started.elapsed().as_secs_f64();
    if json {
        let text = crate::json::to_string(report).expect("reports serialize");
        out.write_all(text.as_bytes())?;
    }
    if let Some(p) = out_path {
        write_json(p, report)?;
    }
    Ok(())
}

fn shell_path(p: &Path) -> String {
    p.display().to_string()
}

fn load_state_warned(path: &Path, err: &mut dyn Write) -> Result<wy_skew::PureState, Failure> {
    let loaded = load_state(path)?;
    if loaded.norm_deviation > NORM_WARN_TOL {
        writeln!(
            err,
            "warning: {}: squared norm off by {:e}; state was rescaled",
            path.display(),
            loaded.norm_deviation
        )?;
    }
    Ok(loaded.state)
}

fn verify_paper(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let mut command = "verify-paper".to_string();
    let psi = match &a.state {
        Some(p) => {
            command += &format!(" --state {}", shell_path(p));
            load_state_warned(p, err)?
        }
        None => paper_state(),
    };
    let k = match &a.observable {
        Some(p) => {
            command += &format!(" --observable {}", shell_path(p));
            load_observable(p)?
        }
        None => paper_observable(),
    };
    let w = verify_state(&psi, &k)?;

    let mut report = with_slack(base_report(command, w.symmetric.violation_tol, started), &w.symmetric);
    report.witness = Some(to_value(&w));
    emit(&mut report, started, a.json, a.out.as_deref(), out)?;
    if !a.json {
        print_witness_table(&w, out)?;
    }
    match w.first_mismatch() {
        None => Ok(exit::OK),
        Some(item) => {
            writeln!(
                err,
                "mismatch: {} expected {:.12} computed {:.12} (|error| {:.3e} > tol {:.0e})",
                item.name, item.expected, item.computed, item.abs_error, item.tolerance
            )?;
            Ok(exit::MISMATCH)
        }
    }
}

fn print_witness_table(w: &WitnessReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{:<30} {:>18} {:>18} {:>10} {:>7}  ok", "quantity", "expected", "computed", "|error|", "tol")?;
    for item in &w.items {
        writeln!(
            out,
            "{:<30} {:>18.12} {:>18.12} {:>10.2e} {:>7.0e}  {}",
            item.name,
            item.expected,
            item.computed,
            item.abs_error,
            item.tolerance,
            if item.matched { "yes" } else { "NO" }
        )?;
    }
    writeln!(
        out,
        "\nVar(ΣK) = {:.6} (384/3025)  vs  Tr γK² − Tr γ^½Kγ^½K = {:.6}",
        w.variance_lhs, w.rhs
    )?;
    writeln!(
        out,
        "symmetric inequality {} (slack {:.6})",
        if w.violated { "VIOLATED" } else { "holds" },
        w.slack
    )?;
    writeln!(out, "all published numbers match: {}", if w.all_match { "yes" } else { "NO" })
}

fn eval(a: &EvalArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    if !(a.violation_tol >= 0.0 && a.violation_tol.is_finite()) {
        return Err(Failure {
            code: exit::INVALID,
            message: "--violation-tol must be non-negative and finite".into(),
        });
    }
    let psi = load_state_warned(&a.state, err)?;
    let ks = a.observable.iter().map(|p| load_observable(p)).collect::<Result<Vec<_>, _>>()?;
    let slack = evaluate(a.mode, &psi, &ks)?.with_violation_tol(a.violation_tol);

    let mut command = format!("eval --state {}", shell_path(&a.state));
    for p in &a.observable {
        command += &format!(" --observable {}", shell_path(p));
    }
    command += &format!(" --mode {} --violation-tol {:e}", a.mode, a.violation_tol);
    let mut report = with_slack(base_report(command, a.violation_tol, started), &slack);
    emit(&mut report, started, a.json, a.out.as_deref(), out)?;
    if !a.json {
        print_slack(&slack, out)?;
    }
    Ok(if slack.violated { exit::VIOLATED } else { exit::OK })
}

fn print_slack(s: &SlackReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "inequality  {}", s.inequality)?;
    writeln!(out, "lhs         {:.15e}", s.lhs)?;
    writeln!(out, "rhs         {:.15e}", s.rhs)?;
    writeln!(out, "slack       {:.15e}", s.slack)?;
    writeln!(
        out,
        "status      {}",
        if s.violated {
            format!("VIOLATED (slack < -{:e})", s.violation_tol)
        } else {
            "holds".to_string()
        }
    )
}

/// `|0⟩⟨0|` on a `dim`-level site.
pub fn default_observable(dim: usize) -> HermitianMatrix {
    let mut diag = vec![0.0; dim];
    diag[0] = 1.0;
    HermitianMatrix::diagonal(&diag).expect("finite")
}

#[derive(Serialize)]
struct SearchConfigEcho {
    n_sites: usize,
    local_dim: usize,
    objective: wy_skew::search::Objective,
    complex_amplitudes: bool,
    restarts: usize,
    max_iters: usize,
    tolerance: f64,
    master_seed: u64,
    observable: ObservableFile,
}

#[derive(Serialize)]
struct SearchPayload<'a> {
    config: SearchConfigEcho,
    best_violation: f64,
    restart_index: usize,
    iterations_used: usize,
    seed_used: u64,
    converged: bool,
    rng_algorithm: &'static str,
    best_state: StateFile,
    trace: &'a [wy_skew::search::TracePoint],
    restarts: &'a [wy_skew::search::RestartSummary],
}

fn search(a: &SearchArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let invalid = |message: String| Failure {
        code: exit::INVALID,
        message,
    };
    if !(a.violation_tol >= 0.0 && a.violation_tol.is_finite()) {
        return Err(invalid("--violation-tol must be non-negative and finite".into()));
    }
    if a.threads == Some(0) {
        return Err(invalid("--threads must be positive".into()));
    }
    if a.dim < 2 {
        return Err(invalid("--dim must be at least 2".into()));
    }
    let observable = match &a.observable {
        Some(p) => load_observable(p)?,
        None => default_observable(a.dim),
    };
    let mut cfg = SearchConfig::new(a.sites, a.dim, observable);
    cfg.objective = a.objective.into();
    cfg.complex_amplitudes = a.complex;
    cfg.restarts = a.restarts;
    cfg.max_iters = a.max_iters;
    cfg.tolerance = a.tol;
    cfg.master_seed = a.seed;
    cfg.validate()?;
    if cfg.state_dim().is_none_or(|d| d > MAX_SEARCH_DIM) {
        return Err(invalid(format!("state dimension dim^sites exceeds {MAX_SEARCH_DIM}")));
    }

    let result = match a.threads {
        Some(t) => run_search_with_threads(&cfg, t)?,
        None => run_search(&cfg)?,
    };

    let mut command = format!(
        "search --sites {} --dim {} --restarts {} --seed {} --max-iters {} --tol {:e} --objective {}",
        a.sites,
        a.dim,
        a.restarts,
        a.seed,
        a.max_iters,
        a.tol,
        cfg.objective.inequality()
    );
    if a.complex {
        command += " --complex";
    }
    if let Some(p) = &a.observable {
        command += &format!(" --observable {}", shell_path(p));
    }
    command += &format!(" --violation-tol {:e}", a.violation_tol);

    let slack = result.report.with_violation_tol(a.violation_tol);
    let mut report = with_slack(base_report(command, a.violation_tol, started), &slack);
    report.tolerances.search_tol = Some(a.tol);
    report.search = Some(to_value(&search_payload(&cfg, &result)));
    emit(&mut report, started, a.json, a.out.as_deref(), out)?;
    if !a.json {
        print_search(&cfg, &result, &slack, out)?;
    }
    Ok(if result.best_violation > a.violation_tol {
        exit::VIOLATED
    } else {
        exit::OK
    })
}

fn search_payload<'a>(cfg: &SearchConfig, r: &'a SearchResult) -> SearchPayload<'a> {
    SearchPayload {
        config: SearchConfigEcho {
            n_sites: cfg.n_sites,
            local_dim: cfg.local_dim,
            objective: cfg.objective,
            complex_amplitudes: cfg.complex_amplitudes,
            restarts: cfg.restarts,
            max_iters: cfg.max_iters,
            tolerance: cfg.tolerance,
            master_seed: cfg.master_seed,
            observable: ObservableFile::from_matrix(&cfg.observable),
        },
        best_violation: r.best_violation,
        restart_index: r.restart_index,
        iterations_used: r.iterations_used,
        seed_used: r.seed_used,
        converged: r.converged,
        rng_algorithm: RNG_ALGORITHM,
        best_state: StateFile::from_state(&r.best_state),
        trace: &r.trace,
        restarts: &r.restarts,
    }
}

fn print_search(cfg: &SearchConfig, r: &SearchResult, s: &SlackReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(
        out,
        "search: {} sites, local dim {}, objective {}, {} restarts, seed {}",
        cfg.n_sites,
        cfg.local_dim,
        cfg.objective.inequality(),
        cfg.restarts,
        cfg.master_seed
    )?;
    writeln!(
        out,
        "best violation {:.12e} from restart {} (seed {}, {} iterations, {})",
        r.best_violation,
        r.restart_index,
        r.seed_used,
        r.iterations_used,
        if r.converged { "converged" } else { "iteration cap" }
    )?;
    writeln!(out, "best state amplitudes:")?;
    for (i, z) in r.best_state.amplitudes().iter().enumerate() {
        if z.im == 0.0 {
            writeln!(out, "  [{i}] {:+.12}", z.re)?;
        } else {
            writeln!(out, "  [{i}] {:+.12} {:+.12}i", z.re, z.im)?;
        }
    }
    print_slack(s, out)
}

fn check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    if a.trials == 0 {
        return Err(Failure {
            code: exit::INVALID,
            message: "--trials must be at least 1".into(),
        });
    }
    let outcome = run_suite(a.suite, a.trials, a.seed)?;
    let command = format!("check {} --trials {} --seed {}", a.suite, a.trials, a.seed);
    let mut report = base_report(command, outcome.tolerance, started);
    report.inequality_id = match a.suite {
        Suite::Bipartite => Some("bipartite".into()),
        Suite::TwoSite => Some("symmetric".into()),
        Suite::Concavity | Suite::Identities => None,
    };
    report.tolerances.check_tol = Some(outcome.tolerance);
    report.check = Some(to_value(&outcome));
    emit(&mut report, started, a.json, a.out.as_deref(), out)?;
    if !a.json {
        print_check(&outcome, out)?;
    }
    if outcome.passed() {
        return Ok(exit::OK);
    }
    match dump_failures(&outcome, &a.dump_dir) {
        Ok(()) => writeln!(err, "{} failing trial(s); reproducers in {}", outcome.failures.len(), a.dump_dir.display())?,
        Err(e) => writeln!(err, "{} failing trial(s); could not write reproducers: {e}", outcome.failures.len())?,
    }
    Ok(exit::CHECK_FAILED)
}

fn print_check(o: &SuiteOutcome, out: &mut dyn Write) -> std::io::Result<()> {
    let what = if o.suite.is_identity() { "largest discrepancy" } else { "smallest slack" };
    writeln!(
        out,
        "check {}: {} trials, seed {}, {} failure(s); {what} {:.3e} at trial {} (tolerance {:e})",
        o.suite,
        o.trials,
        o.seed,
        o.failures.len(),
        o.worst_value,
        o.worst_trial,
        o.tolerance
    )
}

/// Writes each failed trial as a summary plus standalone state and
/// observable files.
pub fn dump_failures(o: &SuiteOutcome, dir: &Path) -> Result<(), InputError> {
    fs::create_dir_all(dir).map_err(|e| InputError::new(Some(dir), e.to_string()))?;
    for f in &o.failures {
        let stem = format!("{}-trial{}", o.suite, f.trial);
        write_json(&dir.join(format!("{stem}.json")), f)?;
        if let Some(s) = &f.reproducer.state {
            write_json(&dir.join(format!("{stem}-state.json")), s)?;
        }
        for (i, k) in f.reproducer.observables.iter().enumerate() {
            write_json(&dir.join(format!("{stem}-observable{i}.json")), k)?;
        }
        for (i, r) in f.reproducer.density_matrices.iter().enumerate() {
            write_json(&dir.join(format!("{stem}-rho{i}.json")), r)?;
        }
    }
    Ok(())
}
