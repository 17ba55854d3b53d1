//! Convergence studies: error metrics, rates, CSV and trace output.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem1d::{l2_norm, BcMode, Projection};
use crate::problems::{example_with, Example, ProblemSpec, SeriesTruncation};
use crate::stepper::{solve, SolverConfig, Trajectory};

/// Header of the study CSV.
pub const CSV_HEADER: &str = "problem,alpha,gamma,N,h,eps,eps_rate,weps,weps_rate,seconds";
/// Header of trace CSV files.
pub const TRACE_HEADER: &str = "t,error";

/// Truncation used for exact solutions in studies.
pub const STUDY_TRUNCATION: SeriesTruncation = SeriesTruncation { max_terms: 1_000_000, tail_tol: 1e-12 };

/// Error metrics of one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSummary {
    /// `max_n ‖U^n - u(t_n)‖`.
    pub eps: f64,
    /// `max_n t_n^{α/4} ‖U^n - u(t_n)‖`.
    pub weps: f64,
    /// `(t_n, ‖U^n - u(t_n)‖)` for `n = 1..N`.
    pub trace: Vec<(f64, f64)>,
}

/// Errors against the exact solution sampled at the mesh nodes.
pub fn compute_errors(trajectory: &Trajectory, problem: &ProblemSpec, config: &SolverConfig) -> Result<ErrorSummary> {
    let exact = problem.exact.as_ref().ok_or_else(|| Error::MissingExact(problem.name.clone()))?;
    let spatial = &config.spatial;
    let mut eps: f64 = 0.0;
    let mut weps: f64 = 0.0;
    let mut trace = Vec::with_capacity(trajectory.times.len().saturating_sub(1));
    for (&t, values) in trajectory.times.iter().zip(&trajectory.values).skip(1) {
        let u = exact.sample(spatial, t)?;
        let diff: Vec<f64> = values.iter().zip(&u).map(|(a, b)| a - b).collect();
        let err = l2_norm(&diff, spatial)?;
        eps = eps.max(err);
        weps = weps.max(t.powf(config.alpha / 4.0) * err);
        trace.push((t, err));
    }
    Ok(ErrorSummary { eps, weps, trace })
}

/// `log₂(ε_N / ε_{2N})`.
pub fn compute_rate(eps_n: f64, eps_2n: f64) -> Result<f64> {
    if !(eps_n > 0.0 && eps_2n > 0.0) {
        return Err(Error::domain(format!("rates need positive errors, got {eps_n} and {eps_2n}")));
    }
    Ok((eps_n / eps_2n).log2())
}

/// One `(α, γ, N)` entry of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub problem: String,
    pub alpha: f64,
    pub gamma: f64,
    pub n: usize,
    pub h: f64,
    pub eps: f64,
    /// Rate against the `N/2` row, when present.
    pub eps_rate: Option<f64>,
    pub weps: f64,
    pub weps_rate: Option<f64>,
    pub seconds: f64,
    pub trace: Vec<(f64, f64)>,
    /// Failure message; the error fields are NaN when set.
    pub failure: Option<String>,
}

/// Rows of a study sorted by `(α, γ, N)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<StudyRow>,
}

impl ConvergenceReport {
    pub fn find(&self, alpha: f64, gamma: f64, n: usize) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.alpha == alpha && r.gamma == gamma && r.n == n)
    }

    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.failure.is_some())
    }

    /// CSV text; `timing = false` leaves the `seconds` column empty so that
    /// output is reproducible byte for byte.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.problem,
                sci(r.alpha),
                sci(r.gamma),
                r.n,
                sci(r.h),
                sci(r.eps),
                r.eps_rate.map(sci).unwrap_or_default(),
                sci(r.weps),
                r.weps_rate.map(sci).unwrap_or_default(),
                if timing { sci(r.seconds) } else { String::new() },
            );
        }
        out
    }
}

/// `%.5e`-style rendering (six significant digits, signed two-digit exponent).
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.5e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

/// Parameters of a study over `α × γ × N`.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub example: Example,
    pub alphas: Vec<f64>,
    pub gammas: Vec<f64>,
    pub steps: Vec<usize>,
    pub elements: usize,
    pub bc: Option<BcMode>,
    pub projection: Option<Projection>,
}

impl StudyConfig {
    pub fn new(example: Example, alphas: Vec<f64>, gammas: Vec<f64>, steps: Vec<usize>) -> Self {
        Self { example, alphas, gammas, steps, elements: 2000, bc: None, projection: None }
    }
}

fn run_row(cfg: &StudyConfig, alpha: f64, gamma: f64, n: usize) -> StudyRow {
    let start = Instant::now();
    let outcome = (|| -> Result<ErrorSummary> {
        let problem = example_with(cfg.example, alpha, STUDY_TRUNCATION)?;
        let mut config = SolverConfig::for_problem(&problem, alpha, n, gamma, cfg.elements)?;
        if let Some(bc) = cfg.bc {
            config.bc = bc;
        }
        if let Some(p) = cfg.projection {
            config.projection = p;
        }
        let traj = solve(&problem, &config)?;
        compute_errors(&traj, &problem, &config)
    })();
    let seconds = start.elapsed().as_secs_f64();
    let h = 1.0 / cfg.elements as f64;
    let base = StudyRow {
        problem: cfg.example.name().to_string(),
        alpha,
        gamma,
        n,
        h,
        eps: f64::NAN,
        eps_rate: None,
        weps: f64::NAN,
        weps_rate: None,
        seconds,
        trace: Vec::new(),
        failure: None,
    };
    match outcome {
        Ok(s) => StudyRow { eps: s.eps, weps: s.weps, trace: s.trace, ..base },
        Err(e) => StudyRow { failure: Some(e.to_string()), ..base },
    }
}

/// Runs every `(α, γ, N)` combination (concurrently) and attaches rates.
///
/// The rate of row `N` compares it with row `N/2` of the same `(α, γ)`.
pub fn run_study(cfg: &StudyConfig) -> ConvergenceReport {
    let mut jobs = Vec::new();
    for &a in &cfg.alphas {
        for &g in &cfg.gammas {
            for &n in &cfg.steps {
                jobs.push((a, g, n));
            }
        }
    }
    let mut rows: Vec<StudyRow> = jobs.par_iter().map(|&(a, g, n)| run_row(cfg, a, g, n)).collect();
    rows.sort_by(|x, y| {
        x.alpha
            .total_cmp(&y.alpha)
            .then(x.gamma.total_cmp(&y.gamma))
            .then(x.n.cmp(&y.n))
    });
    attach_rates(&mut rows);
    ConvergenceReport { rows }
}

fn attach_rates(rows: &mut [StudyRow]) {
    let index: HashMap<(u64, u64, usize), (f64, f64)> = rows
        .iter()
        .map(|r| ((r.alpha.to_bits(), r.gamma.to_bits(), r.n), (r.eps, r.weps)))
        .collect();
    for r in rows.iter_mut() {
        if r.n % 2 != 0 {
            continue;
        }
        if let Some(&(e, w)) = index.get(&(r.alpha.to_bits(), r.gamma.to_bits(), r.n / 2)) {
            r.eps_rate = compute_rate(e, r.eps).ok();
            r.weps_rate = compute_rate(w, r.weps).ok();
        }
    }
}

/// File name of the trace of a row.
pub fn trace_file_name(row: &StudyRow) -> String {
    format!("trace_{}_a{}_g{}_N{}.csv", row.problem, row.alpha, row.gamma, row.n)
}

/// Trace CSV text of a row.
pub fn trace_csv(row: &StudyRow) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for &(t, e) in &row.trace {
        let _ = writeln!(out, "{},{}", sci(t), sci(e));
    }
    out
}

/// Writes `study.csv` (and, if requested, one trace file per row) into `dir`.
/// Returns the paths written.
pub fn write_outputs(report: &ConvergenceReport, dir: &Path, timing: bool, traces: bool) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let study = dir.join("study.csv");
    fs::write(&study, report.to_csv(timing))?;
    written.push(study);
    if traces {
        for row in report.rows.iter().filter(|r| r.failure.is_none()) {
            let path = dir.join(trace_file_name(row));
            fs::write(&path, trace_csv(row))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// Gnuplot script plotting every trace of `report` on log-log axes.
pub fn gnuplot_script(report: &ConvergenceReport) -> String {
    let mut out = String::new();
    out.push_str("set datafile separator ','\nset logscale xy\nset xlabel 't_n'\nset ylabel 'error'\nset key outside\n");
    let plots: Vec<String> = report
        .rows
        .iter()
        .filter(|r| r.failure.is_none())
        .map(|r| {
            format!(
                "'{}' using 1:2 skip 1 with lines title 'alpha={} gamma={} N={}'",
                trace_file_name(r),
                r.alpha,
                r.gamma,
                r.n
            )
        })
        .collect();
    if !plots.is_empty() {
        let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    }
    out
}
