//! Command line driver for convergence studies.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fracfp::fem1d::{BcMode, Projection};
use fracfp::harness::{gnuplot_script, run_study, write_outputs, StudyConfig};
use fracfp::problems::Example;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    Ex1,
    Ex2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BcArg {
    Dirichlet,
    Zeroflux,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProjectionArg {
    Ritz,
    L2,
    Nodal,
}

/// Runs an error and rate study of the L1 scheme on graded time meshes.
#[derive(Debug, Parser)]
#[command(name = "fracfp", version)]
struct Cli {
    /// Test problem.
    #[arg(long, value_enum, default_value = "ex1")]
    problem: ProblemArg,
    /// Fractional orders, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    /// Mesh grading exponents, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    gamma: Vec<f64>,
    /// Numbers of time steps, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    steps: Vec<usize>,
    /// Number of spatial elements.
    #[arg(long, default_value_t = 2000)]
    elements: usize,
    /// Boundary condition (defaults to the problem's).
    #[arg(long, value_enum)]
    bc: Option<BcArg>,
    /// Initial projection (defaults to the problem's).
    #[arg(long, value_enum)]
    projection: Option<ProjectionArg>,
    /// Write one pointwise error trace per row.
    #[arg(long, requires = "out")]
    trace: bool,
    /// Write plot.gp plotting the traces.
    #[arg(long, requires = "trace")]
    gnuplot: bool,
    /// Output directory; the study CSV goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the seconds column empty.
    #[arg(long)]
    no_timing: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.elements < 2 {
        eprintln!("error: --elements must be at least 2");
        return ExitCode::from(2);
    }
    let example = match cli.problem {
        ProblemArg::Ex1 => Example::One,
        ProblemArg::Ex2 => Example::Two,
    };
    let mut cfg = StudyConfig::new(example, cli.alpha, cli.gamma, cli.steps);
    cfg.elements = cli.elements;
    cfg.bc = cli.bc.map(|b| match b {
        BcArg::Dirichlet => BcMode::Dirichlet,
        BcArg::Zeroflux => BcMode::ZeroFlux,
    });
    cfg.projection = cli.projection.map(|p| match p {
        ProjectionArg::Ritz => Projection::Ritz,
        ProjectionArg::L2 => Projection::L2,
        ProjectionArg::Nodal => Projection::Nodal,
    });

    let report = run_study(&cfg);
    for row in &report.rows {
        match &row.failure {
            Some(msg) => log::error!("alpha={} gamma={} N={}: {msg}", row.alpha, row.gamma, row.n),
            None => log::info!("alpha={} gamma={} N={}: eps={:e} ({:.2}s)", row.alpha, row.gamma, row.n, row.eps, row.seconds),
        }
    }

    let timing = !cli.no_timing;
    match &cli.out {
        Some(dir) => {
            let written = match write_outputs(&report, dir, timing, cli.trace) {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            if cli.gnuplot {
                let path = dir.join("plot.gp");
                if let Err(e) = fs::write(&path, gnuplot_script(&report)) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            log::info!("wrote {} files to {}", written.len(), dir.display());
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(report.to_csv(timing).as_bytes()).is_err() {
                return ExitCode::from(2);
            }
        }
    }
    if report.has_failures() {
        eprintln!("error: some rows failed");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
