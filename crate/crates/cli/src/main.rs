//! `inlet` command-line driver.
//!
//! Files receive full-precision numbers (CSV for sweeps, JSON otherwise);
//! the terminal gets a rounded summary. Exit status is 0 on success, 2 for
//! bad input and 3 for numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use inlet::harness::{
    default_rhos, rates_report, run_sweep, schwarz_report, table1, DegreeSchedule, ExperimentConfig, Method,
};
use inlet::ratsolver::PoleSource;
use inlet::rates::round_sig;
use inlet::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Polynomial vs. rational Laplace solvers on domains with inlets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence sweep over a degree schedule.
    Sweep {
        /// Curve: `ell:RHO`, `iell:RHO` or `trig:c_-K,...,c_K`.
        #[arg(long, default_value = "iell:1.8")]
        curve: String,
        /// Boundary data: `yplus1sq`, `const:C`, `re-pow:K`, `re-pole:A+Bi`, `re-exp`.
        #[arg(long, default_value = "yplus1sq")]
        data: String,
        #[arg(long, default_value = "poly")]
        method: String,
        /// from_data, from_schwarz or exact_branch_cut (rational method only).
        #[arg(long, default_value = "from_schwarz")]
        pole_source: String,
        /// Comma list or start:stop:step. For the rational method entries
        /// are pole budgets.
        #[arg(long, default_value = "20:400:20")]
        degrees: String,
        /// Minimum number of boundary samples.
        #[arg(long, default_value_t = 1500)]
        points: usize,
        /// Relative AAA tolerance for pole selection.
        #[arg(long, default_value_t = 1e-14)]
        tol: f64,
        /// CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON file holding a full configuration; overrides the flags above.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the convergence record as JSON.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Analyticity radii and degree-per-digit costs.
    Table1 {
        /// Comma-separated ρ values (default: the ten published rows).
        #[arg(long)]
        rho_list: Option<String>,
        /// JSON output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// AAA approximation of the Schwarz function and branch-point estimates.
    Schwarz {
        #[arg(long, default_value = "iell:1.5")]
        curve: String,
        #[arg(long, default_value_t = 2000)]
        points: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// JSON output path (otherwise JSON goes to stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form rate predictions for one ρ.
    Rates {
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}

fn write_json<T: serde::Serialize>(value: &T, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Numerical(e.to_string()))?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Sweep { curve, data, method, pole_source, degrees, points, tol, out, config, record } => {
            let config = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    ExperimentConfig::from_json(&text)?
                }
                None => {
                    let method: Method = method.parse()?;
                    let schedule: DegreeSchedule = degrees.parse()?;
                    let mut c = ExperimentConfig::new(&curve, &data, method, schedule);
                    c.pole_source = pole_source.parse::<PoleSource>()?;
                    c.points = points;
                    c.tol = tol;
                    c.out = out;
                    c.validate()?;
                    c
                }
            };
            let rec = run_sweep(&config)?;
            for (d, e) in rec.degrees.iter().zip(&rec.errors) {
                eprintln!("degree {d:>5}  error {e:.3e}");
            }
            for f in &rec.failures {
                eprintln!("entry {:>5}  failed: {}", f.requested, f.message);
            }
            match rec.fitted_degree_per_digit() {
                Some(d) => eprintln!("fitted degree per digit: {d:.3}"),
                None => eprintln!("fitted degree per digit: undefined (fewer than 3 pre-plateau points)"),
            }
            if let Some(p) = rec.predicted_degree_per_digit() {
                eprintln!("predicted degree per digit: {p:.3}");
            }
            match &config.out {
                Some(path) => rec.write_csv_file(path)?,
                None => rec.write_csv(std::io::stdout())?,
            }
            if let Some(path) = record {
                write_json(&rec, Some(&path))?;
            }
            if rec.degrees.is_empty() {
                return Err(Error::Numerical("every fit in the sweep failed".into()));
            }
            Ok(())
        }
        Command::Table1 { rho_list, out } => {
            let rhos = match rho_list {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad ρ '{s}'"))))
                    .collect::<Result<Vec<_>>>()?,
                None => default_rhos(),
            };
            let rows = table1(&rhos)?;
            println!("{:>6}  {:>16}  {:>26}  reference", "rho", "R", "degree increase per digit");
            for row in &rows {
                let reference = match (row.r_matches, row.degree_matches) {
                    (Some(true), Some(true)) => "match",
                    (Some(_), Some(_)) => "differs",
                    _ => "-",
                };
                println!(
                    "{:>6}  {:>16}  {:>26}  {reference}",
                    row.rho,
                    row.r_display(),
                    round_sig(row.degree_per_digit, 2),
                );
            }
            if let Some(path) = out {
                write_json(&rows, Some(&path))?;
            }
            Ok(())
        }
        Command::Schwarz { curve, points, tol, out } => {
            let report = schwarz_report(&curve, points, tol)?;
            eprintln!(
                "AAA degree {}  residual {:.2e} (relative {:.2e})  {} interior / {} exterior poles",
                report.aaa_degree,
                report.residual,
                report.relative_residual,
                report.interior_poles.len(),
                report.exterior_poles.len()
            );
            for e in &report.branch_estimates {
                eprintln!(
                    "branch estimate {:?} {:.4}{:+.4}i from {} poles",
                    e.side, e.location.re, e.location.im, e.string_size
                );
            }
            write_json(&report, out.as_ref())?;
            if !report.converged {
                eprintln!("warning: AAA stopped before reaching the tolerance");
            }
            Ok(())
        }
        Command::Rates { rho, out } => {
            let r = rates_report(rho)?;
            let p = &r.prediction;
            eprintln!("R - 1 = {:.3e}   polynomial degree per digit = {:.4}", p.r_excess, p.degree_per_digit_poly);
            eprintln!("rational factor 1/rho^2 = {:.4}   rational degree per digit = {:.4}", p.rat_factor, p.degree_per_digit_rat);
            write_json(&r, out.as_ref())
        }
    }
}
