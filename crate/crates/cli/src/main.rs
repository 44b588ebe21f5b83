use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use degha_cli::{run, Command, Flags, RunError};
use degha_core::dynamics::Method;

/// Degenerate quadratic Lagrangians: splittings, Hamiltonian forms,
/// constraints, Koszul–Tate and BRST checks.
#[derive(Parser, Debug)]
#[command(name = "degha", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// Model file (JSON).
    #[arg(long)]
    model: PathBuf,

    /// Integrator step.
    #[arg(long)]
    h: Option<f64>,

    /// Final time
    #[arg(long = "t-end")]
    t_end: Option<f64>,

    /// rk4 or midpoint.
    #[arg(long)]
    method: Option<Method>,

    /// Truncation degree D.
    #[arg(long)]
    degree: Option<u32>,

    /// Tower height R_max.
    #[arg(long)]
    rmax: Option<u32>,

    /// Integrate this many perturbed initial states in parallel.
    #[arg(long)]
    sweep: Option<usize>,

    /// Constraint drift tolerance
    #[arg(long = "tol-constraint")]
    tol_constraint: Option<f64>,

    /// Euler-Lagrange residual tolerance
    #[arg(long = "tol-el")]
    tol_el: Option<f64>,

    /// Gauge-independence tolerance
    #[arg(long = "tol-gauge")]
    tol_gauge: Option<f64>,

    /// Directory for the report and trajectory files; stdout when unset.
    #[arg(long = "report-dir", env = "DEGHA_REPORT_DIR")]
    report_dir: Option<PathBuf>,

    /// Zero the wall-time field.
    #[arg(long)]
    no_timing: bool,
}

fn write_outputs(dir: &Path, stem: &str, report: &str, csv: Option<&str>) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(format!("{stem}.json"));
    fs::write(&path, report).with_context(|| format!("writing {}", path.display()))?;
    if let Some(csv) = csv {
        let path = dir.join(format!("{stem}.csv"));
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match fs::read_to_string(&cli.model) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", cli.model.display());
            return ExitCode::from(2);
        }
    };
    let flags = Flags {
        h: cli.h,
        t_end: cli.t_end,
        method: cli.method,
        degree: cli.degree,
        r_max: cli.rmax,
        sweep: cli.sweep,
        constraint_tol: cli.tol_constraint,
        el_tol: cli.tol_el,
        gauge_tol: cli.tol_gauge,
    };
    let outcome = match run(cli.command, &text, &flags) {
        Ok(o) => o,
        Err(e @ RunError { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let report = if cli.no_timing {
        outcome.report.normalized()
    } else {
        outcome.report
    };
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let json = report.to_json();
    match &cli.report_dir {
        Some(dir) => {
            let stem = format!("{}-{}", report.model, report.command);
            if let Err(e) = write_outputs(dir, &stem, &json, outcome.trajectory_csv.as_deref()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
