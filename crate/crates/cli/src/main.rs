//! `lvniche`: command-line front end for the enrollment-competition toolkit.

mod commands;
mod param;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use lvniche_core::Method;

use commands::OutputFormat;

#[derive(Parser)]
#[command(
    name = "lvniche",
    version,
    about = "Enrollment competition between institutions as n-species Lotka-Volterra dynamics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Euler,
    Rk4,
}

impl From<MethodArg> for Method {
    fn from(value: MethodArg) -> Method {
        match value {
            MethodArg::Euler => Method::Euler,
            MethodArg::Rk4 => Method::Rk4,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario and write the trajectory as CSV
    Simulate {
        /// Scenario file (JSON)
        #[arg(long)]
        scenario: PathBuf,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Override the scenario's integration scheme
        #[arg(long)]
        method: Option<MethodArg>,
        /// Override the scenario's step size
        #[arg(long)]
        step: Option<f64>,
        /// Override the scenario's iteration count
        #[arg(long)]
        steps: Option<usize>,
        /// Override the scenario's sampling stride
        #[arg(long)]
        record_every: Option<usize>,
    },
    /// Enumerate all equilibria with eigenvalues, stability, and (n = 2) the regime
    Equilibria {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Derivative matrices, one-percent perturbations, and percent-to-target analysis
    Sensitivity {
        #[arg(long)]
        scenario: PathBuf,
        /// Focal species for the percent-to-target section (1-based)
        #[arg(long)]
        species: Option<usize>,
        /// Equilibrium gain to target, in students (default 1)
        #[arg(long)]
        target_delta: Option<f64>,
    },
    /// Simulate over a range of one parameter and tabulate survival/extinction
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Parameter path, 1-based: `K[i]` or `alpha[i][j]`
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        points: usize,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
    },
    /// Competition-coefficient estimators
    Estimate {
        /// Fraction of families able to enroll students elsewhere (0..=1)
        #[arg(long)]
        income_fraction: Option<f64>,
        /// Two catchment population counts: SMALL LARGE
        #[arg(long, num_args = 2, value_names = ["SMALL", "LARGE"])]
        pop_ratio: Option<Vec<f64>>,
    },
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Simulate {
            scenario,
            out,
            method,
            step,
            steps,
            record_every,
        } => commands::run_simulate(
            scenario,
            out,
            method.map(Method::from),
            step,
            steps,
            record_every,
        ),
        Command::Equilibria { scenario, format } => commands::run_equilibria(scenario, format),
        Command::Sensitivity {
            scenario,
            species,
            target_delta,
        } => commands::run_sensitivity(scenario, species, target_delta),
        Command::Sweep {
            scenario,
            param,
            from,
            to,
            points,
            out,
        } => commands::run_sweep(scenario, param, from, to, points, out),
        Command::Estimate {
            income_fraction,
            pop_ratio,
        } => commands::run_estimate(income_fraction, pop_ratio),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
