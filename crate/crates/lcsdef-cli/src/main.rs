//! `lcsdef`: batch front end for the coisotropic deformation engine.

mod commands;
mod modelfile;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Report;

#[derive(Parser)]
#[command(name = "lcsdef", version, about = "Exact coisotropic deformation checks on l.c.s. torus models")]
struct Cli {
    /// Also write the machine-readable report to this path.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the structure of a model file.
    Check { model: PathBuf },
    /// Print the thickened model.
    Thicken {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the L∞ relations on random leafwise forms.
    LinftyCheck {
        model: PathBuf,
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Graph and coordinate master residuals of a section, order by order.
    MasterResidual {
        model: PathBuf,
        section: PathBuf,
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Compare the two coisotropy tests on random linear charts.
    GrassmannFuzz {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Solve the Maurer–Cartan equation order by order.
    McSolve {
        #[arg(long)]
        gamma1: String,
        #[arg(long, default_value_t = 2)]
        order: usize,
        model: PathBuf,
    },
    /// Evaluate the Kuranishi map on a closed leafwise 1-form.
    Kuranishi {
        #[arg(long)]
        gamma1: String,
        model: PathBuf,
    },
    /// Truncated deformation space dimensions.
    DefDims {
        model: PathBuf,
        #[arg(long, default_value_t = 1)]
        truncation: i32,
    },
    /// Order-by-order residuals of a bulk deformation series.
    BulkCheck {
        model: PathBuf,
        series: PathBuf,
        #[arg(long, default_value_t = 2)]
        order: usize,
    },
    /// Run the full Zambon pipeline on the standard 4-torus.
    Zambon,
}

fn run(cmd: Command) -> Result<Report, commands::CliError> {
    match cmd {
        Command::Check { model } => commands::check(&model),
        Command::Thicken { model, out } => commands::thicken(&model, out.as_deref()),
        Command::LinftyCheck { model, arity, trials, seed } => commands::linfty_check(&model, arity, trials, seed),
        Command::MasterResidual { model, section, order } => commands::master_residual(&model, &section, order),
        Command::GrassmannFuzz { n, k, trials, seed } => commands::grassmann_fuzz(n, k, trials, seed),
        Command::McSolve { gamma1, order, model } => commands::mc_solve(&model, &gamma1, order),
        Command::Kuranishi { gamma1, model } => commands::kuranishi(&model, &gamma1),
        Command::DefDims { model, truncation } => commands::def_dims(&model, truncation),
        Command::BulkCheck { model, series, order } => commands::bulk_check(&model, &series, order),
        Command::Zambon => commands::zambon(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            print!("{}", report.render());
            if let Some(path) = cli.json {
                let text = serde_json::to_string_pretty(&report.to_json()).expect("json values serialize");
                if let Err(e) = std::fs::write(&path, text + "\n") {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
