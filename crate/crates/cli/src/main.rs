use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bc_compose::config::TestFunction;
use bc_compose::preset::BoundarySpec;
use bc_compose::report::num;
use bc_compose::{run_file, CliError, RunOptions};
use bc_core::disk_cavity::halfplane_boundary_demo;
use bc_core::interval_cavity::{build_cavity, matrix_to_rows};
use bc_core::{classify, compose};
use clap::{Parser, Subcommand};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "bc-compose",
    version,
    about = "Compose boundary conditions and run verification scenarios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every scenario of a JSON config.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Exit with code 4 when an assertion fails.
        #[arg(long)]
        verify: bool,
        #[arg(long, env = "BC_COMPOSE_JOBS")]
        jobs: Option<usize>,
    },
    /// Print the composition `u1 * u2` as JSON.
    Compose {
        #[arg(long)]
        u1: String,
        #[arg(long)]
        u2: String,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Print the lowest interval eigenvalues as JSON.
    Spectrum {
        #[arg(long)]
        u: String,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = 0.5)]
        mass: f64,
    },
    /// Print the half-plane boundary-value integrals as CSV.
    DemoHalfplane {
        #[arg(long, value_enum, default_value = "gaussian")]
        function: Function,
        #[arg(long, value_delimiter = ',', default_values_t = [1e-1, 1e-2, 1e-3, 1e-4])]
        y: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        support: f64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Function {
    Gaussian,
    OddGaussian,
}

fn numerical(source: bc_core::Error) -> CliError {
    CliError::Numerical {
        id: "cli".into(),
        source,
    }
}

fn preset(field: &str, text: &str, dim: usize) -> Result<bc_core::BoundaryUnitary<f64>, CliError> {
    BoundarySpec::Preset(text.into())
        .resolve(field, dim)
        .map_err(CliError::Parse)
}

fn print_json(value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    writeln!(std::io::stdout(), "{text}").map_err(|e| CliError::io("stdout", e))
}

fn execute(command: Command) -> Result<i32, CliError> {
    match command {
        Command::Run {
            config,
            out,
            verify,
            jobs,
        } => {
            let jobs =
                jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let manifest = run_file(
                &config,
                &RunOptions {
                    out_dir: out,
                    verify,
                    jobs,
                },
            )?;
            Ok(manifest.exit_code)
        }
        Command::Compose { u1, u2, dim } => {
            let a = preset("u1", &u1, dim)?;
            let b = preset("u2", &u2, dim)?;
            let w = compose(&a, &b).map_err(numerical)?;
            print_json(&json!({
                "W": matrix_to_rows(w.matrix()),
                "class": classify(&w).map_err(numerical)?.to_string(),
            }))?;
            Ok(0)
        }
        Command::Spectrum {
            u,
            grid,
            count,
            mass,
        } => {
            let b = preset("u", &u, 2)?;
            let eigenvalues = build_cavity(&b, grid, mass)
                .and_then(|c| c.spectrum(count))
                .map_err(numerical)?;
            print_json(&json!({ "grid": grid, "eigenvalues": eigenvalues }))?;
            Ok(0)
        }
        Command::DemoHalfplane {
            function,
            y,
            support,
        } => {
            let f = match function {
                Function::Gaussian => TestFunction::Gaussian,
                Function::OddGaussian => TestFunction::OddGaussian,
            };
            let demo =
                halfplane_boundary_demo(move |x: f64| f.eval(x), &y, support).map_err(numerical)?;
            let mut stdout = std::io::stdout().lock();
            let mut lines = vec!["y,re,im,error".to_string()];
            for ((y, z), e) in demo.y_values.iter().zip(&demo.integrals).zip(&demo.errors) {
                lines.push(format!(
                    "{},{},{},{}",
                    num(*y),
                    num(z.re),
                    num(z.im),
                    num(*e)
                ));
            }
            lines.push(format!(
                "# reference {} {} extrapolated {} {}",
                num(demo.reference.re),
                num(demo.reference.im),
                num(demo.extrapolated_limit.re),
                num(demo.extrapolated_limit.im)
            ));
            writeln!(stdout, "{}", lines.join("\n")).map_err(|e| CliError::io("stdout", e))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
