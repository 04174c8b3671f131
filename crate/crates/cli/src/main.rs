use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use holderscope_cli::config::{RunConfig, SourceArgs, DEFAULT_N};
use holderscope_cli::error::{CliError, EXIT_NUMERIC};
use holderscope_cli::ingest::Format;
use holderscope_cli::json;
use holderscope_cli::run::{self, ExportFormat, Mode};

#[derive(Parser)]
#[command(name = "holderscope", version, about = "Pointwise regularity of sampled signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportArg {
    Csv,
    Binary,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate exponents, test membership and write per-scale profiles.
    Analyze(RunConfig),
    /// Write a synthetic signal to a file and print its ground truth.
    Generate {
        /// Generator, e.g. `cusp:alpha=0.5,x0=0.5`.
        spec: String,
        #[arg(long, default_value_t = DEFAULT_N)]
        n: u32,
        #[arg(long)]
        out: PathBuf,
        /// csv or raw; inferred from the extension when omitted.
        #[arg(long)]
        format: Option<Format>,
    },
    /// Export the wavelet leader (or coefficient) pyramid.
    Leaders {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 4)]
        vanishing_moments: usize,
        /// Export the coefficients instead of their leaders.
        #[arg(long)]
        coefficients: bool,
        #[arg(long)]
        out: PathBuf,
        /// csv or binary; inferred from the extension when omitted.
        #[arg(long, value_enum)]
        export: Option<ExportArg>,
    },
    /// Test membership in a generalized Hoelder space at each x0.
    Membership(RunConfig),
    /// Check the sampled decreasing-family conditions for an exponent family.
    FamilyCheck {
        /// Family, e.g. `power:0.2..2.5`.
        family: String,
        #[arg(long, default_value_t = 128)]
        horizon: usize,
        /// Comma-separated epsilon grid.
        #[arg(long, value_delimiter = ',')]
        epsilons: Option<Vec<f64>>,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

fn execute(cmd: Command) -> Result<ExitCode, CliError> {
    let text = match cmd {
        Command::Analyze(cfg) => json::to_string(&run::analyze(cfg, Mode::Analyze)?),
        Command::Membership(cfg) => json::to_string(&run::analyze(cfg, Mode::Membership)?),
        Command::Generate { spec, n, out, format } => json::to_string(&run::generate_cmd(&spec, n, &out, format)?),
        Command::Leaders {
            source,
            vanishing_moments,
            coefficients,
            out,
            export,
        } => {
            let export = export.map(|e| match e {
                ExportArg::Csv => ExportFormat::Csv,
                ExportArg::Binary => ExportFormat::Binary,
            });
            json::to_string(&run::leaders_cmd(&source, vanishing_moments, coefficients, &out, export)?)
        }
        Command::FamilyCheck {
            family,
            horizon,
            epsilons,
        } => json::to_string(&run::family_check_cmd(&family, horizon, epsilons.as_deref())?),
        Command::Selftest => {
            let (text, ok) = run::selftest_cmd()?;
            print!("{text}");
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_NUMERIC) });
        }
    };
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
