//! `powerbetti` command-line front end.

mod commands;
mod reference;
mod render;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "powerbetti",
    version,
    about = "Vector partition functions, chamber quasi-polynomials and Betti regions of ideal powers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
    Csv,
    Svg,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output format.
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Generator degrees, comma separated (complete-intersection data when a spec is needed).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub degrees: Option<Vec<i64>>,
    /// Shift-data document in the ingestion format.
    #[arg(long, conflicts_with = "degrees")]
    pub spec: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of ways to write a vector as a nonnegative combination of the columns.
    Count {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "matrix")]
        degrees: Option<Vec<i64>>,
        /// Text file with one matrix row per line.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Target vector, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        at: Vec<i64>,
        #[command(flatten)]
        output: Output,
    },
    /// Hilbert function of the bigraded ring, or of a Tor module with --spec.
    Hilbert {
        #[command(flatten)]
        source: Source,
        /// Homological index when reading a spec.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Bidegree (mu,t) to evaluate.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<i64>>,
        /// Tabulate all bidegrees with t <= tmax instead of a single point.
        #[arg(long)]
        tmax: Option<i64>,
        #[command(flatten)]
        output: Output,
    },
    /// Chamber complex, lattices and chamber quasi-polynomials of a bigraded ring.
    Chambers {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        degrees: Vec<i64>,
        #[command(flatten)]
        output: Output,
    },
    /// Stable region decomposition of one Tor module.
    Regions {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Height of the drawing in svg mode.
        #[arg(long, default_value_t = 12)]
        tmax: i64,
        #[command(flatten)]
        output: Output,
    },
    /// Shift data of the Rees algebra of a complete intersection of 2 or 3 forms.
    ReesCi {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        degrees: Vec<i64>,
        #[command(flatten)]
        output: Output,
    },
    /// Check region decompositions against the counting oracle.
    Verify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 40)]
        tmax: i64,
        #[command(flatten)]
        output: Output,
    },
    /// Full worked computation for the complete intersection of degrees 2, 3, 6.
    Reproduce {
        #[arg(long, default_value_t = 40)]
        tmax: i64,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let echo = std::env::args().collect::<Vec<_>>().join(" ");
    let result = match cli.command {
        Command::Count {
            degrees,
            matrix,
            at,
            output,
        } => commands::count(degrees, matrix, &at, &output),
        Command::Hilbert {
            source,
            index,
            at,
            tmax,
            output,
        } => commands::hilbert(&source, index, at, tmax, &output),
        Command::Chambers { degrees, output } => commands::chambers(&degrees, &output),
        Command::Regions {
            source,
            index,
            tmax,
            output,
        } => commands::regions(&source, index, tmax, &output),
        Command::ReesCi { degrees, output } => commands::rees_ci(&degrees, &output),
        Command::Verify {
            source,
            tmax,
            output,
        } => commands::verify(&source, tmax, &output, echo),
        Command::Reproduce { tmax, output } => commands::reproduce(tmax, &output, echo),
    };
    match result {
        Ok(outcome) => {
            if let Err(e) = commands::emit(&outcome.text, outcome.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
