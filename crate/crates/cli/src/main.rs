use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod render;

use render::{CliError, Outcome};

/// Symbol tables, renormalisation and counterterms for singular stochastic
/// PDEs, plus the numerical experiments that go with them.
#[derive(Parser, Debug)]
#[command(name = "regstruct", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON input file.
    #[arg(long, short)]
    input: PathBuf,
    /// Directory receiving every artifact of the run.
    #[arg(long, short, env = "REGSTRUCT_OUT_DIR")]
    out: Option<PathBuf>,
    /// Representation printed on standard output.
    #[arg(long, short, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate the symbol table of an equation.
    Symbols {
        #[command(flatten)]
        common: Common,
        /// Degree cutoff, e.g. "2" or "3/2 - k".
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Apply a character to a list of trees and self-check the group law.
    Renorm {
        #[command(flatten)]
        common: Common,
        /// Seed of the random characters used by the group-law check.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Derive the renormalised right-hand side of the cubic equation.
    Counterterm {
        #[command(flatten)]
        common: Common,
        /// Degree cutoff of the solution ansatz.
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Power-count a Feynman graph.
    Powercount {
        #[command(flatten)]
        common: Common,
    },
    /// Run a numerical experiment.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Comma-separated mollifier widths, replacing those of the input.
        #[arg(long, value_delimiter = ',')]
        epsilon_ladder: Option<Vec<f64>>,
    },
    /// Evaluate the regularised toy distribution and its limit.
    ToyDist {
        #[command(flatten)]
        common: Common,
        /// Comma-separated regularisation widths, replacing those of the input.
        #[arg(long, value_delimiter = ',')]
        epsilon_ladder: Option<Vec<f64>>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(Common, Outcome), CliError> {
    let (common, outcome) = match cli.command {
        Command::Symbols { common, gamma } => {
            let o = commands::symbols(&read(&common.input)?, gamma.as_deref())?;
            (common, o)
        }
        Command::Renorm { common, seed } => {
            let o = commands::renorm(&read(&common.input)?, seed.unwrap_or(0))?;
            (common, o)
        }
        Command::Counterterm { common, gamma } => {
            let o = commands::counterterm(&read(&common.input)?, gamma.as_deref())?;
            (common, o)
        }
        Command::Powercount { common } => {
            let o = commands::powercount(&read(&common.input)?)?;
            (common, o)
        }
        Command::Simulate { common, seed, epsilon_ladder } => {
            let o = commands::simulate(&read(&common.input)?, seed, epsilon_ladder)?;
            (common, o)
        }
        Command::ToyDist { common, epsilon_ladder } => {
            let o = commands::toy_dist(&read(&common.input)?, epsilon_ladder)?;
            (common, o)
        }
    };
    Ok((common, outcome))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).and_then(|(common, outcome)| {
        let shown = outcome.render(common.format)?;
        if let Some(dir) = &common.out {
            outcome.write_all(dir)?;
        }
        print!("{shown}");
        Ok(outcome.exit_code)
    }) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
