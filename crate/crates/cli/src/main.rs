//! `gptkit` command-line front end.

mod commands;
mod error;

use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "gptkit", version, about = "Generalized probabilistic theory toolkit")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Output file, `-` for stdout.
    #[arg(long, short, global = true, default_value = "-")]
    pub output: String,

    /// Seed for every randomized procedure.
    #[arg(long, global = true, env = "GPTKIT_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BlochOp {
    Roundtrip,
    Rotation,
    Average,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Correlators, CHSH value and local/no-signalling verdicts for a table.
    Chsh {
        #[arg(long)]
        table: String,
    },
    /// Emit one of the eight PR boxes, e.g. `--variant 000`.
    Prbox {
        #[arg(long, default_value = "000")]
        variant: String,
    },
    /// Maximize CHSH over two-qubit strategies by see-saw iteration.
    Tsirelson {
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
    /// Perfect distinguishability witness for a list of states.
    Distinguish {
        #[arg(long)]
        space: String,
        #[arg(long)]
        states: String,
    },
    /// Minimal or maximal tensor product of two polytopic spaces.
    Compose {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Include the vertex list (enumerates max composites).
        #[arg(long)]
        vertices: bool,
    },
    /// Second- and third-order interference terms of a slit experiment.
    Sorkin {
        #[arg(long)]
        exp: String,
        #[arg(long)]
        blockers: Option<String>,
    },
    /// Bloch-ball checks.
    Bloch {
        #[arg(long, value_enum)]
        op: BlochOp,
        /// Bloch vector `x,y,z` for a single-state run.
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
        /// JSON file with a 2x2 unitary as rows of `[re, im]`.
        #[arg(long)]
        unitary: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Enumerate and classify the vertices of the no-signalling polytope.
    Nspolytope,
}

/// Reads a FILE argument; `-` is stdin.
pub fn read_input(path: &str) -> CliResult<String> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|source| CliError::Read { path: path.to_string(), source })?;
    Ok(text)
}

fn write_output(path: &str, text: &str) -> CliResult<()> {
    let res = if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.flush())
    } else {
        std::fs::write(path, text)
    };
    res.map_err(|source| CliError::Write { path: path.to_string(), source })
}

fn run(cli: &Cli) -> CliResult<()> {
    let text = commands::dispatch(cli)?;
    write_output(&cli.output, &text)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::Usage(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
