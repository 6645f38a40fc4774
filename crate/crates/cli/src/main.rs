// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! `entwalk`: run, sweep and check quantum walks with entangled coins.

mod args;
mod commands;
mod output;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entwalk::metrics::{LogBase, DEFAULT_SUPPORT_THRESHOLD};

use args::{parse_amplitudes, parse_probability, parse_qubit_range, parse_qubits, parse_threshold, Amplitudes};
use commands::{CliError, Context};
use output::{Emitter, Format};

#[derive(Debug, Parser)]
#[command(name = "entwalk", version, about = "Discrete-time quantum walks with n-qubit entangled coins")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Probability above which a site counts toward the support.
    #[arg(long, global = true, default_value_t = DEFAULT_SUPPORT_THRESHOLD, value_parser = parse_threshold)]
    threshold: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Directory for output tables.
    #[arg(long, global = true, default_value = ".")]
    output: PathBuf,
    #[arg(long = "log-base", global = true, value_enum, default_value_t = Base::E)]
    log_base: Base,
    /// Omit the generation time so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Base {
    #[value(name = "e")]
    E,
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Args)]
struct InitArgs {
    /// Coin amplitudes at the origin, e.g. "0.7071067811865476,0,0,0.7071067811865476j".
    #[arg(long, value_parser = parse_amplitudes)]
    init: Option<Amplitudes>,
    /// Rescale --init to unit norm instead of rejecting it.
    #[arg(long, requires = "init")]
    normalize: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve one walk and write its distribution and metrics per step.
    Run {
        #[arg(long, value_parser = parse_qubits)]
        n: usize,
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        init: InitArgs,
    },
    /// Compare metrics across qubit counts and the classical walk.
    Sweep {
        /// Inclusive range such as 1..7.
        #[arg(long, value_parser = parse_qubit_range)]
        n: RangeInclusive<usize>,
        #[arg(long)]
        steps: usize,
    },
    /// Classical random walk on the line.
    Classical {
        #[arg(long)]
        steps: usize,
        #[arg(long = "p-right", default_value_t = 0.5, value_parser = parse_probability)]
        p_right: f64,
    },
    /// Closed-form eigensystem table and momentum-space round trip.
    SpectralCheck {
        #[arg(long, value_parser = parse_qubits)]
        n: usize,
        #[arg(long)]
        steps: usize,
        /// Momentum grid size; defaults to the smallest power of two >= 4(T+1).
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        init: InitArgs,
    },
    /// Stationary-phase envelope against the exact distribution.
    Stationary {
        #[arg(long, value_parser = parse_qubits)]
        n: usize,
        #[arg(long)]
        steps: usize,
    },
    /// Run every invariant suite.
    Validate {
        /// Largest step count checked against path-sum enumeration.
        #[arg(long = "oracle-depth", default_value_t = 6)]
        oracle_depth: usize,
        /// Perturb the coin so the unitarity and normalization suites must fail.
        #[arg(long = "inject-fault")]
        inject_fault: bool,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ENTWALK_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("ENTWALK_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let g = cli.global;
    let ctx = Context {
        emitter: Emitter {
            dir: g.output,
            format: g.format,
            log_base: match g.log_base {
                Base::E => LogBase::Natural,
                Base::Two => LogBase::Two,
            },
            timestamp: !g.no_timestamp,
            metadata: Vec::new(),
        },
        threshold: g.threshold,
    };
    match cli.command {
        Command::Run { n, steps, init } => commands::run(&ctx, n, steps, init.init.as_ref(), init.normalize),
        Command::Sweep { n, steps } => commands::sweep(&ctx, n, steps),
        Command::Classical { steps, p_right } => commands::classical(&ctx, steps, p_right),
        Command::SpectralCheck { n, steps, grid, init } => {
            commands::spectral_check(&ctx, n, steps, grid, init.init.as_ref(), init.normalize)
        }
        Command::Stationary { n, steps } => commands::stationary(&ctx, n, steps),
        Command::Validate { oracle_depth, inject_fault } => commands::validate(&ctx, oracle_depth, inject_fault),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("entwalk: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
