mod args;
mod output;
mod reference;
mod runs;
mod seeds;

use clap::error::ErrorKind;
use clap::Parser;

use runs::CliError;

fn main() {
    std::process::exit(run());
}

/// Exit codes: 0 success, 1 reference-tolerance failure, 2 input error.
fn run() -> i32 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let benign = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if benign { 0 } else { 2 };
        }
    };
    let result = match &cli.command {
        args::Command::Optimize(a) => runs::optimize(a),
        args::Command::Simulate(a) => runs::simulate(a),
        args::Command::Sweep(a) => runs::sweep(a),
        args::Command::Compare(a) => runs::compare(a),
        args::Command::PandaD(a) => runs::panda_d(a),
        args::Command::Preamble(a) => runs::preamble(a),
        args::Command::Tables(a) => runs::tables(a),
    };
    match result {
        Ok(()) => 0,
        Err(CliError::Input(msg)) => {
            eprintln!("error: input: {msg}");
            2
        }
        Err(CliError::Tolerance(msg)) => {
            eprintln!("error: tolerance: {msg}");
            1
        }
    }
}
