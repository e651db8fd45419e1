// `!(a < b)` comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod figures;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::CliResult;
use ordeig::Statistic;

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Pdf(a) => commands::curve(a, Statistic::Pdf { index: a.index }),
        Command::Cdf(a) => commands::curve(a, Statistic::Cdf { index: a.index }),
        Command::JointPdf(a) => commands::joint_pdf(a),
        Command::ProbInterval(a) => commands::prob_interval(a),
        Command::Moments(a) => commands::moments(a),
        Command::Mgf(a) => commands::mgf(a),
        Command::UnorderedPdf(a) => commands::unordered_pdf(a),
        Command::McCheck(a) => commands::mc_check(a),
        Command::ReproduceFigures(a) => figures::reproduce(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ordeig: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
