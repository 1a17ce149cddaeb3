//! `mfgpipe` entry point. Exit codes: 0 success, 1 validation error,
//! 2 runtime error.

mod args;
mod commands;
mod error;
mod pipeline;

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Merge(args) => commands::run_merge(args).map(drop),
        Command::Clean(args) => commands::run_clean(args).map(drop),
        Command::Screen(args) => commands::run_screen(args).map(drop),
        Command::Select(args) => commands::run_select(args).map(drop),
        Command::Vif(args) => commands::run_vif(args).map(drop),
        Command::Decompose(args) => commands::run_decompose(args).map(drop),
        Command::Evaluate(args) => commands::run_evaluate(args).map(drop),
        Command::Decide(args) => commands::run_decide(args).map(drop),
        Command::Pipeline(args) => {
            let manifest = pipeline::run_pipeline(&args.config, &args.out_dir)?;
            let path = args.out_dir.join("manifest.json");
            let mut text = serde_json::to_string_pretty(&manifest)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            text.push('\n');
            fs::write(&path, text)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            for record in &manifest.stages {
                println!(
                    "stage {} ({}): {}x{} -> {}x{} in {} ms",
                    record.index,
                    record.stage,
                    record.stats.rows_before,
                    record.stats.cols_before,
                    record.stats.rows_after,
                    record.stats.cols_after,
                    record.wall_ms
                );
            }
            println!("manifest: {}", path.display());
            Ok(())
        }
    }
}
