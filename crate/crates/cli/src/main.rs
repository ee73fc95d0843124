use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use star_forge::report::Report;
use star_forge::scenario::run_file;
use star_forge::suite::{selftest, summary_table};
use star_forge::Profile;

/// Exact residual checks for star products, gauge actions and Fedosov connections.
#[derive(Parser)]
#[command(name = "star-forge", version)]
struct Cli {
    /// Truncation profile `N,Dx,Dy,dim`, overriding the scenario's own.
    #[arg(long, global = true, value_parser = parse_profile)]
    profile: Option<Profile>,
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario file.
    Run { file: PathBuf },
    /// Run the built-in verification matrix.
    Selftest,
}

fn parse_profile(s: &str) -> Result<Profile, String> {
    let p: Profile = s.parse().map_err(|e: star_forge::Error| e.to_string())?;
    p.check_cli_bounds().map_err(|e| e.to_string())?;
    Ok(p)
}

const EXIT_FAILED: u8 = 1;
const EXIT_INPUT: u8 = 2;

fn emit(report: &Report, json: bool) -> ExitCode {
    if json {
        println!("{}", report.render_json());
    } else {
        print!("{}", report.render());
    }
    // wall times vary run to run, so they stay off stdout
    eprint!("{}", report.timings());
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.cmd {
        Cmd::Run { file } => match run_file(&file, cli.profile) {
            Ok(r) => emit(&r, cli.json),
            Err(e) => {
                eprintln!("{}: {e}", file.display());
                ExitCode::from(EXIT_INPUT)
            }
        },
        Cmd::Selftest => {
            let r = selftest(&cli.profile.unwrap_or_else(Profile::desk));
            if !cli.json {
                println!("{}", summary_table(&r));
            }
            emit(&r, cli.json)
        }
    }
}
