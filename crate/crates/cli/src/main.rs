use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use gqe_cli::{
    execute_with_plot, parse_problem_file, render_report, write_report, CliError, Command,
};

/// Build, verify and probe solution families of general quadratic functional equations.
#[derive(Debug, Parser)]
#[command(name = "gqe", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Problem-spec file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Report path; the report goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides verification.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Records elapsed time in the report (makes reports run-dependent).
    #[arg(long)]
    wall_clock: bool,
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("gqe: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut spec = match parse_problem_file(&args.spec) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if let Some(seed) = args.seed {
        spec.verification.seed = seed;
    }
    let start = Instant::now();
    let (mut report, plot) = execute_with_plot(args.command, &spec);
    if args.wall_clock {
        report.body["wall_clock_seconds"] = serde_json::json!(start.elapsed().as_secs_f64());
    }
    if let Some(plot) = plot {
        print!("{plot}");
    }
    match &args.out {
        Some(path) => {
            if let Err(e) = write_report(&report, path) {
                return fail(e);
            }
        }
        None => print!("{}", render_report(&report.body)),
    }
    if let Some(e) = report.body.get("error").and_then(|v| v.as_str()) {
        eprintln!("gqe: {e}");
    }
    ExitCode::from(report.exit_code as u8)
}
