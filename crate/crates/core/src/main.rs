use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use cubicjac::cli::{run_pipeline, RunConfig};

fn main() -> ExitCode {
    let config = RunConfig::parse();
    let out = run_pipeline(&config);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(out.exit_code as u8)
}
