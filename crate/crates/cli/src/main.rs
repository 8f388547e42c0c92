use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use rotframe_cli::{execute, Mode, Units};

#[derive(Parser, Debug)]
#[command(name = "rotframe", version, about = "Quantum experiments in a uniformly rotating frame")]
struct Args {
    mode: Mode,
    /// TOML experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for summary.json and data files.
    #[arg(long, default_value = "rotframe-out")]
    out: PathBuf,
    /// Unit system of the config; must agree with a `units` key if present.
    #[arg(long, value_enum)]
    units: Option<Units>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (code, summary) = execute(args.mode, &args.config, &args.out, args.units);
    if code != 0 {
        if let Some(msg) = summary.get("error").and_then(|e| e.as_str()) {
            eprintln!("rotframe {}: {msg}", args.mode.name());
        }
    } else {
        println!("{}", args.out.join(rotframe_cli::output::SUMMARY_FILE).display());
    }
    ExitCode::from(code)
}
