use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fkpi_core::runner::{config_reference, exit_code, load_config, run, EXIT_ERROR};

const COMMANDS: &str = "simulate, conserve, strichartz, bilinear, trilinear, scaling, illposedness, resonance-scan, transversality";

/// Batch experiments for the fractional KP-I equation.
///
/// Exit status: 0 when every verdict passes, 2 when any verdict fails,
/// 1 on an execution or configuration error.
#[derive(Parser, Debug)]
#[command(name = "fkpi-lab", version, after_long_help = config_reference())]
struct Cli {
    /// One of: simulate, conserve, strichartz, bilinear, trilinear, scaling,
    /// illposedness, resonance-scan, transversality
    command: String,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key by dotted path, e.g. `--set evolution.dt=1e-4`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("fkpi-lab: {msg}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}

fn execute(cli: Cli) -> Result<i32, String> {
    let text = match &cli.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => None,
    };
    let mut overrides = vec![("command".to_string(), serde_json::Value::String(cli.command.clone()).to_string())];
    for s in &cli.set {
        let (k, v) = s.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got `{s}`"))?;
        overrides.push((k.to_string(), v.to_string()));
    }
    if let Some(d) = &cli.output_dir {
        overrides.push(("output_dir".into(), serde_json::Value::String(d.display().to_string()).to_string()));
    }
    if let Some(s) = cli.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    let cfg = load_config(text.as_deref(), &overrides).map_err(|e| format!("{e} (commands: {COMMANDS})"))?;
    let result = run(&cfg);
    match &result {
        Ok(o) => eprintln!(
            "fkpi-lab: {} {} ({} records in {})",
            cfg.command,
            if o.pass { "passed" } else { "FAILED" },
            o.records,
            o.output_dir.display()
        ),
        Err(e) => eprintln!("fkpi-lab: {} error: {e}", cfg.command),
    }
    Ok(exit_code(&result))
}
