use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zapsim::{run, threads_from_env, RunError, ScenarioConfig, Verb};

#[derive(Parser)]
#[command(
    name = "zapsim",
    version,
    about = "Zero-area single-photon pulse scenarios"
)]
struct Cli {
    #[command(subcommand)]
    verb: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Input and transmitted field of one medium
    Propagate(Common),
    /// Cross-correlation visibility versus delay, per medium
    Xcorr(Common),
    /// Homodyne efficiency versus delay with the un-modulated oscillator
    EtaScan(Common),
    /// Maximum efficiency, shaped and un-modulated, per medium
    DepthScan(Common),
    /// Wigner function of the measured state
    Wigner(Common),
    /// Synthetic homodyne quadratures
    Sample(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (`section.key = value` lines)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a key, e.g. `--set medium.preset=5`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides output.directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(common: &Common) -> Result<ScenarioConfig, RunError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| RunError::Io(path.clone(), e))?;
            ScenarioConfig::parse(&text).map_err(|e| RunError::ConfigFile(path.clone(), e))?
        }
        None => ScenarioConfig::default(),
    };
    for s in &common.set {
        cfg.apply_override(s)?;
    }
    if let Some(dir) = &common.out {
        cfg.output_directory = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, common) = match &cli.verb {
        Command::Propagate(c) => (Verb::Propagate, c),
        Command::Xcorr(c) => (Verb::Xcorr, c),
        Command::EtaScan(c) => (Verb::EtaScan, c),
        Command::DepthScan(c) => (Verb::DepthScan, c),
        Command::Wigner(c) => (Verb::Wigner, c),
        Command::Sample(c) => (Verb::Sample, c),
    };
    let result = load(common).and_then(|cfg| {
        let threads = threads_from_env()?;
        run(verb, &cfg, threads)
    });
    match result {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            for f in &report.files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("zapsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
