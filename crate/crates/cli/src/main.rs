//! `mcb`: run multi-player bandit scenarios, emit presets and evaluate the
//! closed-form bounds.
//!
//! Exit codes: 0 on success, 2 for configuration errors (unreadable or
//! invalid scenarios, bad overrides, unknown presets), 3 when the engine
//! detects a broken invariant, 1 for anything else (I/O).

mod bounds;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mcb_core::bounds::BoundsError;
use mcb_core::engine::EngineError;
use mcb_core::schedule::{
    preset, preset_warnings, AlgoKind, ConfigError, OverrideError, PresetError, PresetName, PresetOptions,
};

#[derive(Parser)]
#[command(name = "mcb", version, about = "Communication-free multi-player bandit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario over one or more seeds and write CSVs.
    Run(run::RunArgs),
    /// Evaluate a closed-form parameter or bound.
    Bounds {
        #[command(subcommand)]
        which: bounds::BoundsCmd,
    },
    /// Write a preset as a scenario file.
    EmitPreset {
        name: String,
        #[command(flatten)]
        opts: PresetArgs,
        /// Output file; stdout when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check a scenario file and list violations and warnings.
    Validate {
        config: PathBuf,
        /// `key=value` override, dotted path into the file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// List the preset names.
    Presets,
}

/// Options shared by every preset.
#[derive(Args, Clone, Debug, Default)]
pub struct PresetArgs {
    /// mc, dmc, mega or random.
    #[arg(long)]
    pub algo: Option<String>,
    #[arg(long, value_parser = parse_count)]
    pub horizon: Option<u64>,
    /// Overlap fraction for `theorem3-theorem`.
    #[arg(long)]
    pub f: Option<f64>,
    /// Churn exponent for `theorem4` and `theorem3-general`.
    #[arg(long)]
    pub lambda: Option<f64>,
}

impl PresetArgs {
    pub fn options(&self) -> Result<PresetOptions, PresetError> {
        Ok(PresetOptions {
            horizon: self.horizon,
            f: self.f,
            lambda: self.lambda,
            algo: self.algo.as_deref().map(str::parse::<AlgoKind>).transpose()?,
        })
    }

    fn is_empty(&self) -> bool {
        self.algo.is_none() && self.horizon.is_none() && self.f.is_none() && self.lambda.is_none()
    }
}

/// A configuration problem that is not one of the library error types.
#[derive(Debug)]
pub struct ConfigProblem(pub String);

impl std::fmt::Display for ConfigProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigProblem {}

/// Accepts plain integers and exact scientific notation such as `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.replace('_', "");
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(x as u64),
        _ => Err(format!("`{s}` is not a non-negative whole number")),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<EngineError>() {
            return match e {
                EngineError::InvariantBreach { .. } => 3,
                EngineError::Invalid(_) => 2,
                _ => 1,
            };
        }
        if cause.is::<ConfigError>()
            || cause.is::<OverrideError>()
            || cause.is::<PresetError>()
            || cause.is::<ConfigProblem>()
            || cause.is::<BoundsError>()
        {
            return 2;
        }
    }
    1
}

fn emit_preset(name: &str, opts: &PresetArgs, out: Option<PathBuf>) -> anyhow::Result<()> {
    let name: PresetName = name.parse()?;
    let opts = opts.options()?;
    for w in preset_warnings(name, &opts) {
        eprintln!("warning: {w}");
    }
    let text = preset(name, &opts)?.to_json_pretty();
    match out {
        Some(path) => std::fs::write(&path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn validate(config: PathBuf, set: &[String]) -> anyhow::Result<()> {
    let scenario = run::load_config(&config, set)?;
    let v = scenario.validate();
    print!("{v}");
    if !v.is_ok() {
        return Err(ConfigProblem(format!("{} violation(s) in {}", v.violations.len(), config.display())).into());
    }
    println!("ok: {} arms, horizon {}, {} event(s)", scenario.k(), scenario.horizon, scenario.events.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run::run(args),
        Command::Bounds { which } => bounds::print(which),
        Command::EmitPreset { name, opts, out } => emit_preset(&name, &opts, out),
        Command::Validate { config, set } => validate(config, &set),
        Command::Presets => {
            for p in PresetName::ALL {
                println!("{p}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
