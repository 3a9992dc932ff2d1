//! The `run` subcommand.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use mcb_core::engine::{run_batch_with, RunOptions};
use mcb_core::schedule::{apply_overrides, preset, preset_warnings, PresetName, Scenario};

use crate::{parse_count, ConfigProblem, PresetArgs};

/// Records kept per trace when `--decimate` is not given.
const DEFAULT_MAX_RECORDS: u64 = 100_000;

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Named preset (see `mcb presets`).
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    pub preset: Option<String>,
    /// Scenario file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub preset_opts: PresetArgs,
    /// Run seeds 0..N.
    #[arg(long, conflicts_with = "seed_list")]
    pub seeds: Option<u64>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    pub seed_list: Option<Vec<u64>>,
    /// `key=value` override, dotted path into the scenario file form.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    #[arg(long, default_value = "mcb-out")]
    pub out: PathBuf,
    /// Keep every k-th round in the trace CSVs. Defaults to at most
    /// 100000 rows per trace.
    #[arg(long, value_parser = parse_count)]
    pub decimate: Option<u64>,
    /// Worker threads; defaults to `MCB_THREADS` or all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Also write a gnuplot script for the summary.
    #[arg(long)]
    pub gnuplot: bool,
}

pub fn load_config(path: &Path, set: &[String]) -> anyhow::Result<Scenario> {
    let base = Scenario::load(path)?;
    Ok(apply_overrides(&base, set)?)
}

fn scenario(args: &RunArgs) -> anyhow::Result<Scenario> {
    match (&args.preset, &args.config) {
        (Some(name), _) => {
            let name: PresetName = name.parse()?;
            let opts = args.preset_opts.options()?;
            for w in preset_warnings(name, &opts) {
                eprintln!("warning: {w}");
            }
            Ok(apply_overrides(&preset(name, &opts)?, &args.set)?)
        }
        (None, Some(path)) => {
            if !args.preset_opts.is_empty() {
                return Err(ConfigProblem(
                    "--algo, --horizon, --f and --lambda apply to presets; use --set with --config".into(),
                )
                .into());
            }
            load_config(path, &args.set)
        }
        (None, None) => Err(ConfigProblem("one of --preset or --config is required".into()).into()),
    }
}

fn seeds(args: &RunArgs, scenario: &Scenario) -> Vec<u64> {
    if let Some(list) = &args.seed_list {
        list.clone()
    } else if let Some(n) = args.seeds {
        (0..n).collect()
    } else if !scenario.seeds.is_empty() {
        scenario.seeds.clone()
    } else {
        vec![0]
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

pub fn run(args: RunArgs) -> anyhow::Result<()> {
    let scenario = scenario(&args)?;
    let v = scenario.validate();
    eprint!("{v}");
    if !v.is_ok() {
        return Err(ConfigProblem(format!("scenario has {} violation(s)", v.violations.len())).into());
    }
    let seeds = seeds(&args, &scenario);
    if seeds.is_empty() {
        return Err(ConfigProblem("no seeds to run".into()).into());
    }
    let decimate = args.decimate.unwrap_or(scenario.horizon.div_ceil(DEFAULT_MAX_RECORDS)).max(1);
    let batch = run_batch_with(&scenario, &seeds, args.threads, RunOptions { decimate, keep_plays: false })?;

    fs::create_dir_all(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    fs::write(args.out.join("scenario.json"), scenario.to_json_pretty() + "\n")?;
    for trace in &batch.traces {
        let mut w = create(&args.out.join(format!("trace_seed{}.csv", trace.seed)))?;
        trace.write_csv(&mut w)?;
        w.flush()?;
        let mut w = create(&args.out.join(format!("events_seed{}.csv", trace.seed)))?;
        trace.write_events_csv(&mut w)?;
        w.flush()?;
    }
    let mut w = create(&args.out.join("summary.csv"))?;
    batch.write_summary_csv(&mut w)?;
    w.flush()?;
    if args.gnuplot {
        fs::write(args.out.join("plot.gp"), GNUPLOT)?;
    }

    let horizon = scenario.horizon as f64;
    let finals: Vec<f64> = batch.traces.iter().map(|t| t.total_regret).collect();
    for t in &batch.traces {
        println!("seed {}: regret {:.3} (average {:.6})", t.seed, t.total_regret, t.total_regret / horizon);
    }
    let n = finals.len() as f64;
    let mean = finals.iter().sum::<f64>() / n;
    let std = (finals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    println!(
        "final regret over {} seed(s): {mean:.3} +- {std:.3} (average {:.6} +- {:.6})",
        finals.len(),
        mean / horizon,
        std / horizon
    );
    println!("wrote {}", args.out.display());
    Ok(())
}

const GNUPLOT: &str = "\
set datafile separator ','
set key autotitle columnhead
set xlabel 'round'
set ylabel 'average regret'
plot 'summary.csv' using 1:($2-$3):($2+$3) with filledcurves fs transparent solid 0.2 notitle, \\
     '' using 1:2 with lines title 'mean average regret'
";
