//! Many seeds of one scenario, run in parallel, and their summary.

use std::io::{self, Write};

use rayon::prelude::*;

use super::{run_with, EngineError, RunOptions, Trace};
use crate::schedule::Scenario;

/// Mean and population standard deviation of the average regret
/// (cumulative regret over round index) across seeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryRow {
    pub round: u64,
    pub mean_avg_regret: f64,
    pub std_avg_regret: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchResult {
    pub traces: Vec<Trace>,
    pub summary: Vec<SummaryRow>,
}

impl BatchResult {
    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "round,mean_avg_regret,std_avg_regret")?;
        for r in &self.summary {
            writeln!(w, "{},{},{}", r.round, r.mean_avg_regret, r.std_avg_regret)?;
        }
        Ok(())
    }
}

/// Runs every seed with default options. `threads` caps the worker count;
/// `None` reads `MCB_THREADS` and otherwise uses every core.
pub fn run_batch(scenario: &Scenario, seeds: &[u64], threads: Option<usize>) -> Result<BatchResult, EngineError> {
    run_batch_with(scenario, seeds, threads, RunOptions::default())
}

pub fn run_batch_with(
    scenario: &Scenario,
    seeds: &[u64],
    threads: Option<usize>,
    opts: RunOptions,
) -> Result<BatchResult, EngineError> {
    if seeds.is_empty() {
        return Err(EngineError::Invalid("a batch needs at least one seed".into()));
    }
    let threads = threads.or_else(|| std::env::var("MCB_THREADS").ok().and_then(|v| v.parse().ok())).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| EngineError::Invalid(format!("cannot start worker pool: {e}")))?;
    let traces =
        pool.install(|| seeds.par_iter().map(|&seed| run_with(scenario, seed, opts)).collect::<Result<Vec<_>, _>>())?;
    let summary = summarize(&traces);
    Ok(BatchResult { traces, summary })
}

/// Per recorded round, across traces recorded on the same rounds.
pub fn summarize(traces: &[Trace]) -> Vec<SummaryRow> {
    let Some(first) = traces.first() else { return Vec::new() };
    let n = traces.len() as f64;
    (0..first.records.len())
        .map(|i| {
            let round = first.records[i].round;
            let avg = |t: &Trace| t.records[i].regret_cum / round as f64;
            let mean = traces.iter().map(avg).sum::<f64>() / n;
            let var = traces.iter().map(|t| (avg(t) - mean).powi(2)).sum::<f64>() / n;
            SummaryRow { round, mean_avg_regret: mean, std_avg_regret: var.sqrt() }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::RewardModel;
    use crate::schedule::{Algorithm, ArmsSpec, McParams};

    fn scenario() -> Scenario {
        Scenario {
            arms: ArmsSpec::explicit(vec![0.8, 0.6, 0.3, 0.2], RewardModel::Bernoulli),
            horizon: 500,
            algorithm: Algorithm::Mc(McParams { t0: 40, t1: None }),
            initial_players: 2,
            events: vec![],
            seeds: vec![],
        }
    }

    #[test]
    fn one_seed_has_zero_spread() {
        let b = run_batch(&scenario(), &[9], Some(1)).unwrap();
        assert_eq!(b.summary.len(), 500);
        assert!(b.summary.iter().all(|r| r.std_avg_regret == 0.0));
        assert_eq!(b.summary[499].mean_avg_regret, b.traces[0].total_regret / 500.0);
    }

    #[test]
    fn repeated_seeds_repeat_the_summary() {
        let seeds = [1, 2, 3, 4];
        let a = run_batch(&scenario(), &seeds, Some(2)).unwrap();
        let b = run_batch(&scenario(), &seeds, Some(4)).unwrap();
        assert_eq!(a, b);
        let same = run_batch(&scenario(), &[5, 5, 5], None).unwrap();
        assert!(same.summary.iter().all(|r| r.std_avg_regret.abs() < 1e-12));
    }

    #[test]
    fn summary_matches_hand_computation() {
        let b = run_batch(&scenario(), &[1, 2], Some(2)).unwrap();
        let row = b.summary[99];
        let x = b.traces[0].records[99].regret_cum / 100.0;
        let y = b.traces[1].records[99].regret_cum / 100.0;
        assert!((row.mean_avg_regret - (x + y) / 2.0).abs() < 1e-12);
        assert!((row.std_avg_regret - (x - y).abs() / 2.0).abs() < 1e-12);
        let mut buf = Vec::new();
        b.write_summary_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("round,mean_avg_regret,std_avg_regret\n1,"));
    }

    #[test]
    fn empty_seed_list_is_rejected() {
        assert!(run_batch(&scenario(), &[], None).is_err());
    }
}
