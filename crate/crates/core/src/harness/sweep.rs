use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::par::Execution;

use super::config::{Policy, RunConfig};
use super::report::{compare, ComparisonReport};
use super::run::{Environment, PolicyAggregates};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        Some(Self { min, max, mean })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub seed: u64,
    pub qlearn: PolicyAggregates,
    pub vs_tou: ComparisonReport,
    pub vs_msc: ComparisonReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub import_reduction_pct: Stats,
    pub cost_reduction_pct: Stats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seeds: Vec<u64>,
    pub msc: PolicyAggregates,
    pub tou: PolicyAggregates,
    pub runs: Vec<SeedRun>,
    /// Keyed by baseline policy name.
    pub summary: BTreeMap<String, ReductionSummary>,
}

/// Trains one Q-table per seed (independently, in parallel under
/// [`Execution::Auto`]) and compares each against both rule-based
/// baselines on the same trace.
pub fn seed_sweep(config: &RunConfig, seeds: &[u64], exec: Execution) -> Result<SweepReport> {
    let env = Environment::load(config)?;
    let msc = PolicyAggregates::from_rollout(&env.rollout_baseline(Policy::Msc, config)?, &env.trace);
    let tou = PolicyAggregates::from_rollout(&env.rollout_baseline(Policy::Tou, config)?, &env.trace);

    let runs = exec
        .map(seeds, |&seed| -> Result<SeedRun> {
            let params = RunConfig { rng_seed: seed, ..config.clone() }.q_params();
            let (_, rollout) = env.train_and_evaluate(&params)?;
            let qlearn = PolicyAggregates::from_rollout(&rollout, &env.trace);
            let pair = |name: &str, base: PolicyAggregates| {
                let set: BTreeMap<String, PolicyAggregates> =
                    [("qlearn".to_string(), qlearn), (name.to_string(), base)].into_iter().collect();
                compare(&set, name)
            };
            Ok(SeedRun {
                seed,
                qlearn,
                vs_tou: pair("tou", tou)?,
                vs_msc: pair("msc", msc)?,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let mut summary = BTreeMap::new();
    for (name, pick) in [
        ("msc", (|r: &SeedRun| &r.vs_msc) as fn(&SeedRun) -> &ComparisonReport),
        ("tou", |r: &SeedRun| &r.vs_tou),
    ] {
        let imports: Vec<f64> = runs.iter().map(|r| pick(r).pairwise[0].import_reduction_pct).collect();
        let costs: Vec<f64> = runs.iter().map(|r| pick(r).pairwise[0].cost_reduction_pct).collect();
        if let (Some(i), Some(c)) = (Stats::of(&imports), Stats::of(&costs)) {
            summary.insert(
                name.to_string(),
                ReductionSummary {
                    import_reduction_pct: i,
                    cost_reduction_pct: c,
                },
            );
        }
    }
    Ok(SweepReport {
        seeds: seeds.to_vec(),
        msc,
        tou,
        runs,
        summary,
    })
}
