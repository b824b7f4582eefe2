use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agent::{evaluate_policy, train, QLearningParams, QTable, TrainingOutcome};
use crate::battery::{BatterySpec, BatteryState};
use crate::error::{Error, Result};
use crate::flows::{EnergyFlows, StepOutcome};
use crate::sim::{rollout, Msc, Rollout, Tou};
use crate::tariff::TariffSchedule;
use crate::trace::ExogenousTrace;

use super::config::{Policy, RunConfig};

pub const REPORT_FILE: &str = "report.json";
pub const SERIES_FILE: &str = "series.csv";
pub const QTABLE_FILE: &str = "qtable.csv";
pub const CURVE_FILE: &str = "training_curve.csv";

const SERIES_HEADER: &str = "step,hour,load_kwh,pv_kwh,pv_to_load,pv_to_batt,pv_to_grid,batt_to_load,grid_to_load,grid_to_batt,soc_kwh,grid_import_kwh,grid_export_kwh,cost_eur,import_price,export_price";

/// Totals of one policy over the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyAggregates {
    pub annual_import_kwh: f64,
    pub annual_export_kwh: f64,
    pub annual_cost_eur: f64,
    /// `(pv - export) / pv`; absent when the trace has no PV.
    pub self_consumption_ratio: Option<f64>,
    pub annual_load_kwh: f64,
    pub annual_pv_kwh: f64,
    pub horizon_steps: usize,
}

impl PolicyAggregates {
    pub fn from_rollout(run: &Rollout, trace: &ExogenousTrace) -> Self {
        let pv = trace.total_pv_kwh();
        let self_consumption_ratio = (pv > 0.0).then(|| ((pv - run.grid_export_kwh) / pv).clamp(0.0, 1.0));
        Self {
            annual_import_kwh: run.grid_import_kwh,
            annual_export_kwh: run.grid_export_kwh,
            annual_cost_eur: run.cost_eur,
            self_consumption_ratio,
            annual_load_kwh: trace.total_load_kwh(),
            annual_pv_kwh: pv,
            horizon_steps: trace.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    /// `synthetic` or `csv`.
    pub data_source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub episodes: usize,
    pub hyperparams: QLearningParams,
    pub first_episode_reward: Option<f64>,
    pub last_episode_reward: Option<f64>,
}

/// Machine-readable result of one run, written as `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub policy: Policy,
    pub aggregates: PolicyAggregates,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub training: Option<TrainingSummary>,
    pub config: RunConfig,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub report: RunReport,
    pub trace: ExogenousTrace,
    pub rollout: Rollout,
    pub training: Option<TrainingOutcome>,
}

/// Everything a run needs, loaded and validated.
#[derive(Debug, Clone)]
pub struct Environment {
    pub trace: ExogenousTrace,
    pub tariff: TariffSchedule,
    pub battery: BatterySpec,
}

impl Environment {
    pub fn load(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            trace: config.trace.load()?,
            tariff: config.load_tariff()?,
            battery: config.battery,
        })
    }

    pub fn rollout_baseline(&self, policy: Policy, config: &RunConfig) -> Result<Rollout> {
        let initial = self.initial_state(config)?;
        match policy {
            Policy::Msc => rollout(&Msc, &self.trace, &self.battery, &self.tariff, initial),
            Policy::Tou => rollout(
                &Tou { windows: config.tou.clone() },
                &self.trace,
                &self.battery,
                &self.tariff,
                initial,
            ),
            Policy::Qlearn => Err(Error::Config("qlearn is not a rule-based policy".into())),
        }
    }

    pub fn train_and_evaluate(&self, params: &QLearningParams) -> Result<(TrainingOutcome, Rollout)> {
        let training = train(&self.trace, &self.battery, &self.tariff, params)?;
        let run = evaluate_policy(&training.table, &self.trace, &self.battery, &self.tariff)?;
        Ok((training, run))
    }

    fn initial_state(&self, config: &RunConfig) -> Result<BatteryState> {
        config.q_params().initial_state(&self.battery)
    }
}

pub fn provenance(config: &RunConfig) -> Provenance {
    Provenance {
        config_hash: config.config_hash(),
        seed: config.rng_seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        data_source: if config.trace.is_synthetic() { "synthetic" } else { "csv" }.to_string(),
    }
}

/// Runs the configured policy. Q-learning trains on the trace and is then
/// evaluated greedily on it; rule-based policies are a single rollout.
pub fn run_simulation(config: &RunConfig) -> Result<RunResult> {
    let env = Environment::load(config)?;
    run_in(&env, config, None)
}

/// Like [`run_simulation`], but a `qlearn` run evaluates `pretrained`
/// instead of training when one is given.
pub fn run_in(env: &Environment, config: &RunConfig, pretrained: Option<QTable>) -> Result<RunResult> {
    let (rollout, training) = match (config.policy, pretrained) {
        (Policy::Qlearn, Some(table)) => {
            table.check_bins(config.qlearn.n_bins)?;
            let run = evaluate_policy(&table, &env.trace, &env.battery, &env.tariff)?;
            (run, Some(TrainingOutcome { table, curve: Vec::new() }))
        }
        (Policy::Qlearn, None) => {
            let (t, r) = env.train_and_evaluate(&config.q_params())?;
            (r, Some(t))
        }
        (p, _) => (env.rollout_baseline(p, config)?, None),
    };
    let report = RunReport {
        policy: config.policy,
        aggregates: PolicyAggregates::from_rollout(&rollout, &env.trace),
        provenance: provenance(config),
        training: training.as_ref().map(|t| TrainingSummary {
            episodes: t.curve.len(),
            hyperparams: *t.table.params(),
            first_episode_reward: t.curve.first().copied(),
            last_episode_reward: t.curve.last().copied(),
        }),
        config: config.clone(),
    };
    Ok(RunResult {
        report,
        trace: env.trace.clone(),
        rollout,
        training,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

impl RunResult {
    /// Writes `report.json`, `series.csv` and, for Q-learning,
    /// `qtable.csv` plus `training_curve.csv` into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        let mut json = serde_json::to_vec_pretty(&self.report)?;
        json.push(b'\n');
        write_file(&dir.join(REPORT_FILE), &json)?;

        let mut series = Vec::new();
        write_series(&mut series, &self.trace, &self.rollout.steps).map_err(|e| Error::io(dir, e))?;
        write_file(&dir.join(SERIES_FILE), &series)?;

        if let Some(t) = &self.training {
            t.table.to_csv_file(dir.join(QTABLE_FILE))?;
            let mut curve = String::from("episode,total_reward\n");
            for (i, r) in t.curve.iter().enumerate() {
                curve.push_str(&format!("{i},{r}\n"));
            }
            write_file(&dir.join(CURVE_FILE), curve.as_bytes())?;
        }
        Ok(())
    }
}

pub fn write_series<W: Write>(mut w: W, trace: &ExogenousTrace, steps: &[StepOutcome]) -> std::io::Result<()> {
    writeln!(w, "{SERIES_HEADER}")?;
    for (t, o) in steps.iter().enumerate() {
        let f = &o.flows;
        writeln!(
            w,
            "{t},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            trace.hour_of(t),
            trace.load_kwh()[t],
            trace.pv_kwh()[t],
            f.pv_to_load,
            f.pv_to_batt,
            f.pv_to_grid,
            f.batt_to_load,
            f.grid_to_load,
            f.grid_to_batt,
            o.next_soc_kwh,
            o.grid_import_kwh,
            o.grid_export_kwh,
            o.cost_eur,
            o.import_price,
            o.export_price
        )?;
    }
    Ok(())
}

pub fn read_series<R: BufRead>(reader: R) -> Result<Vec<StepOutcome>> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| Error::io(SERIES_FILE, e))?
        .unwrap_or_default();
    if header.trim() != SERIES_HEADER {
        return Err(Error::Parse { line: 1, message: "unexpected series header".into() });
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(SERIES_FILE, e))?;
        let v: Vec<f64> = line
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: i + 2, message: e.to_string() })?;
        if v.len() != 16 {
            return Err(Error::Parse { line: i + 2, message: format!("expected 16 fields, found {}", v.len()) });
        }
        out.push(StepOutcome {
            flows: EnergyFlows {
                pv_to_load: v[4],
                pv_to_batt: v[5],
                pv_to_grid: v[6],
                batt_to_load: v[7],
                grid_to_load: v[8],
                grid_to_batt: v[9],
            },
            next_soc_kwh: v[10],
            grid_import_kwh: v[11],
            grid_export_kwh: v[12],
            cost_eur: v[13],
            import_price: v[14],
            export_price: v[15],
        });
    }
    Ok(out)
}

pub fn read_report(dir: impl AsRef<Path>) -> Result<RunReport> {
    let path = dir.as_ref().join(REPORT_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_run_series(dir: impl AsRef<Path>) -> Result<Vec<StepOutcome>> {
    let path = dir.as_ref().join(SERIES_FILE);
    let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    read_series(std::io::BufReader::new(file))
}
