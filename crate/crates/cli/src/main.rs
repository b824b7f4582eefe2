use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use farmgrid::agent::QTable;
use farmgrid::harness::{
    self, compare, export_plot_data, parse_window, read_report, read_run_series, seed_sweep, Environment,
    PlotKind, Policy, RunConfig, TraceSource,
};
use farmgrid::par::Execution;
use farmgrid::{synth_trace, Error, Result, StepOutcome};

/// Environment variable naming a default run-config JSON file.
const CONFIG_ENV: &str = "FARMGRID_CONFIG";

#[derive(Parser)]
#[command(name = "farmgrid", version, about = "Dairy-farm PV-battery dispatch simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic hourly farm year as trace CSV
    SynthData {
        #[arg(long, default_value_t = 180)]
        cows: u32,
        #[arg(long, default_value_t = 261_000.0)]
        annual_kwh: f64,
        #[arg(long, default_value_t = 100.0)]
        pv_peak_kw: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one policy over a trace and write its report and hourly series
    Simulate {
        #[arg(long)]
        policy: Option<Policy>,
        #[command(flatten)]
        common: CommonArgs,
        /// Evaluate a saved Q-table instead of training (qlearn only)
        #[arg(long)]
        qtable: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a Q-learning policy, evaluate it greedily and save the table
    Train {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        episodes: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        epsilon_start: Option<f64>,
        #[arg(long)]
        epsilon_end: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare finished runs against a baseline policy
    Compare {
        #[arg(long, num_args = 2.., required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "tou")]
        baseline: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit long-format plot data from finished runs
    PlotData {
        #[arg(long, num_args = 1.., required = true)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        kind: PlotKind,
        /// Half-open step range `a..b`
        #[arg(long)]
        window: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one Q-table per seed and summarise reductions against MSC and TOU
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of seeds, starting at the configured seed
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long)]
        sequential: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Trace CSV (`step,load_kw,pv_kw`); defaults to the configured source
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Tariff JSON; defaults to the built-in three-tier tariff
    #[arg(long)]
    tariff: Option<PathBuf>,
    /// Run config JSON; falls back to $FARMGRID_CONFIG
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let path = self
            .config
            .clone()
            .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut cfg = match path {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(trace) = &self.trace {
            cfg.trace = TraceSource::Csv { path: trace.clone() };
        }
        if let Some(tariff) = &self.tariff {
            cfg.tariff = Some(tariff.clone());
        }
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let line = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::SynthData { cows, annual_kwh, pv_peak_kw, seed, out } => {
            let trace = synth_trace(cows, annual_kwh, pv_peak_kw, seed)?;
            trace.to_csv_file(&out)?;
            println!(
                "wrote {} steps to {} (load {:.0} kWh, pv {:.0} kWh)",
                trace.len(),
                out.display(),
                trace.total_load_kwh(),
                trace.total_pv_kwh()
            );
        }
        Command::Simulate { policy, common, qtable, seed, out } => {
            let mut cfg = common.resolve()?;
            if let Some(p) = policy {
                cfg.policy = p;
            }
            if let Some(s) = seed {
                cfg.rng_seed = s;
            }
            cfg.out_dir = Some(out.clone());
            let env = Environment::load(&cfg)?;
            let pretrained = match qtable {
                Some(path) if cfg.policy == Policy::Qlearn => Some(QTable::from_csv_file(path, cfg.q_params())?),
                Some(_) => return Err(Error::Config("--qtable requires --policy qlearn".into())),
                None => None,
            };
            finish_run(harness::run_in(&env, &cfg, pretrained)?, &out)?;
        }
        Command::Train { common, episodes, alpha, gamma, epsilon_start, epsilon_end, seed, out } => {
            let mut cfg = common.resolve()?;
            cfg.policy = Policy::Qlearn;
            let q = &mut cfg.qlearn;
            if let Some(v) = episodes {
                q.episodes = v;
            }
            if let Some(v) = alpha {
                q.alpha = v;
            }
            if let Some(v) = gamma {
                q.gamma = v;
            }
            if let Some(v) = epsilon_start {
                q.epsilon_start = v;
            }
            if let Some(v) = epsilon_end {
                q.epsilon_end = v;
            }
            if let Some(s) = seed {
                cfg.rng_seed = s;
            }
            cfg.out_dir = Some(out.clone());
            finish_run(harness::run_simulation(&cfg)?, &out)?;
        }
        Command::Compare { runs, baseline, out } => {
            let mut policies = BTreeMap::new();
            let mut provenance = BTreeMap::new();
            for dir in &runs {
                let report = read_report(dir)?;
                let name = report.policy.to_string();
                if policies.insert(name.clone(), report.aggregates).is_some() {
                    return Err(Error::Config(format!("policy `{name}` appears in more than one run")));
                }
                provenance.insert(name, report.provenance);
            }
            let mut cmp = compare(&policies, &baseline)?;
            cmp.provenance = provenance;
            print!("{cmp}");
            if let Some(out) = out {
                write_text(&out, &cmp.to_json_string()?)?;
            }
        }
        Command::PlotData { runs, kind, window, out } => {
            let window = parse_window(&window)?;
            let mut loaded: Vec<(String, Vec<StepOutcome>)> = Vec::new();
            for dir in &runs {
                loaded.push((read_report(dir)?.policy.to_string(), read_run_series(dir)?));
            }
            let series: Vec<(String, &[StepOutcome])> =
                loaded.iter().map(|(n, s)| (n.clone(), s.as_slice())).collect();
            let mut buf = Vec::new();
            let rows = export_plot_data(&mut buf, &series, kind, window)?;
            std::fs::write(&out, buf).map_err(|e| io_error(&out, e))?;
            println!("wrote {rows} rows to {}", out.display());
        }
        Command::Sweep { common, seeds, sequential, out } => {
            let cfg = common.resolve()?;
            let seed_list: Vec<u64> = (0..seeds).map(|i| cfg.rng_seed + i).collect();
            let exec = if sequential { Execution::Sequential } else { Execution::Auto };
            let report = seed_sweep(&cfg, &seed_list, exec)?;
            for (base, s) in &report.summary {
                println!(
                    "qlearn vs {base}: import reduction % min {:.3} max {:.3} mean {:.3}; cost reduction % min {:.3} max {:.3} mean {:.3}",
                    s.import_reduction_pct.min,
                    s.import_reduction_pct.max,
                    s.import_reduction_pct.mean,
                    s.cost_reduction_pct.min,
                    s.cost_reduction_pct.max,
                    s.cost_reduction_pct.mean
                );
            }
            let mut json = serde_json::to_string_pretty(&report)?;
            json.push('\n');
            write_text(&out, &json)?;
        }
    }
    Ok(())
}

fn finish_run(result: harness::RunResult, out: &Path) -> Result<()> {
    result.write_to(out)?;
    let a = &result.report.aggregates;
    println!(
        "{}: import {:.1} kWh, export {:.1} kWh, cost {:.2} EUR -> {}",
        result.report.policy,
        a.annual_import_kwh,
        a.annual_export_kwh,
        a.annual_cost_eur,
        out.display()
    );
    Ok(())
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}
