use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::QLearningParams;
use crate::baselines::TouWindows;
use crate::battery::BatterySpec;
use crate::error::{Error, Result};
use crate::tariff::TariffSchedule;
use crate::trace::{load_trace_csv, synth_trace, ExogenousTrace, SynthParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Msc,
    Tou,
    Qlearn,
}

impl Policy {
    pub const ALL: [Policy; 3] = [Policy::Msc, Policy::Tou, Policy::Qlearn];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Msc => "msc",
            Policy::Tou => "tou",
            Policy::Qlearn => "qlearn",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}` (expected msc, tou or qlearn)")))
    }
}

/// Where the hourly load/PV series comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum TraceSource {
    Csv { path: PathBuf },
    Synth(SynthParams),
}

impl Default for TraceSource {
    fn default() -> Self {
        TraceSource::Synth(SynthParams::default())
    }
}

impl TraceSource {
    pub fn load(&self) -> Result<ExogenousTrace> {
        match self {
            TraceSource::Csv { path } => load_trace_csv(path),
            TraceSource::Synth(p) => synth_trace(p.n_cows, p.annual_load_kwh, p.pv_peak_kw, p.seed),
        }
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self, TraceSource::Synth(_))
    }
}

/// Full description of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub trace: TraceSource,
    /// Tariff JSON file; `None` uses the built-in three-tier tariff.
    pub tariff: Option<PathBuf>,
    pub battery: BatterySpec,
    pub tou: TouWindows,
    pub policy: Policy,
    /// Q-learning hyperparameters. `rng_seed` here is overridden by the
    /// run-level `rng_seed`.
    pub qlearn: QLearningParams,
    /// Seeds the Q-learning exploration stream.
    pub rng_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            trace: TraceSource::default(),
            tariff: None,
            battery: BatterySpec::default(),
            tou: TouWindows::default(),
            policy: Policy::Tou,
            qlearn: QLearningParams::default(),
            rng_seed: 42,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.battery.validate()?;
        self.tou.validate()?;
        self.q_params().validate()?;
        if let TraceSource::Synth(p) = &self.trace {
            if p.n_cows == 0 {
                return Err(Error::Config("synth.n_cows must be positive".into()));
            }
        }
        Ok(())
    }

    /// Q-learning parameters with the run seed applied.
    pub fn q_params(&self) -> QLearningParams {
        QLearningParams {
            rng_seed: self.rng_seed,
            ..self.qlearn
        }
    }

    pub fn load_tariff(&self) -> Result<TariffSchedule> {
        match &self.tariff {
            Some(path) => TariffSchedule::from_json_file(path),
            None => Ok(TariffSchedule::default()),
        }
    }

    /// SHA-256 over the canonical JSON of the config, output directory
    /// excluded.
    pub fn config_hash(&self) -> String {
        let canonical = RunConfig {
            out_dir: None,
            ..self.clone()
        };
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
