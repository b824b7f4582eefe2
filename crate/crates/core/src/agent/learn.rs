use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::battery::{BatterySpec, BatteryState};
use crate::error::{Error, Result};
use crate::flows::StepOutcome;
use crate::sim::{rollout, Controller, Rollout};
use crate::tariff::TariffSchedule;
use crate::trace::ExogenousTrace;

use super::{discretize, env_step, greedy_action, q_update, reward, Action, DiscreteState, QTable, RewardSpec};

/// Training hyperparameters. Epsilon decays linearly from `epsilon_start`
/// to `epsilon_end` over `epsilon_decay_episodes` (default: 80% of
/// `episodes`) and then stays at `epsilon_end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QLearningParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    pub epsilon_decay_episodes: Option<usize>,
    pub episodes: usize,
    pub rng_seed: u64,
    pub n_bins: usize,
    /// Starting SoC of every episode and of evaluation; `None` is `soc_min`.
    pub initial_soc_kwh: Option<f64>,
    pub reward: RewardSpec,
}

impl Default for QLearningParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.95,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            epsilon_decay_episodes: None,
            episodes: 2000,
            rng_seed: 42,
            n_bins: 10,
            initial_soc_kwh: None,
            reward: RewardSpec::default(),
        }
    }
}

impl QLearningParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidHyperparams(m));
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return bad(format!("alpha {} not in (0, 1]", self.alpha));
        }
        if !(self.gamma >= 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma {} not in [0, 1)", self.gamma));
        }
        for (name, e) in [("epsilon_start", self.epsilon_start), ("epsilon_end", self.epsilon_end)] {
            if !(0.0..=1.0).contains(&e) {
                return bad(format!("{name} {e} not in [0, 1]"));
            }
        }
        if self.n_bins < 2 {
            return bad(format!("n_bins must be >= 2, got {}", self.n_bins));
        }
        if let Some(soc) = self.initial_soc_kwh {
            if !soc.is_finite() {
                return bad(format!("initial_soc_kwh {soc} is not finite"));
            }
        }
        Ok(())
    }

    pub fn initial_state(&self, spec: &BatterySpec) -> Result<BatteryState> {
        match self.initial_soc_kwh {
            Some(soc) => spec.state(soc),
            None => Ok(spec.empty()),
        }
    }

    pub fn schedule(&self) -> EpsilonSchedule {
        EpsilonSchedule {
            start: self.epsilon_start,
            end: self.epsilon_end,
            decay_episodes: self.epsilon_decay_episodes.unwrap_or(self.episodes * 4 / 5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_episodes: usize,
}

impl EpsilonSchedule {
    pub fn at(&self, episode: usize) -> f64 {
        if episode >= self.decay_episodes {
            return self.end;
        }
        let frac = episode as f64 / self.decay_episodes as f64;
        self.start + (self.end - self.start) * frac
    }
}

/// Epsilon-greedy choice. Always draws one uniform sample, plus one more
/// when exploring.
#[inline]
pub fn select_action<R: Rng + ?Sized>(q: &QTable, s: DiscreteState, epsilon: f64, rng: &mut R) -> Action {
    if rng.gen::<f64>() < epsilon {
        Action::ALL[rng.gen_range(0..Action::COUNT)]
    } else {
        greedy_action(q, s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingOutcome {
    pub table: QTable,
    /// Undiscounted total reward of each episode.
    pub curve: Vec<f64>,
}

/// Runs `params.episodes` passes over the whole trace. Each pass restarts
/// from the initial SoC; only the final step of the trace is terminal.
pub fn train(
    trace: &ExogenousTrace,
    spec: &BatterySpec,
    tariff: &TariffSchedule,
    params: &QLearningParams,
) -> Result<TrainingOutcome> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    spec.validate()?;
    let mut table = QTable::new(*params)?;
    let initial = params.initial_state(spec)?;
    let schedule = params.schedule();
    let mut rng = ChaCha8Rng::seed_from_u64(params.rng_seed);
    let n_bins = params.n_bins;
    let horizon = trace.len();
    let (load, pv) = (trace.load_kwh(), trace.pv_kwh());

    let mut curve = Vec::with_capacity(params.episodes);
    for episode in 0..params.episodes {
        let epsilon = schedule.at(episode);
        let mut state = initial;
        let mut s = discretize(state.soc_kwh, spec, n_bins, trace.hour_of(0))?;
        let mut total = 0.0;
        for t in 0..horizon {
            let a = select_action(&table, s, epsilon, &mut rng);
            let outcome = env_step(s.hour, state, spec, load[t], pv[t], a, tariff)?;
            let r = reward(&outcome, params.reward);
            state = BatteryState::new(outcome.next_soc_kwh);
            let s_next = discretize(state.soc_kwh, spec, n_bins, trace.hour_of(t + 1))?;
            q_update(&mut table, s, a, r, s_next, t + 1 == horizon);
            total += r;
            s = s_next;
        }
        curve.push(total);
    }
    Ok(TrainingOutcome { table, curve })
}

/// Greedy controller backed by a trained table.
#[derive(Debug, Clone, Copy)]
pub struct GreedyPolicy<'a> {
    pub table: &'a QTable,
}

impl Controller for GreedyPolicy<'_> {
    fn step(
        &self,
        hour: usize,
        state: BatteryState,
        spec: &BatterySpec,
        load_kwh: f64,
        pv_kwh: f64,
        tariff: &TariffSchedule,
    ) -> Result<StepOutcome> {
        let s = discretize(state.soc_kwh, spec, self.table.n_bins(), hour)?;
        env_step(hour, state, spec, load_kwh, pv_kwh, greedy_action(self.table, s), tariff)
    }
}

/// Greedy (epsilon = 0) rollout of `q` over the trace from the table's
/// initial SoC.
pub fn evaluate_policy(
    q: &QTable,
    trace: &ExogenousTrace,
    spec: &BatterySpec,
    tariff: &TariffSchedule,
) -> Result<Rollout> {
    let initial = q.params().initial_state(spec)?;
    rollout(&GreedyPolicy { table: q }, trace, spec, tariff, initial)
}
