use serde::{Deserialize, Serialize};

use crate::battery::{BatterySpec, BatteryState};
use crate::dispatch::StepBuilder;
use crate::error::{Error, Result};
use crate::flows::StepOutcome;
use crate::tariff::{TariffSchedule, HOURS_PER_DAY};

use super::Action;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Reward is the negative grid cost of the step.
    NegativeCost,
    /// Reward is the negative cost the battery action adds on top of leaving
    /// the battery idle for the same step. Differs from `NegativeCost` by a
    /// term that no action can influence, so both rank policies identically,
    /// but the per-step variance seen by aliased `(hour, bin)` states drops
    /// by the uncontrollable part of the bill.
    #[default]
    MarginalCost,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewardSpec {
    pub mode: RewardMode,
}

pub fn reward(outcome: &StepOutcome, spec: RewardSpec) -> f64 {
    match spec.mode {
        RewardMode::NegativeCost => -outcome.cost_eur,
        RewardMode::MarginalCost => outcome.idle_cost_eur() - outcome.cost_eur,
    }
}

/// Applies `action` for one hour and settles it at that hour's tariff.
///
/// * `Charge`: PV excess charges first, the grid fills the rest of the
///   charge rating, load deficit is imported.
/// * `Discharge`: the battery covers the load deficit, PV excess is exported.
/// * `Idle`: the battery is untouched.
pub fn env_step(
    hour: usize,
    state: BatteryState,
    spec: &BatterySpec,
    load_kwh: f64,
    pv_kwh: f64,
    action: Action,
    tariff: &TariffSchedule,
) -> Result<StepOutcome> {
    if hour >= HOURS_PER_DAY {
        return Err(Error::HourOutOfRange(hour));
    }
    let mut step = StepBuilder::new(state, spec, load_kwh, pv_kwh)?;
    match action {
        Action::Charge => {
            step.charge_from_pv()?;
            step.charge_from_grid()?;
        }
        Action::Discharge => step.discharge_to_load()?,
        Action::Idle => {}
    }
    step.finish().settle(tariff.import_price(hour), tariff.export_price())
}
