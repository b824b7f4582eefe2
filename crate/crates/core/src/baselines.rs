//! Rule-based dispatch: maximise self-consumption (MSC) and time-of-use (TOU).

use serde::{Deserialize, Serialize};

use crate::battery::{BatterySpec, BatteryState};
use crate::dispatch::StepBuilder;
use crate::error::{Error, Result};
use crate::flows::Dispatch;
use crate::tariff::HOURS_PER_DAY;

/// Hours in which TOU grid-charges and in which it discharges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TouWindows {
    pub charge_hours: Vec<usize>,
    pub discharge_hours: Vec<usize>,
}

impl Default for TouWindows {
    fn default() -> Self {
        Self {
            charge_hours: vec![23, 0, 1, 2, 3, 4, 5, 6, 7],
            discharge_hours: vec![17, 18],
        }
    }
}

impl TouWindows {
    pub fn validate(&self) -> Result<()> {
        for &h in self.charge_hours.iter().chain(&self.discharge_hours) {
            if h >= HOURS_PER_DAY {
                return Err(Error::HourOutOfRange(h));
            }
        }
        if let Some(h) = self.charge_hours.iter().find(|h| self.discharge_hours.contains(h)) {
            return Err(Error::Config(format!(
                "hour {h} is in both charge_hours and discharge_hours"
            )));
        }
        Ok(())
    }

    pub fn is_charge_hour(&self, hour: usize) -> bool {
        self.charge_hours.contains(&hour)
    }

    pub fn is_discharge_hour(&self, hour: usize) -> bool {
        self.discharge_hours.contains(&hour)
    }
}

/// PV to load, PV excess into the battery, the rest exported; deficit from
/// the battery, the rest imported. Never charges from the grid.
pub fn dispatch_msc(state: BatteryState, spec: &BatterySpec, load_kwh: f64, pv_kwh: f64) -> Result<Dispatch> {
    let mut step = StepBuilder::new(state, spec, load_kwh, pv_kwh)?;
    step.charge_from_pv()?;
    step.discharge_to_load()?;
    Ok(step.finish())
}

/// PV serves load and PV excess charges the battery in every hour. In charge
/// hours the grid tops the battery up at the full rating; in discharge hours
/// the battery covers the load deficit; otherwise it idles.
pub fn dispatch_tou(
    hour: usize,
    state: BatteryState,
    spec: &BatterySpec,
    load_kwh: f64,
    pv_kwh: f64,
    windows: &TouWindows,
) -> Result<Dispatch> {
    if hour >= HOURS_PER_DAY {
        return Err(Error::HourOutOfRange(hour));
    }
    let mut step = StepBuilder::new(state, spec, load_kwh, pv_kwh)?;
    step.charge_from_pv()?;
    if windows.is_charge_hour(hour) {
        step.charge_from_grid()?;
    } else if windows.is_discharge_hour(hour) {
        step.discharge_to_load()?;
    }
    Ok(step.finish())
}
