//! Per-step flow decomposition and grid settlement.

use serde::{Deserialize, Serialize};

use crate::battery::BatteryState;
use crate::error::{Error, Result};

/// Absolute tolerance for the two conservation identities, kWh.
pub const BALANCE_TOLERANCE_KWH: f64 = 1e-9;

/// Directed energy flows of one step, kWh.
///
/// Battery flows are measured at the terminals: `pv_to_batt` and
/// `grid_to_batt` are energy drawn from the source, `batt_to_load` is energy
/// delivered to the load.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyFlows {
    pub pv_to_load: f64,
    pub pv_to_batt: f64,
    pub pv_to_grid: f64,
    pub batt_to_load: f64,
    pub grid_to_load: f64,
    pub grid_to_batt: f64,
}

impl EnergyFlows {
    fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("pv_to_load", self.pv_to_load),
            ("pv_to_batt", self.pv_to_batt),
            ("pv_to_grid", self.pv_to_grid),
            ("batt_to_load", self.batt_to_load),
            ("grid_to_load", self.grid_to_load),
            ("grid_to_batt", self.grid_to_batt),
        ]
    }

    pub fn grid_import(&self) -> f64 {
        self.grid_to_load + self.grid_to_batt
    }

    pub fn grid_export(&self) -> f64 {
        self.pv_to_grid
    }
}

/// Everything a controller produces for one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub flows: EnergyFlows,
    pub next_soc_kwh: f64,
    pub grid_import_kwh: f64,
    pub grid_export_kwh: f64,
    pub cost_eur: f64,
    /// Prices the step was settled at, EUR/kWh.
    pub import_price: f64,
    pub export_price: f64,
}

impl StepOutcome {
    /// Cost of the same step had the battery stayed idle: the load deficit
    /// left after PV is imported, the PV excess exported.
    pub fn idle_cost_eur(&self) -> f64 {
        let f = &self.flows;
        (f.batt_to_load + f.grid_to_load) * self.import_price - (f.pv_to_batt + f.pv_to_grid) * self.export_price
    }
}

/// Grid-side economics of a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settlement {
    pub grid_import_kwh: f64,
    pub grid_export_kwh: f64,
    pub cost_eur: f64,
}

/// Flows plus resulting battery state, before prices are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispatch {
    pub flows: EnergyFlows,
    pub next_state: BatteryState,
}

impl Dispatch {
    pub fn settle(self, import_price: f64, export_price: f64) -> Result<StepOutcome> {
        let s = settle_step(&self.flows, import_price, export_price)?;
        Ok(StepOutcome {
            flows: self.flows,
            next_soc_kwh: self.next_state.soc_kwh,
            grid_import_kwh: s.grid_import_kwh,
            grid_export_kwh: s.grid_export_kwh,
            cost_eur: s.cost_eur,
            import_price,
            export_price,
        })
    }
}

pub fn settle_step(flows: &EnergyFlows, import_price: f64, export_price: f64) -> Result<Settlement> {
    for (field, value) in flows.fields() {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::NegativeFlow { field, value });
        }
    }
    let grid_import_kwh = flows.grid_import();
    let grid_export_kwh = flows.grid_export();
    Ok(Settlement {
        grid_import_kwh,
        grid_export_kwh,
        cost_eur: grid_import_kwh * import_price - grid_export_kwh * export_price,
    })
}

/// True iff PV and load are both fully accounted for, within [`BALANCE_TOLERANCE_KWH`].
pub fn check_balance(flows: &EnergyFlows, load_kwh: f64, pv_kwh: f64) -> bool {
    let pv_side = flows.pv_to_load + flows.pv_to_batt + flows.pv_to_grid;
    let load_side = flows.pv_to_load + flows.batt_to_load + flows.grid_to_load;
    (pv_side - pv_kwh).abs() <= BALANCE_TOLERANCE_KWH
        && (load_side - load_kwh).abs() <= BALANCE_TOLERANCE_KWH
}
