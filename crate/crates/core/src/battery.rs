//! Battery limits and state-of-charge arithmetic.
//!
//! Energies are in kWh, powers in kW, durations in hours. Round-trip
//! efficiency is split evenly between the two directions, so each direction
//! applies `sqrt(round_trip_efficiency)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical limits of the storage unit.
///
/// The default is a 13.5 kWh home battery with a 5 kW continuous rating in
/// both directions and no conversion losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BatterySpec {
    pub capacity_kwh: f64,
    pub max_charge_kw: f64,
    pub max_discharge_kw: f64,
    pub soc_min_kwh: f64,
    pub soc_max_kwh: f64,
    pub round_trip_efficiency: f64,
}

impl Default for BatterySpec {
    fn default() -> Self {
        Self {
            capacity_kwh: 13.5,
            max_charge_kw: 5.0,
            max_discharge_kw: 5.0,
            soc_min_kwh: 0.0,
            soc_max_kwh: 13.5,
            round_trip_efficiency: 1.0,
        }
    }
}

impl BatterySpec {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.capacity_kwh,
            self.max_charge_kw,
            self.max_discharge_kw,
            self.soc_min_kwh,
            self.soc_max_kwh,
            self.round_trip_efficiency,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("all fields must be finite".into()));
        }
        if !(0.0 <= self.soc_min_kwh
            && self.soc_min_kwh < self.soc_max_kwh
            && self.soc_max_kwh <= self.capacity_kwh)
        {
            return Err(Error::InvalidSpec(format!(
                "need 0 <= soc_min ({}) < soc_max ({}) <= capacity ({})",
                self.soc_min_kwh, self.soc_max_kwh, self.capacity_kwh
            )));
        }
        if self.max_charge_kw <= 0.0 || self.max_discharge_kw <= 0.0 {
            return Err(Error::InvalidSpec(
                "charge and discharge ratings must be positive".into(),
            ));
        }
        if !(self.round_trip_efficiency > 0.0 && self.round_trip_efficiency <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "round_trip_efficiency {} not in (0, 1]",
                self.round_trip_efficiency
            )));
        }
        Ok(())
    }

    /// One-way efficiency applied when storing energy.
    pub fn charge_efficiency(&self) -> f64 {
        self.round_trip_efficiency.sqrt()
    }

    /// One-way efficiency applied when releasing energy.
    pub fn discharge_efficiency(&self) -> f64 {
        self.round_trip_efficiency.sqrt()
    }

    pub fn usable_kwh(&self) -> f64 {
        self.soc_max_kwh - self.soc_min_kwh
    }

    /// A state at the lower bound.
    pub fn empty(&self) -> BatteryState {
        BatteryState {
            soc_kwh: self.soc_min_kwh,
        }
    }

    pub fn state(&self, soc_kwh: f64) -> Result<BatteryState> {
        let state = BatteryState { soc_kwh };
        state.check(self)?;
        Ok(state)
    }
}

/// Energy currently stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryState {
    pub soc_kwh: f64,
}

impl BatteryState {
    pub fn new(soc_kwh: f64) -> Self {
        Self { soc_kwh }
    }

    pub fn check(&self, spec: &BatterySpec) -> Result<()> {
        if !(self.soc_kwh >= spec.soc_min_kwh && self.soc_kwh <= spec.soc_max_kwh) {
            return Err(Error::InvalidState {
                soc_kwh: self.soc_kwh,
                min_kwh: spec.soc_min_kwh,
                max_kwh: spec.soc_max_kwh,
            });
        }
        Ok(())
    }
}

fn check_request(requested_kw: f64, dt_h: f64) -> Result<()> {
    if !(requested_kw.is_finite() && requested_kw >= 0.0) {
        return Err(Error::NegativeRequest(requested_kw));
    }
    if !(dt_h.is_finite() && dt_h > 0.0) {
        return Err(Error::OutOfRange(format!("timestep {dt_h} h must be positive")));
    }
    Ok(())
}

/// Charges at up to `requested_kw` for `dt_h` hours.
///
/// Returns the new state and the energy actually stored. The energy drawn
/// from the source is `stored / spec.charge_efficiency()`.
pub fn apply_charge(
    state: BatteryState,
    spec: &BatterySpec,
    requested_kw: f64,
    dt_h: f64,
) -> Result<(BatteryState, f64)> {
    spec.validate()?;
    state.check(spec)?;
    check_request(requested_kw, dt_h)?;

    let eta = spec.charge_efficiency();
    let headroom_input = (spec.soc_max_kwh - state.soc_kwh) / eta;
    let input = (requested_kw * dt_h)
        .min(spec.max_charge_kw * dt_h)
        .min(headroom_input);

    if input >= headroom_input {
        let stored = spec.soc_max_kwh - state.soc_kwh;
        return Ok((BatteryState::new(spec.soc_max_kwh), stored));
    }
    let stored = input * eta;
    let soc = (state.soc_kwh + stored).min(spec.soc_max_kwh);
    Ok((BatteryState::new(soc), stored))
}

/// Discharges at up to `requested_kw` for `dt_h` hours.
///
/// Returns the new state and the energy delivered at the terminals.
pub fn apply_discharge(
    state: BatteryState,
    spec: &BatterySpec,
    requested_kw: f64,
    dt_h: f64,
) -> Result<(BatteryState, f64)> {
    spec.validate()?;
    state.check(spec)?;
    check_request(requested_kw, dt_h)?;

    let eta = spec.discharge_efficiency();
    let available = (state.soc_kwh - spec.soc_min_kwh) * eta;
    let delivered = (requested_kw * dt_h)
        .min(spec.max_discharge_kw * dt_h)
        .min(available);

    if delivered >= available {
        return Ok((BatteryState::new(spec.soc_min_kwh), available));
    }
    let soc = (state.soc_kwh - delivered / eta).max(spec.soc_min_kwh);
    Ok((BatteryState::new(soc), delivered))
}
