//! Shared step construction used by every controller.
//!
//! A step always starts with PV serving the load. The remaining PV excess and
//! load deficit are then routed through the battery according to the
//! controller's rule, and whatever is left goes to or comes from the grid.

use crate::battery::{apply_charge, apply_discharge, BatterySpec, BatteryState};
use crate::error::{Error, Result};
use crate::flows::{Dispatch, EnergyFlows};

/// Simulation timestep, hours.
pub const STEP_HOURS: f64 = 1.0;

pub(crate) struct StepBuilder<'a> {
    spec: &'a BatterySpec,
    state: BatteryState,
    flows: EnergyFlows,
    excess: f64,
    deficit: f64,
}

impl<'a> StepBuilder<'a> {
    pub(crate) fn new(
        state: BatteryState,
        spec: &'a BatterySpec,
        load_kwh: f64,
        pv_kwh: f64,
    ) -> Result<Self> {
        for (name, v) in [("load_kwh", load_kwh), ("pv_kwh", pv_kwh)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::OutOfRange(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        spec.validate()?;
        state.check(spec)?;
        let pv_to_load = pv_kwh.min(load_kwh);
        Ok(Self {
            spec,
            state,
            flows: EnergyFlows {
                pv_to_load,
                ..Default::default()
            },
            excess: pv_kwh - pv_to_load,
            deficit: load_kwh - pv_to_load,
        })
    }

    /// Stores as much PV excess as the rating and headroom allow.
    pub(crate) fn charge_from_pv(&mut self) -> Result<()> {
        if self.excess <= 0.0 {
            return Ok(());
        }
        let (next, stored) = apply_charge(self.state, self.spec, self.excess / STEP_HOURS, STEP_HOURS)?;
        let drawn = (stored / self.spec.charge_efficiency()).min(self.excess);
        self.state = next;
        self.flows.pv_to_batt += drawn;
        self.excess -= drawn;
        Ok(())
    }

    /// Fills whatever charge rating is left this step from the grid.
    pub(crate) fn charge_from_grid(&mut self) -> Result<()> {
        let drawn_so_far = self.flows.pv_to_batt + self.flows.grid_to_batt;
        let remaining = self.spec.max_charge_kw * STEP_HOURS - drawn_so_far;
        if remaining <= 0.0 {
            return Ok(());
        }
        let (next, stored) = apply_charge(self.state, self.spec, remaining / STEP_HOURS, STEP_HOURS)?;
        self.state = next;
        self.flows.grid_to_batt += stored / self.spec.charge_efficiency();
        Ok(())
    }

    /// Covers as much of the load deficit from storage as possible.
    pub(crate) fn discharge_to_load(&mut self) -> Result<()> {
        if self.deficit <= 0.0 {
            return Ok(());
        }
        let (next, delivered) =
            apply_discharge(self.state, self.spec, self.deficit / STEP_HOURS, STEP_HOURS)?;
        let delivered = delivered.min(self.deficit);
        self.state = next;
        self.flows.batt_to_load += delivered;
        self.deficit -= delivered;
        Ok(())
    }

    /// Exports the leftover excess and imports the leftover deficit.
    pub(crate) fn finish(mut self) -> Dispatch {
        self.flows.pv_to_grid = self.excess.max(0.0);
        self.flows.grid_to_load = self.deficit.max(0.0);
        Dispatch {
            flows: self.flows,
            next_state: self.state,
        }
    }
}
