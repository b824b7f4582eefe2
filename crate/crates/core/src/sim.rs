//! Step-by-step rollout of a controller over a trace.

use crate::baselines::{dispatch_msc, dispatch_tou, TouWindows};
use crate::battery::{BatterySpec, BatteryState};
use crate::error::Result;
use crate::flows::StepOutcome;
use crate::tariff::TariffSchedule;
use crate::trace::ExogenousTrace;

/// Anything that can decide one hour of dispatch.
pub trait Controller {
    fn step(
        &self,
        hour: usize,
        state: BatteryState,
        spec: &BatterySpec,
        load_kwh: f64,
        pv_kwh: f64,
        tariff: &TariffSchedule,
    ) -> Result<StepOutcome>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Msc;

impl Controller for Msc {
    fn step(
        &self,
        hour: usize,
        state: BatteryState,
        spec: &BatterySpec,
        load_kwh: f64,
        pv_kwh: f64,
        tariff: &TariffSchedule,
    ) -> Result<StepOutcome> {
        let (_, price) = tariff.price_at(hour)?;
        dispatch_msc(state, spec, load_kwh, pv_kwh)?.settle(price, tariff.export_price())
    }
}

#[derive(Debug, Clone, Default)]
pub struct Tou {
    pub windows: TouWindows,
}

impl Controller for Tou {
    fn step(
        &self,
        hour: usize,
        state: BatteryState,
        spec: &BatterySpec,
        load_kwh: f64,
        pv_kwh: f64,
        tariff: &TariffSchedule,
    ) -> Result<StepOutcome> {
        let (_, price) = tariff.price_at(hour)?;
        dispatch_tou(hour, state, spec, load_kwh, pv_kwh, &self.windows)?.settle(price, tariff.export_price())
    }
}

/// Per-step outcomes of a rollout and their totals.
#[derive(Debug, Clone, PartialEq)]
pub struct Rollout {
    pub steps: Vec<StepOutcome>,
    pub grid_import_kwh: f64,
    pub grid_export_kwh: f64,
    pub cost_eur: f64,
}

pub fn rollout<C: Controller + ?Sized>(
    controller: &C,
    trace: &ExogenousTrace,
    spec: &BatterySpec,
    tariff: &TariffSchedule,
    initial: BatteryState,
) -> Result<Rollout> {
    spec.validate()?;
    initial.check(spec)?;
    let mut state = initial;
    let mut steps = Vec::with_capacity(trace.len());
    let (mut import, mut export, mut cost) = (0.0, 0.0, 0.0);
    for (t, (&load, &pv)) in trace.load_kwh().iter().zip(trace.pv_kwh()).enumerate() {
        let o = controller.step(trace.hour_of(t), state, spec, load, pv, tariff)?;
        import += o.grid_import_kwh;
        export += o.grid_export_kwh;
        cost += o.cost_eur;
        state = BatteryState::new(o.next_soc_kwh);
        steps.push(o);
    }
    Ok(Rollout {
        steps,
        grid_import_kwh: import,
        grid_export_kwh: export,
        cost_eur: cost,
    })
}
