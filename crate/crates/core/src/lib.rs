//! Dairy-farm PV-battery dispatch simulator.
//!
//! The farm draws an hourly load, a PV array produces an hourly generation,
//! and a single battery sits between them and the grid. Controllers decide
//! each hour how energy is routed:
//!
//! * [`baselines::dispatch_msc`]: maximise self-consumption of PV;
//! * [`baselines::dispatch_tou`]: grid-charge in cheap hours, discharge at peak;
//! * [`agent`]: a tabular Q-learning policy over `(hour, SoC bin)`.
//!
//! [`harness`] runs them over a year of data and compares grid import and
//! cost.

pub mod agent;
pub mod baselines;
pub mod battery;
mod dispatch;
pub mod error;
pub mod flows;
pub mod harness;
pub mod par;
pub mod sim;
pub mod tariff;
pub mod trace;

pub use battery::{apply_charge, apply_discharge, BatterySpec, BatteryState};
pub use dispatch::STEP_HOURS;
pub use error::{Error, Result};
pub use flows::{check_balance, settle_step, Dispatch, EnergyFlows, StepOutcome};
pub use tariff::{default_tariff, TariffSchedule, Tier};
pub use trace::{load_trace_csv, synth_trace, ExogenousTrace, SynthParams};
