//! Test oracles shared by the integration suites. Nothing here calls the
//! dispatch code under test; flows are recomputed from first principles.

#![allow(dead_code)]

use std::collections::BTreeMap;

use farmgrid::{BatterySpec, ExogenousTrace, TariffSchedule};

/// Battery used with the toy day. A 6.75 kW rating on a 13.5 kWh pack
/// with 3 bins means every reachable SoC is one of {0, 6.75, 13.5}, one
/// per bin, so the binned MDP and the exact one coincide.
pub fn toy_battery() -> BatterySpec {
    BatterySpec {
        max_charge_kw: 6.75,
        max_discharge_kw: 6.75,
        ..BatterySpec::default()
    }
}

/// One deterministic day starting at midnight. Load is either zero or at
/// least the discharge rating and PV either zero or covers the load, so a
/// discharge always empties a whole rating step.
pub fn toy_day() -> ExogenousTrace {
    let mut load = vec![0.0; 24];
    let mut pv = vec![0.0; 24];
    for h in 0..24 {
        load[h] = match h {
            0..=4 => 7.0,
            5 | 6 => 12.0,
            7 => 8.0,
            8..=15 => 7.0,
            16 => 14.0,
            17 | 18 => 15.0,
            19..=22 => 8.0,
            _ => 0.0,
        };
        pv[h] = match h {
            8..=10 => 10.0,
            11..=14 => 20.0,
            15 => 9.0,
            _ => 0.0,
        };
    }
    ExogenousTrace::new(0, load, pv).unwrap()
}

/// Reference flows for one lossless hour under one of the three agent
/// actions (0 charge, 1 discharge, 2 idle). Returns (import, export, soc').
pub fn reference_step(spec: &BatterySpec, soc: f64, load: f64, pv: f64, action: usize) -> (f64, f64, f64) {
    assert_eq!(spec.round_trip_efficiency, 1.0, "reference step is lossless only");
    let excess = (pv - load).max(0.0);
    let deficit = (load - pv).max(0.0);
    match action {
        0 => {
            let headroom = spec.soc_max_kwh - soc;
            let from_pv = excess.min(spec.max_charge_kw).min(headroom);
            let from_grid = (spec.max_charge_kw - from_pv).min(headroom - from_pv);
            (deficit + from_grid, excess - from_pv, soc + from_pv + from_grid)
        }
        1 => {
            let out = deficit.min(spec.max_discharge_kw).min(soc - spec.soc_min_kwh);
            (deficit - out, excess, soc - out)
        }
        _ => (deficit, excess, soc),
    }
}

fn reference_cost(tariff: &TariffSchedule, hour: usize, import: f64, export: f64) -> f64 {
    let (_, price) = tariff.price_at(hour).unwrap();
    import * price - export * tariff.export_price()
}

fn bin_of(spec: &BatterySpec, soc: f64, n_bins: usize) -> usize {
    let frac = (soc - spec.soc_min_kwh) / (spec.soc_max_kwh - spec.soc_min_kwh);
    ((frac * n_bins as f64).floor() as usize).min(n_bins - 1)
}

/// Optimal undiscounted cost over the trace found by backward induction
/// over the exact reachable SoCs, together with the optimal action per
/// `(step, SoC)`.
pub struct DpSolution {
    pub optimal_cost: f64,
    pub policy: BTreeMap<(usize, u64), usize>,
}

/// Solves the finite-horizon MDP of the lossless agent actions. Panics if
/// two distinct reachable SoCs fall in the same bin at the same step, since
/// the binned agent could then not represent the optimum.
pub fn solve_dp(trace: &ExogenousTrace, spec: &BatterySpec, tariff: &TariffSchedule, soc0: f64, n_bins: usize) -> DpSolution {
    let n = trace.len();
    let (load, pv) = (trace.load_kwh(), trace.pv_kwh());

    let mut layers: Vec<BTreeMap<u64, f64>> = vec![BTreeMap::new(); n + 1];
    layers[0].insert(soc0.to_bits(), soc0);
    for t in 0..n {
        let current: Vec<f64> = layers[t].values().copied().collect();
        for soc in current {
            for a in 0..3 {
                let (_, _, next) = reference_step(spec, soc, load[t], pv[t], a);
                layers[t + 1].insert(next.to_bits(), next);
            }
        }
    }
    for (t, layer) in layers.iter().enumerate() {
        let mut seen: BTreeMap<usize, f64> = BTreeMap::new();
        for &soc in layer.values() {
            if let Some(prev) = seen.insert(bin_of(spec, soc, n_bins), soc) {
                panic!("step {t}: SoCs {prev} and {soc} share a bin");
            }
        }
    }

    let mut value: BTreeMap<u64, f64> = layers[n].keys().map(|&k| (k, 0.0)).collect();
    let mut policy = BTreeMap::new();
    for t in (0..n).rev() {
        let hour = trace.hour_of(t);
        let mut here = BTreeMap::new();
        for (&key, &soc) in &layers[t] {
            let mut best = (f64::INFINITY, 0);
            for a in 0..3 {
                let (imp, exp, next) = reference_step(spec, soc, load[t], pv[t], a);
                let total = reference_cost(tariff, hour, imp, exp) + value[&next.to_bits()];
                // strict: ties keep the lowest action index
                if total < best.0 - 1e-12 {
                    best = (total, a);
                }
            }
            here.insert(key, best.0);
            policy.insert((t, key), best.1);
        }
        value = here;
    }
    DpSolution {
        optimal_cost: value[&soc0.to_bits()],
        policy,
    }
}

/// Cost of never touching the battery.
pub fn idle_cost(trace: &ExogenousTrace, tariff: &TariffSchedule) -> f64 {
    (0..trace.len())
        .map(|t| {
            let (l, p) = (trace.load_kwh()[t], trace.pv_kwh()[t]);
            reference_cost(tariff, trace.hour_of(t), (l - p).max(0.0), (p - l).max(0.0))
        })
        .sum()
}
