use farmgrid::agent::{
    discretize, env_step, greedy_action, q_update, Action, DiscreteState, QLearningParams, QTable,
};
use farmgrid::baselines::{dispatch_msc, dispatch_tou, TouWindows};
use farmgrid::flows::BALANCE_TOLERANCE_KWH;
use farmgrid::{
    apply_charge, apply_discharge, check_balance, default_tariff, settle_step, BatterySpec, BatteryState,
    EnergyFlows, ExogenousTrace, StepOutcome,
};
use proptest::prelude::*;

fn battery() -> impl Strategy<Value = BatterySpec> {
    (1.0..50.0f64, 0.0..0.4f64, 0.6..1.0f64, 0.5..20.0f64, 0.5..20.0f64, 0.7..=1.0f64).prop_map(
        |(cap, lo, hi, ch, dis, rte)| BatterySpec {
            capacity_kwh: cap,
            max_charge_kw: ch,
            max_discharge_kw: dis,
            soc_min_kwh: cap * lo,
            soc_max_kwh: cap * hi,
            round_trip_efficiency: rte,
        },
    )
}

/// A spec and a valid SoC for it.
fn battery_and_soc() -> impl Strategy<Value = (BatterySpec, f64)> {
    (battery(), 0.0..=1.0f64).prop_map(|(s, f)| {
        let soc = (s.soc_min_kwh + f * (s.soc_max_kwh - s.soc_min_kwh)).clamp(s.soc_min_kwh, s.soc_max_kwh);
        (s, soc)
    })
}

fn action() -> impl Strategy<Value = Action> {
    (0usize..3).prop_map(|i| Action::from_index(i).unwrap())
}

fn energy() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), 0.0..60.0f64]
}

fn nonnegative(f: &EnergyFlows) -> bool {
    [f.pv_to_load, f.pv_to_batt, f.pv_to_grid, f.batt_to_load, f.grid_to_load, f.grid_to_batt]
        .iter()
        .all(|v| *v >= 0.0)
}

fn assert_physical(o: &StepOutcome, spec: &BatterySpec, load: f64, pv: f64) {
    assert!(check_balance(&o.flows, load, pv), "{o:?}");
    assert!(nonnegative(&o.flows), "{o:?}");
    assert!(o.next_soc_kwh >= spec.soc_min_kwh && o.next_soc_kwh <= spec.soc_max_kwh, "{o:?}");
    assert_eq!(o.grid_import_kwh, o.flows.grid_to_load + o.flows.grid_to_batt);
    assert_eq!(o.grid_export_kwh, o.flows.pv_to_grid);
}

proptest! {
    #[test]
    fn charge_stays_in_bounds_and_is_monotone((spec, soc) in battery_and_soc(), a in 0.0..30.0f64, b in 0.0..30.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (s1, e1) = apply_charge(BatteryState::new(soc), &spec, lo, 1.0).unwrap();
        let (s2, e2) = apply_charge(BatteryState::new(soc), &spec, hi, 1.0).unwrap();
        for (s, e) in [(s1, e1), (s2, e2)] {
            prop_assert!(s.soc_kwh >= soc && s.soc_kwh <= spec.soc_max_kwh);
            prop_assert!(e >= 0.0 && e <= spec.max_charge_kw * spec.charge_efficiency() + 1e-12);
        }
        prop_assert!(s2.soc_kwh >= s1.soc_kwh && e2 >= e1);
    }

    #[test]
    fn discharge_stays_in_bounds_and_is_monotone((spec, soc) in battery_and_soc(), a in 0.0..30.0f64, b in 0.0..30.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (s1, e1) = apply_discharge(BatteryState::new(soc), &spec, lo, 1.0).unwrap();
        let (s2, e2) = apply_discharge(BatteryState::new(soc), &spec, hi, 1.0).unwrap();
        for (s, e) in [(s1, e1), (s2, e2)] {
            prop_assert!(s.soc_kwh <= soc && s.soc_kwh >= spec.soc_min_kwh);
            prop_assert!(e >= 0.0 && e <= lo.max(hi).min(spec.max_discharge_kw) + 1e-12);
        }
        prop_assert!(s2.soc_kwh <= s1.soc_kwh && e2 >= e1);
    }

    #[test]
    fn lossless_round_trip_is_exact(soc8 in 0u32..=108, x8 in 0u32..=40) {
        // multiples of 1/8 kWh are exact in binary
        let spec = BatterySpec::default();
        let soc = soc8 as f64 / 8.0;
        let x = x8 as f64 / 8.0;
        let (charged, stored) = apply_charge(BatteryState::new(soc), &spec, x, 1.0).unwrap();
        let (back, delivered) = apply_discharge(charged, &spec, stored, 1.0).unwrap();
        prop_assert_eq!(stored, delivered);
        prop_assert_eq!(back.soc_kwh, soc);
    }

    #[test]
    fn every_controller_conserves_energy(
        (spec, soc) in battery_and_soc(), load in energy(), pv in energy(), hour in 0usize..24, a in action()
    ) {
        let tariff = default_tariff();
        let (_, price) = tariff.price_at(hour).unwrap();
        let state = BatteryState::new(soc);
        let msc = dispatch_msc(state, &spec, load, pv).unwrap().settle(price, 0.0).unwrap();
        let tou = dispatch_tou(hour, state, &spec, load, pv, &TouWindows::default()).unwrap().settle(price, 0.0).unwrap();
        let rl = env_step(hour, state, &spec, load, pv, a, &tariff).unwrap();
        for o in [msc, tou, rl] {
            assert_physical(&o, &spec, load, pv);
        }
    }

    #[test]
    fn msc_never_grid_charges_and_minimises_step_import(
        (spec, soc) in battery_and_soc(), load in energy(), pv in energy(), hour in 0usize..24
    ) {
        let tariff = default_tariff();
        let state = BatteryState::new(soc);
        let d = dispatch_msc(state, &spec, load, pv).unwrap();
        prop_assert_eq!(d.flows.grid_to_batt, 0.0);
        for a in Action::ALL {
            let o = env_step(hour, state, &spec, load, pv, a, &tariff).unwrap();
            prop_assert!(d.flows.grid_import() <= o.grid_import_kwh + BALANCE_TOLERANCE_KWH);
        }
    }

    #[test]
    fn tou_respects_its_windows((spec, soc) in battery_and_soc(), load in energy(), pv in energy(), hour in 0usize..24) {
        let w = TouWindows::default();
        let d = dispatch_tou(hour, BatteryState::new(soc), &spec, load, pv, &w).unwrap();
        if !w.is_charge_hour(hour) {
            prop_assert_eq!(d.flows.grid_to_batt, 0.0);
        }
        if !w.is_discharge_hour(hour) {
            prop_assert_eq!(d.flows.batt_to_load, 0.0);
        }
    }

    #[test]
    fn discharge_from_empty_equals_idle(spec in battery(), load in energy(), pv in energy(), hour in 0usize..24) {
        let tariff = default_tariff();
        let empty = spec.empty();
        let d = env_step(hour, empty, &spec, load, pv, Action::Discharge, &tariff).unwrap();
        let i = env_step(hour, empty, &spec, load, pv, Action::Idle, &tariff).unwrap();
        prop_assert_eq!(d, i);
    }

    #[test]
    fn settlement_is_pure_and_linear(
        f in prop::array::uniform6(0.0..20.0f64), p in 0.0..1.0f64, e in 0.0..0.5f64
    ) {
        let flows = EnergyFlows {
            pv_to_load: f[0], pv_to_batt: f[1], pv_to_grid: f[2],
            batt_to_load: f[3], grid_to_load: f[4], grid_to_batt: f[5],
        };
        let a = settle_step(&flows, p, e).unwrap();
        let b = settle_step(&flows, p, e).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(a.grid_import_kwh, f[4] + f[5]);
        prop_assert_eq!(a.grid_export_kwh, f[2]);
        prop_assert_eq!(a.cost_eur, (f[4] + f[5]) * p - f[2] * e);
    }

    #[test]
    fn greedy_attains_row_max(row in prop::array::uniform3(-5.0..5.0f64), hour in 0usize..24, bin in 0usize..10) {
        let mut q = QTable::new(QLearningParams::default()).unwrap();
        let s = DiscreteState { hour, soc_bin: bin };
        for a in Action::ALL {
            q.set(s, a, row[a.index()]);
        }
        let g = greedy_action(&q, s);
        prop_assert_eq!(q.get(s, g), q.max_value(s));
        // ties resolve to the lowest action code
        for a in Action::ALL {
            if q.get(s, a) == q.max_value(s) {
                prop_assert!(g.index() <= a.index());
            }
        }
    }

    #[test]
    fn q_update_moves_toward_target(
        q0 in -5.0..5.0f64, next in prop::array::uniform3(-5.0..5.0f64), r in -3.0..3.0f64,
        alpha in 0.01..=1.0f64, terminal: bool
    ) {
        let params = QLearningParams { alpha, ..Default::default() };
        let mut q = QTable::new(params).unwrap();
        let s = DiscreteState { hour: 3, soc_bin: 1 };
        let s2 = DiscreteState { hour: 4, soc_bin: 2 };
        q.set(s, Action::Idle, q0);
        for a in Action::ALL {
            q.set(s2, a, next[a.index()]);
        }
        let bootstrap = if terminal { 0.0 } else { params.gamma * q.max_value(s2) };
        let target = r + bootstrap;
        let updated = q_update(&mut q, s, Action::Idle, r, s2, terminal);
        prop_assert_eq!(updated, q.get(s, Action::Idle));
        prop_assert!(((updated - target).abs() - (1.0 - alpha) * (q0 - target).abs()).abs() < 1e-9);
    }

    #[test]
    fn discretize_is_monotone_and_in_range(a in 0.0..=13.5f64, b in 0.0..=13.5f64, n in 2usize..20, hour in 0usize..24) {
        let spec = BatterySpec::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let s1 = discretize(lo, &spec, n, hour).unwrap();
        let s2 = discretize(hi, &spec, n, hour).unwrap();
        prop_assert!(s2.soc_bin < n && s1.soc_bin <= s2.soc_bin);
        prop_assert_eq!(s1.hour, hour);
    }

    #[test]
    fn trace_csv_round_trip_is_bit_exact(
        days in 1usize..3,
        seed_vals in prop::collection::vec((0.0..1e6f64, prop_oneof![Just(0.0), 0.0..1e-3f64, 0.0..500.0f64]), 72)
    ) {
        let n = days * 24;
        let load: Vec<f64> = seed_vals[..n].iter().map(|v| v.0).collect();
        let pv: Vec<f64> = seed_vals[..n].iter().map(|v| v.1).collect();
        let trace = ExogenousTrace::new(0, load, pv).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let back = ExogenousTrace::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back, trace);
    }
}
