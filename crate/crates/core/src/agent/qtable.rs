use std::io::{Read, Write};
use std::path::Path;

use crate::battery::BatterySpec;
use crate::error::{Error, Result};
use crate::tariff::HOURS_PER_DAY;

use super::{Action, QLearningParams};

pub const QTABLE_HEADER: &str = "hour,soc_bin,q_charge,q_discharge,q_idle";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiscreteState {
    pub hour: usize,
    pub soc_bin: usize,
}

/// Maps a continuous SoC onto one of `n_bins` equal-width bins over
/// `[soc_min, soc_max]`. The top edge belongs to the last bin.
pub fn discretize(soc_kwh: f64, spec: &BatterySpec, n_bins: usize, hour: usize) -> Result<DiscreteState> {
    if n_bins < 2 {
        return Err(Error::OutOfRange(format!("n_bins must be >= 2, got {n_bins}")));
    }
    if hour >= HOURS_PER_DAY {
        return Err(Error::HourOutOfRange(hour));
    }
    if !(soc_kwh >= spec.soc_min_kwh && soc_kwh <= spec.soc_max_kwh) {
        return Err(Error::InvalidState {
            soc_kwh,
            min_kwh: spec.soc_min_kwh,
            max_kwh: spec.soc_max_kwh,
        });
    }
    let frac = (soc_kwh - spec.soc_min_kwh) / (spec.soc_max_kwh - spec.soc_min_kwh);
    let soc_bin = ((frac * n_bins as f64).floor() as usize).min(n_bins - 1);
    Ok(DiscreteState { hour, soc_bin })
}

/// Dense action-value table over `24 x n_bins x 3`, with the parameters
/// used to train it.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_bins: usize,
    values: Vec<f64>,
    params: QLearningParams,
}

impl QTable {
    /// Zero-initialised table sized by `params.n_bins`.
    pub fn new(params: QLearningParams) -> Result<Self> {
        params.validate()?;
        let n_bins = params.n_bins;
        Ok(Self {
            n_bins,
            values: vec![0.0; HOURS_PER_DAY * n_bins * Action::COUNT],
            params,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn params(&self) -> &QLearningParams {
        &self.params
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    fn offset(&self, s: DiscreteState) -> usize {
        debug_assert!(s.hour < HOURS_PER_DAY && s.soc_bin < self.n_bins);
        (s.hour * self.n_bins + s.soc_bin) * Action::COUNT
    }

    #[inline]
    pub fn row(&self, s: DiscreteState) -> &[f64] {
        let o = self.offset(s);
        &self.values[o..o + Action::COUNT]
    }

    #[inline]
    pub fn get(&self, s: DiscreteState, a: Action) -> f64 {
        self.values[self.offset(s) + a.index()]
    }

    pub fn set(&mut self, s: DiscreteState, a: Action, v: f64) {
        let o = self.offset(s);
        self.values[o + a.index()] = v;
    }

    pub fn max_value(&self, s: DiscreteState) -> f64 {
        self.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn check_bins(&self, expected: usize) -> Result<()> {
        if self.n_bins != expected {
            return Err(Error::ShapeMismatch {
                expected,
                found: self.n_bins,
            });
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{QTABLE_HEADER}")?;
        for hour in 0..HOURS_PER_DAY {
            for soc_bin in 0..self.n_bins {
                let r = self.row(DiscreteState { hour, soc_bin });
                writeln!(w, "{hour},{soc_bin},{},{},{}", r[0], r[1], r[2])?;
            }
        }
        Ok(())
    }

    pub fn to_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::new();
        self.write_csv(&mut buf).map_err(|e| Error::io(path, e))?;
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    /// Reads a table written by [`QTable::write_csv`]. The number of bins
    /// found in the file must match `params.n_bins`.
    pub fn read_csv<R: Read>(mut reader: R, params: QLearningParams) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text).map_err(|e| Error::io("<qtable>", e))?;
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(QTABLE_HEADER) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{QTABLE_HEADER}`"),
            });
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let line_no = i + 2;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 5 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 5 fields, found {}", fields.len()),
                });
            }
            let bad = |what: &str| Error::Parse {
                line: line_no,
                message: format!("bad {what}"),
            };
            let hour: usize = fields[0].parse().map_err(|_| bad("hour"))?;
            let bin: usize = fields[1].parse().map_err(|_| bad("soc_bin"))?;
            let mut q = [0.0f64; 3];
            for (k, slot) in q.iter_mut().enumerate() {
                *slot = fields[2 + k].parse().map_err(|_| bad("q value"))?;
                if !slot.is_finite() {
                    return Err(bad("q value (non-finite)"));
                }
            }
            rows.push((hour, bin, q));
        }
        if rows.is_empty() || rows.len() % HOURS_PER_DAY != 0 {
            return Err(Error::Length { rows: rows.len() });
        }
        let found = rows.len() / HOURS_PER_DAY;
        if found != params.n_bins {
            return Err(Error::ShapeMismatch {
                expected: params.n_bins,
                found,
            });
        }
        let mut table = QTable::new(params)?;
        for (i, (hour, bin, q)) in rows.into_iter().enumerate() {
            if hour != i / found || bin != i % found {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!("rows out of order at ({hour}, {bin})"),
                });
            }
            let o = table.offset(DiscreteState { hour, soc_bin: bin });
            table.values[o..o + 3].copy_from_slice(&q);
        }
        Ok(table)
    }

    pub fn from_csv_file(path: impl AsRef<Path>, params: QLearningParams) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(file, params)
    }
}

/// Action with the largest value; ties go to the lowest action code.
#[inline]
pub fn greedy_action(q: &QTable, s: DiscreteState) -> Action {
    let row = q.row(s);
    let mut best = 0;
    for i in 1..Action::COUNT {
        if row[i] > row[best] {
            best = i;
        }
    }
    Action::ALL[best]
}

/// One-step temporal-difference update of `Q(s, a)`. Returns the new value.
#[inline]
pub fn q_update(q: &mut QTable, s: DiscreteState, a: Action, r: f64, s_next: DiscreteState, terminal: bool) -> f64 {
    let bootstrap = if terminal { 0.0 } else { q.params.gamma * q.max_value(s_next) };
    let o = q.offset(s) + a.index();
    let old = q.values[o];
    let new = old + q.params.alpha * (r + bootstrap - old);
    q.values[o] = new;
    new
}
