//! Hourly load and PV traces: validation, CSV I/O and a seeded synthetic
//! generator for a dairy farm.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tariff::HOURS_PER_DAY;

pub const HOURS_PER_YEAR: usize = 8760;
pub const CSV_HEADER: [&str; 3] = ["step", "load_kw", "pv_kw"];

/// Hourly farm load and PV generation over a horizon, kWh per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogenousTrace {
    start_hour: usize,
    load_kwh: Vec<f64>,
    pv_kwh: Vec<f64>,
}

impl ExogenousTrace {
    pub fn new(start_hour: usize, load_kwh: Vec<f64>, pv_kwh: Vec<f64>) -> Result<Self> {
        if start_hour >= HOURS_PER_DAY {
            return Err(Error::HourOutOfRange(start_hour));
        }
        if load_kwh.len() != pv_kwh.len() {
            return Err(Error::Validation {
                row: load_kwh.len().min(pv_kwh.len()),
                field: "pv_kw".into(),
                message: format!("series lengths differ ({} vs {})", load_kwh.len(), pv_kwh.len()),
            });
        }
        if load_kwh.is_empty() {
            return Err(Error::EmptyTrace);
        }
        for (row, (&l, &p)) in load_kwh.iter().zip(&pv_kwh).enumerate() {
            check_value(row, "load_kw", l)?;
            check_value(row, "pv_kw", p)?;
        }
        Ok(Self {
            start_hour,
            load_kwh,
            pv_kwh,
        })
    }

    pub fn len(&self) -> usize {
        self.load_kwh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.load_kwh.is_empty()
    }

    pub fn start_hour(&self) -> usize {
        self.start_hour
    }

    pub fn load_kwh(&self) -> &[f64] {
        &self.load_kwh
    }

    pub fn pv_kwh(&self) -> &[f64] {
        &self.pv_kwh
    }

    #[inline]
    pub fn hour_of(&self, step: usize) -> usize {
        (self.start_hour + step) % HOURS_PER_DAY
    }

    pub fn total_load_kwh(&self) -> f64 {
        self.load_kwh.iter().sum()
    }

    pub fn total_pv_kwh(&self) -> f64 {
        self.pv_kwh.iter().sum()
    }

    /// Reads `step,load_kw,pv_kw` rows. Step 0 is hour 00:00.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .from_reader(reader);
        let mut records = rdr.records();

        let header = match records.next() {
            Some(rec) => rec.map_err(|e| csv_error(1, e))?,
            None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
        };
        if header.iter().map(str::trim).ne(CSV_HEADER) {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{}`", CSV_HEADER.join(",")),
            });
        }

        let mut load = Vec::new();
        let mut pv = Vec::new();
        for (row, rec) in records.enumerate() {
            let line = row + 2;
            let rec = rec.map_err(|e| csv_error(line, e))?;
            if rec.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 fields, found {}", rec.len()),
                });
            }
            let step: usize = rec[0].trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad step `{}`", &rec[0]),
            })?;
            if step != row {
                return Err(Error::Validation {
                    row,
                    field: "step".into(),
                    message: format!("expected step {row}, found {step}"),
                });
            }
            let l = parse_number(line, "load_kw", &rec[1])?;
            let p = parse_number(line, "pv_kw", &rec[2])?;
            check_value(row, "load_kw", l)?;
            check_value(row, "pv_kw", p)?;
            load.push(l);
            pv.push(p);
        }
        if load.is_empty() || load.len() % HOURS_PER_DAY != 0 {
            return Err(Error::Length { rows: load.len() });
        }
        Self::new(0, load, pv)
    }

    pub fn from_csv_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Writes the trace with shortest round-trip float formatting, so
    /// re-reading reproduces every value bit-exactly.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", CSV_HEADER.join(","))?;
        for (i, (l, p)) in self.load_kwh.iter().zip(&self.pv_kwh).enumerate() {
            writeln!(w, "{i},{l},{p}")?;
        }
        Ok(())
    }

    pub fn to_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        self.write_csv(&mut w).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Loads and validates a trace CSV.
pub fn load_trace_csv(path: impl AsRef<Path>) -> Result<ExogenousTrace> {
    ExogenousTrace::from_csv_file(path)
}

fn csv_error(line: usize, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(line);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn parse_number(line: usize, field: &str, raw: &str) -> Result<f64> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(Error::Parse { line, message: format!("missing {field}") });
    }
    raw.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("bad {field} `{raw}`"),
    })
}

fn check_value(row: usize, field: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::Validation { row, field: field.into(), message: format!("non-finite value {v}") });
    }
    if v < 0.0 {
        return Err(Error::Validation { row, field: field.into(), message: format!("negative value {v}") });
    }
    Ok(())
}

/// Parameters of the synthetic farm year.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthParams {
    pub n_cows: u32,
    pub annual_load_kwh: f64,
    pub pv_peak_kw: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            n_cows: 180,
            annual_load_kwh: 261_000.0,
            pv_peak_kw: 100.0,
            seed: 42,
        }
    }
}

/// Cows one milking parlour hour can handle; sets the length of each
/// milking session.
const COWS_PER_MILKING_HOUR: u32 = 60;
const MORNING_MILKING_START: usize = 5;
const EVENING_MILKING_START: usize = 16;
const SOLAR_NOON: f64 = 13.0;

/// Generates one year of hourly data for a dairy farm.
///
/// Load follows a base profile with two milking peaks, a daytime activity
/// plateau, winter-heavy seasonal modulation and seeded noise, then is scaled
/// so the annual sum equals `annual_load_kwh`. PV is a half-sine over the
/// daylight window, whose length and amplitude peak at midsummer, times a
/// seeded daily cloud factor. Daylight never extends before 04:00 or past
/// 22:00.
pub fn synth_trace(n_cows: u32, annual_load_kwh: f64, pv_peak_kw: f64, seed: u64) -> Result<ExogenousTrace> {
    if n_cows == 0 {
        return Err(Error::NonPositiveArgument { name: "n_cows", value: 0.0 });
    }
    for (name, v) in [("annual_load_kwh", annual_load_kwh), ("pv_peak_kw", pv_peak_kw)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositiveArgument { name, value: v });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let session = n_cows.div_ceil(COWS_PER_MILKING_HOUR).clamp(1, 4) as usize;
    let shape = daily_load_shape(session);

    let days = HOURS_PER_YEAR / HOURS_PER_DAY;
    let mut load = Vec::with_capacity(HOURS_PER_YEAR);
    let mut pv = Vec::with_capacity(HOURS_PER_YEAR);
    for day in 0..days {
        let phase = 2.0 * PI * day as f64 / days as f64;
        let winter = 1.0 + 0.15 * (phase - 2.0 * PI * 15.0 / days as f64).cos();
        let day_noise = rng.gen_range(0.93..1.07);

        // 0 at the winter solstice, 1 at midsummer.
        let summer = 0.5 * (1.0 - (phase + 2.0 * PI * 10.0 / days as f64).cos());
        let day_length = 6.0 + 12.0 * summer;
        let sunrise = SOLAR_NOON - day_length / 2.0;
        let amplitude = 0.15 + 0.85 * summer;
        let cloud = rng.gen_range(0.25..0.78);

        for (hour, &base) in shape.iter().enumerate() {
            load.push(base * winter * day_noise * rng.gen_range(0.9..1.1));

            let t = hour as f64 + 0.5 - sunrise;
            let gen = if t > 0.0 && t < day_length {
                pv_peak_kw * amplitude * cloud * (PI * t / day_length).sin()
            } else {
                0.0
            };
            pv.push(gen);
        }
    }

    let scale = annual_load_kwh / load.iter().sum::<f64>();
    load.iter_mut().for_each(|l| *l *= scale);
    ExogenousTrace::new(0, load, pv)
}

fn daily_load_shape(session_hours: usize) -> [f64; HOURS_PER_DAY] {
    let mut shape = [1.0; HOURS_PER_DAY];
    for v in &mut shape[8..16] {
        *v += 0.2;
    }
    for start in [MORNING_MILKING_START, EVENING_MILKING_START] {
        for h in start..start + session_hours {
            shape[h % HOURS_PER_DAY] += 0.8;
        }
    }
    shape
}
