use std::fmt;
use std::io::Write;
use std::ops::Range;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::flows::StepOutcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    /// Grid import per step, kWh.
    HourlyImport,
    /// Battery SoC at the end of each step, kWh.
    SocTrace,
}

impl PlotKind {
    fn value(self, o: &StepOutcome) -> f64 {
        match self {
            PlotKind::HourlyImport => o.grid_import_kwh,
            PlotKind::SocTrace => o.next_soc_kwh,
        }
    }
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hourly_import" => Ok(PlotKind::HourlyImport),
            "soc_trace" => Ok(PlotKind::SocTrace),
            other => Err(Error::Config(format!("unknown plot kind `{other}`"))),
        }
    }
}

impl fmt::Display for PlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlotKind::HourlyImport => "hourly_import",
            PlotKind::SocTrace => "soc_trace",
        })
    }
}

/// Parses a half-open step window written `a..b`.
pub fn parse_window(s: &str) -> Result<Range<usize>> {
    let bad = || Error::Config(format!("window `{s}` is not of the form a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let start = a.trim().parse().map_err(|_| bad())?;
    let end = b.trim().parse().map_err(|_| bad())?;
    Ok(start..end)
}

/// Writes long-format `step,policy,value` rows for each series over
/// `window`, series by series.
pub fn export_plot_data<W: Write>(
    mut out: W,
    series: &[(String, &[StepOutcome])],
    kind: PlotKind,
    window: Range<usize>,
) -> Result<usize> {
    let horizon = series.iter().map(|(_, s)| s.len()).min().unwrap_or(0);
    if window.start >= window.end || window.end > horizon {
        return Err(Error::BadWindow {
            start: window.start,
            end: window.end,
            horizon,
        });
    }
    let io = |e| Error::io("<plot data>", e);
    writeln!(out, "step,policy,value").map_err(io)?;
    let mut rows = 0;
    for (name, steps) in series {
        for t in window.clone() {
            writeln!(out, "{t},{name},{}", kind.value(&steps[t])).map_err(io)?;
            rows += 1;
        }
    }
    Ok(rows)
}
