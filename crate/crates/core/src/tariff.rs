//! Three-tier time-of-use tariff.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HOURS_PER_DAY: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Reduced,
    Standard,
    Peak,
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tier::Reduced => "reduced",
            Tier::Standard => "standard",
            Tier::Peak => "peak",
        })
    }
}

/// Price per tier, EUR/kWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierPrices {
    pub reduced: f64,
    pub standard: f64,
    pub peak: f64,
}

impl TierPrices {
    pub fn get(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Reduced => self.reduced,
            Tier::Standard => self.standard,
            Tier::Peak => self.peak,
        }
    }
}

/// Hour-of-day to tier map with tier prices and a flat export price.
#[derive(Debug, Clone, PartialEq)]
pub struct TariffSchedule {
    tier_of_hour: [Tier; HOURS_PER_DAY],
    prices: TierPrices,
    export_price: f64,
}

impl TariffSchedule {
    pub fn new(tier_of_hour: [Tier; HOURS_PER_DAY], prices: TierPrices, export_price: f64) -> Result<Self> {
        let tariff = Self {
            tier_of_hour,
            prices,
            export_price,
        };
        tariff.validate()?;
        Ok(tariff)
    }

    fn validate(&self) -> Result<()> {
        let p = &self.prices;
        let all = [p.reduced, p.standard, p.peak, self.export_price];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidTariff("prices must be finite and >= 0".into()));
        }
        if !(p.reduced <= p.standard && p.standard <= p.peak) {
            return Err(Error::InvalidTariff(format!(
                "need reduced ({}) <= standard ({}) <= peak ({})",
                p.reduced, p.standard, p.peak
            )));
        }
        Ok(())
    }

    pub fn tier_of_hour(&self) -> &[Tier; HOURS_PER_DAY] {
        &self.tier_of_hour
    }

    pub fn prices(&self) -> TierPrices {
        self.prices
    }

    pub fn export_price(&self) -> f64 {
        self.export_price
    }

    pub fn price_at(&self, hour: usize) -> Result<(Tier, f64)> {
        let tier = *self.tier_of_hour.get(hour).ok_or(Error::HourOutOfRange(hour))?;
        Ok((tier, self.prices.get(tier)))
    }

    /// Import price for an hour already known to be in range.
    #[inline]
    pub(crate) fn import_price(&self, hour: usize) -> f64 {
        self.prices.get(self.tier_of_hour[hour])
    }

    pub fn hours_of(&self, tier: Tier) -> Vec<usize> {
        (0..HOURS_PER_DAY).filter(|&h| self.tier_of_hour[h] == tier).collect()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: TariffFile = serde_json::from_str(s)?;
        file.try_into()
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TariffFile::from(self))?)
    }
}

impl Default for TariffSchedule {
    fn default() -> Self {
        default_tariff()
    }
}

/// Reduced 23:00-07:00, peak 17:00-19:00, standard everywhere else
/// (including the unassigned hours 7, 16 and 22). Prices 0.10 / 0.15 /
/// 0.25 EUR/kWh, no export remuneration.
pub fn default_tariff() -> TariffSchedule {
    let mut tiers = [Tier::Standard; HOURS_PER_DAY];
    for h in [23, 0, 1, 2, 3, 4, 5, 6] {
        tiers[h] = Tier::Reduced;
    }
    tiers[17] = Tier::Peak;
    tiers[18] = Tier::Peak;
    TariffSchedule {
        tier_of_hour: tiers,
        prices: TierPrices {
            reduced: 0.10,
            standard: 0.15,
            peak: 0.25,
        },
        export_price: 0.0,
    }
}

/// On-disk JSON layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TariffFile {
    tiers: TierPrices,
    export: f64,
    hours: TierHours,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TierHours {
    reduced: Vec<usize>,
    standard: Vec<usize>,
    peak: Vec<usize>,
}

impl TryFrom<TariffFile> for TariffSchedule {
    type Error = Error;

    fn try_from(file: TariffFile) -> Result<Self> {
        let mut assigned: [Option<Tier>; HOURS_PER_DAY] = [None; HOURS_PER_DAY];
        let groups = [
            (Tier::Reduced, &file.hours.reduced),
            (Tier::Standard, &file.hours.standard),
            (Tier::Peak, &file.hours.peak),
        ];
        for (tier, hours) in groups {
            for &h in hours {
                let slot = assigned.get_mut(h).ok_or(Error::HourOutOfRange(h))?;
                if let Some(prev) = slot {
                    return Err(Error::InvalidTariff(format!(
                        "hour {h} assigned to both {prev} and {tier}"
                    )));
                }
                *slot = Some(tier);
            }
        }
        let mut tiers = [Tier::Standard; HOURS_PER_DAY];
        for (h, slot) in assigned.iter().enumerate() {
            tiers[h] = slot.ok_or_else(|| Error::InvalidTariff(format!("hour {h} has no tier")))?;
        }
        TariffSchedule::new(tiers, file.tiers, file.export)
    }
}

impl From<&TariffSchedule> for TariffFile {
    fn from(t: &TariffSchedule) -> Self {
        TariffFile {
            tiers: t.prices,
            export: t.export_price,
            hours: TierHours {
                reduced: t.hours_of(Tier::Reduced),
                standard: t.hours_of(Tier::Standard),
                peak: t.hours_of(Tier::Peak),
            },
        }
    }
}
