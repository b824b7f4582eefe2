use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::run::{PolicyAggregates, Provenance};

/// Percentage by which `value` undercuts `baseline`: `100 * (B - A) / B`.
pub fn reduction_pct(value: f64, baseline: f64) -> f64 {
    100.0 * (baseline - value) / baseline
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseReduction {
    pub policy: String,
    pub baseline: String,
    pub import_reduction_pct: f64,
    pub cost_reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub baseline: String,
    pub policies: BTreeMap<String, PolicyAggregates>,
    pub pairwise: Vec<PairwiseReduction>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub provenance: BTreeMap<String, Provenance>,
}

fn check_denominator(field: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::ZeroDenominator { field, value });
    }
    Ok(())
}

/// Reductions of every policy relative to `baseline`.
pub fn compare(policies: &BTreeMap<String, PolicyAggregates>, baseline: &str) -> Result<ComparisonReport> {
    if policies.len() < 2 {
        return Err(Error::Config(format!(
            "comparison needs at least two policies, got {}",
            policies.len()
        )));
    }
    let base = policies
        .get(baseline)
        .ok_or_else(|| Error::MissingBaseline(baseline.to_string()))?;
    check_denominator("annual_import_kwh", base.annual_import_kwh)?;
    check_denominator("annual_cost_eur", base.annual_cost_eur)?;

    let pairwise = policies
        .iter()
        .filter(|(name, _)| name.as_str() != baseline)
        .map(|(name, agg)| PairwiseReduction {
            policy: name.clone(),
            baseline: baseline.to_string(),
            import_reduction_pct: reduction_pct(agg.annual_import_kwh, base.annual_import_kwh),
            cost_reduction_pct: reduction_pct(agg.annual_cost_eur, base.annual_cost_eur),
        })
        .collect();
    Ok(ComparisonReport {
        baseline: baseline.to_string(),
        policies: policies.clone(),
        pairwise,
        provenance: BTreeMap::new(),
    })
}

impl ComparisonReport {
    /// True when every reduction recomputes exactly from the absolute
    /// fields it was derived from.
    pub fn is_consistent(&self) -> bool {
        self.pairwise.iter().all(|p| {
            let (Some(a), Some(b)) = (self.policies.get(&p.policy), self.policies.get(&p.baseline)) else {
                return false;
            };
            reduction_pct(a.annual_import_kwh, b.annual_import_kwh) == p.import_reduction_pct
                && reduction_pct(a.annual_cost_eur, b.annual_cost_eur) == p.cost_reduction_pct
        })
    }

    pub fn to_json_string(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<10} {:>14} {:>14} {:>14} {:>10}",
            "policy", "import kWh", "export kWh", "cost EUR", "self-cons"
        )?;
        for (name, a) in &self.policies {
            let sc = a
                .self_consumption_ratio
                .map(|r| format!("{:.4}", r))
                .unwrap_or_else(|| "-".into());
            writeln!(
                f,
                "{:<10} {:>14.1} {:>14.1} {:>14.2} {:>10}",
                name, a.annual_import_kwh, a.annual_export_kwh, a.annual_cost_eur, sc
            )?;
        }
        writeln!(f)?;
        writeln!(f, "{:<10} {:>10} {:>16} {:>16}", "policy", "vs", "import red. %", "cost red. %")?;
        for p in &self.pairwise {
            writeln!(
                f,
                "{:<10} {:>10} {:>16.3} {:>16.3}",
                p.policy, p.baseline, p.import_reduction_pct, p.cost_reduction_pct
            )?;
        }
        Ok(())
    }
}
