use serde::Serialize;

use super::{power_to_db, IniReport};
use crate::numerology::{MixedScenario, NumerologyId};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumerologySummary {
    /// Active bin nearest the inter-numerology boundary.
    pub edge_bin: usize,
    pub edge_ini_db: f64,
    /// Median over the active bins other than the edge bin.
    pub inner_median_db: f64,
    /// Arithmetic mean of the per-bin dB values.
    pub mean_ini_db: f64,
    /// Mean interference power over the bins, in dB.
    pub mean_power_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IniSummary {
    pub num1: Option<NumerologySummary>,
    pub num2: Option<NumerologySummary>,
    /// Numerology-1 mean dB per class of `bin_index mod 2^k`; `None` for an
    /// empty class.
    pub residue_class_means: Vec<Option<f64>>,
    pub num2_minus_num1_db: Option<f64>,
}

impl IniSummary {
    pub fn numerology(&self, id: NumerologyId) -> Option<&NumerologySummary> {
        match id {
            NumerologyId::One => self.num1.as_ref(),
            NumerologyId::Two => self.num2.as_ref(),
        }
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    })
}

fn summarize_numerology(report: &IniReport, id: NumerologyId) -> Option<NumerologySummary> {
    let entries: Vec<_> = report.numerology(id).collect();
    let edge = match id {
        NumerologyId::One => entries.iter().max_by_key(|e| e.bin_index)?,
        NumerologyId::Two => entries.iter().min_by_key(|e| e.bin_index)?,
    };
    let db: Vec<f64> = entries.iter().map(|e| e.ini_db).collect();
    let mut inner: Vec<f64> = entries
        .iter()
        .filter(|e| e.bin_index != edge.bin_index)
        .map(|e| e.ini_db)
        .collect();
    let powers: Vec<f64> = entries.iter().map(|e| e.mean_power).collect();
    Some(NumerologySummary {
        edge_bin: edge.bin_index,
        edge_ini_db: edge.ini_db,
        inner_median_db: median(&mut inner).unwrap_or(edge.ini_db),
        mean_ini_db: mean(&db)?,
        mean_power_db: power_to_db(mean(&powers)?),
    })
}

/// Edge, median, mean and residue-class statistics of a report.
pub fn summarize(report: &IniReport, scenario: &MixedScenario) -> IniSummary {
    let num1 = summarize_numerology(report, NumerologyId::One);
    let num2 = summarize_numerology(report, NumerologyId::Two);

    let scale = scenario.scale();
    let residue_class_means = (0..scale)
        .map(|r| {
            let class: Vec<f64> = report
                .numerology(NumerologyId::One)
                .filter(|e| e.bin_index % scale == r)
                .map(|e| e.ini_db)
                .collect();
            mean(&class)
        })
        .collect();

    let num2_minus_num1_db = match (&num1, &num2) {
        (Some(a), Some(b)) => Some(b.mean_ini_db - a.mean_ini_db),
        _ => None,
    };
    IniSummary {
        num1,
        num2,
        residue_class_means,
        num2_minus_num1_db,
    }
}
