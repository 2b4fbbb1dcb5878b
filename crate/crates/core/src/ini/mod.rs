//! Inter-numerology interference measurement.
//!
//! Two independent routes produce the same [`IniReport`]: a seeded Monte
//! Carlo over random BPSK frames ([`run_monte_carlo`]) and a deterministic
//! expectation from the linear coupling gains ([`coupling_matrix`] followed by
//! [`expected_ini`]).

mod coupling;
mod guard;
mod montecarlo;
mod summary;

pub use coupling::{coupling_matrix, expected_ini, CouplingBlock, CouplingMatrix, Slot};
pub use guard::{min_guard_search, worst_case_ini_db};
pub use montecarlo::run_monte_carlo;
pub use summary::{summarize, IniSummary, NumerologySummary};

use serde::Serialize;

use crate::numerology::{MixedScenario, NumerologyId};

/// Mean powers below this are reported at [`FLOOR_DB`].
pub const FLOOR_POWER: f64 = 1e-20;
pub const FLOOR_DB: f64 = -200.0;

pub fn power_to_db(power: f64) -> f64 {
    if power < FLOOR_POWER {
        FLOOR_DB
    } else {
        10.0 * power.log10()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IniEntry {
    pub numerology: NumerologyId,
    pub bin_index: usize,
    pub abs_freq_khz: u64,
    /// Mean |e|² relative to unit symbol power.
    pub mean_power: f64,
    pub ini_db: f64,
    /// Monte Carlo trials behind the estimate; 0 for the analytic route.
    pub trials: usize,
}

impl IniEntry {
    pub fn is_floor(&self) -> bool {
        self.mean_power < FLOOR_POWER
    }
}

/// Per-subcarrier mean interference of both numerologies of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct IniReport {
    scenario: MixedScenario,
    entries: Vec<IniEntry>,
}

impl IniReport {
    /// `num1_power` has one value per numerology-1 active bin; `num2_power`
    /// is symbol-major, `2^k` rows of numerology-2 active bins, and is
    /// averaged over its rows.
    pub(crate) fn from_slot_power(
        scenario: &MixedScenario,
        num1_power: &[f64],
        num2_power: &[f64],
        trials: usize,
    ) -> Self {
        let num1 = scenario.num1();
        let num2 = scenario.num2();
        let width2 = num2.num_active();
        debug_assert_eq!(num1_power.len(), num1.num_active());
        debug_assert_eq!(num2_power.len(), width2 * scenario.scale());

        let entry = |numerology, bin, mean_power| IniEntry {
            numerology,
            bin_index: bin,
            abs_freq_khz: scenario.numerology(numerology).abs_freq_khz(bin),
            mean_power,
            ini_db: power_to_db(mean_power),
            trials,
        };

        let mut entries = Vec::with_capacity(num1.num_active() + width2);
        for (bin, &p) in num1.active_bins.clone().zip(num1_power) {
            entries.push(entry(NumerologyId::One, bin, p));
        }
        for (pos, bin) in num2.active_bins.clone().enumerate() {
            let total: f64 = num2_power[pos..].iter().step_by(width2).sum();
            entries.push(entry(NumerologyId::Two, bin, total / scenario.scale() as f64));
        }
        Self {
            scenario: scenario.clone(),
            entries,
        }
    }

    pub fn scenario(&self) -> &MixedScenario {
        &self.scenario
    }

    pub fn entries(&self) -> &[IniEntry] {
        &self.entries
    }

    pub fn numerology(&self, id: NumerologyId) -> impl Iterator<Item = &IniEntry> {
        self.entries.iter().filter(move |e| e.numerology == id)
    }

    pub fn entry(&self, id: NumerologyId, bin: usize) -> Option<&IniEntry> {
        self.numerology(id).find(|e| e.bin_index == bin)
    }
}
