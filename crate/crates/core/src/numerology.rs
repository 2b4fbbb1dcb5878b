//! Numerology parameter sets and the two-numerology scenario layout.
//!
//! Everything about bin placement, CP lengths and guard accounting is derived
//! here once. The transmit and receive chains only read the resulting
//! [`MixedScenario`].

use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};

/// Subcarrier spacing of the reference numerology (µ = 0).
pub const BASE_SCS_KHZ: u32 = 15;

/// Normal-CP overhead: 4.76 µs on a 66.67 µs useful symbol at 15 kHz.
pub const DEFAULT_CP_RATIO: f64 = 1.0 / 14.0;

pub const DEFAULT_N_REF: usize = 256;

pub const DEFAULT_TRIALS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FreqRange {
    #[serde(rename = "FR1")]
    Fr1,
    #[serde(rename = "FR2")]
    Fr2,
}

impl fmt::Display for FreqRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreqRange::Fr1 => f.write_str("FR1"),
            FreqRange::Fr2 => f.write_str("FR2"),
        }
    }
}

/// One row of the NR data-channel numerology table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumerologyEntry {
    pub mu: u32,
    pub scs_khz: u32,
    /// Normal CP duration.
    pub cp_dur_us: f64,
    /// Extended CP duration, only defined for 60 kHz.
    pub extended_cp_dur_us: Option<f64>,
    pub slot_ms: f64,
    pub max_bw_mhz: u32,
    pub freq_range: FreqRange,
}

const fn entry(
    freq_range: FreqRange,
    mu: u32,
    cp_dur_us: f64,
    extended_cp_dur_us: Option<f64>,
    max_bw_mhz: u32,
) -> NumerologyEntry {
    NumerologyEntry {
        mu,
        scs_khz: BASE_SCS_KHZ << mu,
        cp_dur_us,
        extended_cp_dur_us,
        slot_ms: 1.0 / (1u32 << mu) as f64,
        max_bw_mhz,
        freq_range,
    }
}

static CATALOG: [NumerologyEntry; 5] = [
    entry(FreqRange::Fr1, 0, 4.76, None, 50),
    entry(FreqRange::Fr1, 1, 2.38, None, 100),
    entry(FreqRange::Fr1, 2, 1.19, Some(4.17), 100),
    entry(FreqRange::Fr2, 2, 1.19, Some(4.17), 200),
    entry(FreqRange::Fr2, 3, 0.60, None, 400),
];

/// All rows of the numerology table, FR1 first, ascending SCS.
pub fn catalog() -> &'static [NumerologyEntry] {
    &CATALOG
}

pub fn catalog_lookup(scs_khz: u32, freq_range: FreqRange) -> Result<NumerologyEntry> {
    CATALOG
        .iter()
        .find(|e| e.scs_khz == scs_khz && e.freq_range == freq_range)
        .copied()
        .ok_or(Error::UnknownNumerology {
            scs_khz,
            freq_range,
        })
}

/// Splits a total guard between the two numerologies.
///
/// Half of the guard (rounded down to whole wide subcarriers) is taken from
/// the wide numerology, the remainder from the narrow one, so that
/// `g1 * scs1 + g2 * scs2 == guard_khz` always holds.
pub fn guard_split(guard_khz: u32, scs1_khz: u32, scs2_khz: u32) -> Result<(usize, usize)> {
    if scs1_khz == 0 || scs2_khz < scs1_khz || scs2_khz % scs1_khz != 0 {
        return Err(Error::InvalidGuard(format!(
            "spacings {scs1_khz} kHz / {scs2_khz} kHz are not related by 2^k"
        )));
    }
    if !(scs2_khz / scs1_khz).is_power_of_two() {
        return Err(Error::InvalidGuard(format!(
            "spacing ratio {} is not a power of two",
            scs2_khz / scs1_khz
        )));
    }
    if guard_khz % scs1_khz != 0 {
        return Err(Error::InvalidGuard(format!(
            "{guard_khz} kHz is not a multiple of {scs1_khz} kHz"
        )));
    }
    let g2 = guard_khz / (2 * scs2_khz);
    let g1 = (guard_khz - g2 * scs2_khz) / scs1_khz;
    Ok((g1 as usize, g2 as usize))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NumerologyId {
    /// Narrow spacing, full `n_ref`-point transform.
    One,
    /// Wide spacing, `n_ref / 2^k`-point transform.
    Two,
}

impl NumerologyId {
    pub fn index(self) -> u8 {
        match self {
            NumerologyId::One => 1,
            NumerologyId::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            NumerologyId::One => NumerologyId::Two,
            NumerologyId::Two => NumerologyId::One,
        }
    }
}

impl fmt::Display for NumerologyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// One OFDM lattice as used inside a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Numerology {
    pub scs_khz: u32,
    pub nfft: usize,
    pub cp_len: usize,
    /// Contiguous, ascending. Empty when the numerology is silenced.
    pub active_bins: Range<usize>,
}

impl Numerology {
    pub fn num_active(&self) -> usize {
        self.active_bins.len()
    }

    pub fn symbol_len(&self) -> usize {
        self.nfft + self.cp_len
    }

    pub fn abs_freq_khz(&self, bin: usize) -> u64 {
        bin as u64 * self.scs_khz as u64
    }
}

/// Parameters for [`MixedScenario`]; `build()` validates and derives the layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n_ref: usize,
    pub k: u32,
    pub cp_ratio: f64,
    pub guard_khz: u32,
    pub base_scs_khz: u32,
    pub trials: usize,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n_ref: DEFAULT_N_REF,
            k: 1,
            cp_ratio: DEFAULT_CP_RATIO,
            guard_khz: 0,
            base_scs_khz: BASE_SCS_KHZ,
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn build(&self) -> Result<MixedScenario> {
        let invalid = |msg: String| Err(Error::InvalidScenario(msg));
        let &ScenarioConfig {
            n_ref,
            k,
            cp_ratio,
            guard_khz,
            base_scs_khz,
            trials,
            seed,
        } = self;

        if k < 1 {
            return invalid(format!("k must satisfy k >= 1 (got k = {k})"));
        }
        if k > 20 {
            return invalid(format!("k = {k} is unreasonably large"));
        }
        let scale = 1usize << k;
        if !n_ref.is_power_of_two() || n_ref < scale * 4 {
            return invalid(format!(
                "n_ref must be a power of two >= 2^(k+2) = {} (got {n_ref})",
                scale * 4
            ));
        }
        if !cp_ratio.is_finite() || !(0.0..0.5).contains(&cp_ratio) {
            return invalid(format!("cp_ratio must lie in [0, 0.5) (got {cp_ratio})"));
        }
        if base_scs_khz == 0 {
            return invalid("base_scs_khz must be positive".into());
        }
        if trials < 1 {
            return invalid("trials must be >= 1".into());
        }

        let scs2_khz = base_scs_khz << k;
        let (g1, g2) = guard_split(guard_khz, base_scs_khz, scs2_khz)?;

        let m = n_ref / scale;
        let half1 = n_ref / 2;
        let half2 = m / 2;
        if g1 >= half1 || g2 >= half2 {
            return invalid(format!(
                "guard {guard_khz} kHz leaves no active bin (g1 = {g1} of {half1}, g2 = {g2} of {half2})"
            ));
        }

        let cp2 = (cp_ratio * m as f64).round() as usize;
        let cp1 = scale * cp2;

        let num1 = Numerology {
            scs_khz: base_scs_khz,
            nfft: n_ref,
            cp_len: cp1,
            active_bins: 0..half1 - g1,
        };
        let num2 = Numerology {
            scs_khz: scs2_khz,
            nfft: m,
            cp_len: cp2,
            active_bins: half2 + g2..m,
        };
        debug_assert_eq!(num1.symbol_len(), scale * num2.symbol_len());

        Ok(MixedScenario {
            n_ref,
            k,
            cp_ratio,
            guard_khz,
            base_scs_khz,
            trials,
            seed,
            num1,
            num2,
            g1,
            g2,
        })
    }
}

/// A validated two-numerology experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedScenario {
    n_ref: usize,
    k: u32,
    cp_ratio: f64,
    guard_khz: u32,
    base_scs_khz: u32,
    trials: usize,
    seed: u64,
    num1: Numerology,
    num2: Numerology,
    g1: usize,
    g2: usize,
}

/// Builds a scenario at the default 15 kHz base spacing.
pub fn build_scenario(
    n_ref: usize,
    k: u32,
    cp_ratio: f64,
    guard_khz: u32,
    trials: usize,
    seed: u64,
) -> Result<MixedScenario> {
    ScenarioConfig {
        n_ref,
        k,
        cp_ratio,
        guard_khz,
        base_scs_khz: BASE_SCS_KHZ,
        trials,
        seed,
    }
    .build()
}

impl MixedScenario {
    pub fn n_ref(&self) -> usize {
        self.n_ref
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of wide-spacing symbols per narrow-spacing symbol, `2^k`.
    pub fn scale(&self) -> usize {
        1 << self.k
    }

    pub fn cp_ratio(&self) -> f64 {
        self.cp_ratio
    }

    pub fn guard_khz(&self) -> u32 {
        self.guard_khz
    }

    pub fn base_scs_khz(&self) -> u32 {
        self.base_scs_khz
    }

    pub fn trials(&self) -> usize {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num1(&self) -> &Numerology {
        &self.num1
    }

    pub fn num2(&self) -> &Numerology {
        &self.num2
    }

    pub fn numerology(&self, id: NumerologyId) -> &Numerology {
        match id {
            NumerologyId::One => &self.num1,
            NumerologyId::Two => &self.num2,
        }
    }

    /// Guard subcarriers ceded by numerology 1 and numerology 2.
    pub fn guard_bins(&self) -> (usize, usize) {
        (self.g1, self.g2)
    }

    /// Composite frame length: one numerology-1 symbol with its CP.
    pub fn frame_len(&self) -> usize {
        self.num1.symbol_len()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.n_ref as f64 * self.base_scs_khz as f64 * 1000.0
    }

    /// Symbols per frame carried by the given numerology.
    pub fn symbols_per_frame(&self, id: NumerologyId) -> usize {
        match id {
            NumerologyId::One => 1,
            NumerologyId::Two => self.scale(),
        }
    }

    /// Copy of this scenario with one numerology carrying no data.
    pub fn silenced(&self, id: NumerologyId) -> MixedScenario {
        let mut out = self.clone();
        let num = match id {
            NumerologyId::One => &mut out.num1,
            NumerologyId::Two => &mut out.num2,
        };
        num.active_bins = num.active_bins.start..num.active_bins.start;
        out
    }

    pub fn with_trials(&self, trials: usize) -> Result<MixedScenario> {
        self.config_with(|c| c.trials = trials)
    }

    pub fn with_guard(&self, guard_khz: u32) -> Result<MixedScenario> {
        self.config_with(|c| c.guard_khz = guard_khz)
    }

    /// Equal in everything that shapes the signal; trial count and seed are ignored.
    pub fn same_layout(&self, other: &MixedScenario) -> bool {
        self.n_ref == other.n_ref
            && self.k == other.k
            && self.cp_ratio == other.cp_ratio
            && self.guard_khz == other.guard_khz
            && self.base_scs_khz == other.base_scs_khz
            && self.num1 == other.num1
            && self.num2 == other.num2
    }

    pub fn config(&self) -> ScenarioConfig {
        ScenarioConfig {
            n_ref: self.n_ref,
            k: self.k,
            cp_ratio: self.cp_ratio,
            guard_khz: self.guard_khz,
            base_scs_khz: self.base_scs_khz,
            trials: self.trials,
            seed: self.seed,
        }
    }

    fn config_with(&self, f: impl FnOnce(&mut ScenarioConfig)) -> Result<MixedScenario> {
        let mut config = self.config();
        f(&mut config);
        let mut out = config.build()?;
        // keep a silenced numerology silenced
        if self.num1.active_bins.is_empty() {
            out = out.silenced(NumerologyId::One);
        }
        if self.num2.active_bins.is_empty() {
            out = out.silenced(NumerologyId::Two);
        }
        Ok(out)
    }
}
