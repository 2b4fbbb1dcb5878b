//! Transmit side: BPSK mapping, bin allocation, unitary IFFT, CP insertion
//! and the composite adder.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::numerology::{MixedScenario, Numerology, NumerologyId};

/// Data symbols of one numerology, one row per OFDM symbol, one column per
/// active bin (ascending).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SymbolGrid {
    rows: Vec<Vec<Complex64>>,
}

impl SymbolGrid {
    pub fn new(rows: Vec<Vec<Complex64>>) -> Self {
        Self { rows }
    }

    pub fn zeros(symbols: usize, width: usize) -> Self {
        Self {
            rows: vec![vec![Complex64::new(0.0, 0.0); width]; symbols],
        }
    }

    /// All-zero grid shaped for the given numerology of `scenario`.
    pub fn silent(scenario: &MixedScenario, id: NumerologyId) -> Self {
        Self::zeros(
            scenario.symbols_per_frame(id),
            scenario.numerology(id).num_active(),
        )
    }

    pub fn num_symbols(&self) -> usize {
        self.rows.len()
    }

    pub fn symbol(&self, q: usize) -> &[Complex64] {
        &self.rows[q]
    }

    pub fn symbol_mut(&mut self, q: usize) -> &mut [Complex64] {
        &mut self.rows[q]
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex64> {
        self.rows.iter().flatten()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|v| v * factor).collect())
                .collect(),
        }
    }

    pub fn add(&self, other: &SymbolGrid) -> Self {
        assert_eq!(self.rows.len(), other.rows.len());
        Self {
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub(crate) fn check_shape(&self, symbols: usize, width: usize) -> Result<()> {
        if self.rows.len() != symbols {
            return Err(Error::ShapeMismatch(format!(
                "expected {symbols} symbols, got {}",
                self.rows.len()
            )));
        }
        if let Some(row) = self.rows.iter().find(|r| r.len() != width) {
            return Err(Error::LengthMismatch {
                expected: width,
                actual: row.len(),
            });
        }
        Ok(())
    }
}

/// Complex baseband samples at the composite sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
}

impl TimeSignal {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }
}

/// bit 0 → +1, bit 1 → −1.
pub fn map_bpsk(bits: &[bool]) -> Vec<Complex64> {
    bits.iter()
        .map(|&b| Complex64::new(if b { -1.0 } else { 1.0 }, 0.0))
        .collect()
}

/// Places `symbols` on the active bins of `numerology`; every other bin is zero.
pub fn allocate_bins(symbols: &[Complex64], numerology: &Numerology) -> Result<Vec<Complex64>> {
    if symbols.len() != numerology.num_active() {
        return Err(Error::LengthMismatch {
            expected: numerology.num_active(),
            actual: symbols.len(),
        });
    }
    let mut spectrum = vec![Complex64::new(0.0, 0.0); numerology.nfft];
    spectrum[numerology.active_bins.clone()].copy_from_slice(symbols);
    Ok(spectrum)
}

/// Planned forward/inverse DFT of one size with unitary (1/√L) scaling.
#[derive(Clone)]
pub struct UnitaryDft {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
    len: usize,
}

impl std::fmt::Debug for UnitaryDft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("UnitaryDft").field("len", &self.len).finish()
    }
}

impl UnitaryDft {
    pub fn new(len: usize) -> Self {
        Self::with_planner(&mut FftPlanner::new(), len)
    }

    pub fn with_planner(planner: &mut FftPlanner<f64>, len: usize) -> Self {
        Self {
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
            scale: 1.0 / (len as f64).sqrt(),
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In place, `x[n] = (1/√L) Σ X[m] e^{+2πi mn/L}`.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }

    /// In place, `X[m] = (1/√L) Σ x[n] e^{-2πi mn/L}`.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
    }
}

pub fn inverse_transform(spectrum: &[Complex64]) -> Vec<Complex64> {
    assert!(spectrum.len().is_power_of_two(), "transform size must be a power of two");
    let mut buf = spectrum.to_vec();
    UnitaryDft::new(buf.len()).inverse_in_place(&mut buf);
    buf
}

pub fn forward_transform(signal: &[Complex64]) -> Vec<Complex64> {
    assert!(signal.len().is_power_of_two(), "transform size must be a power of two");
    let mut buf = signal.to_vec();
    UnitaryDft::new(buf.len()).forward_in_place(&mut buf);
    buf
}

/// Prepends the last `cp_len` samples.
pub fn add_cp(segment: &[Complex64], cp_len: usize) -> Vec<Complex64> {
    assert!(cp_len < segment.len().max(1), "cp_len must be shorter than the symbol");
    let mut out = Vec::with_capacity(segment.len() + cp_len);
    out.extend_from_slice(&segment[segment.len() - cp_len..]);
    out.extend_from_slice(segment);
    out
}

/// Transmit and receive chains of one scenario with both transform sizes planned.
#[derive(Debug, Clone)]
pub struct Transceiver {
    scenario: MixedScenario,
    dft1: UnitaryDft,
    dft2: UnitaryDft,
}

impl Transceiver {
    pub fn new(scenario: &MixedScenario) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            scenario: scenario.clone(),
            dft1: UnitaryDft::with_planner(&mut planner, scenario.num1().nfft),
            dft2: UnitaryDft::with_planner(&mut planner, scenario.num2().nfft),
        }
    }

    pub fn scenario(&self) -> &MixedScenario {
        &self.scenario
    }

    pub(crate) fn dft(&self, id: NumerologyId) -> &UnitaryDft {
        match id {
            NumerologyId::One => &self.dft1,
            NumerologyId::Two => &self.dft2,
        }
    }

    /// One numerology's branch: every symbol allocated, transformed and
    /// CP-prefixed, concatenated in symbol order.
    pub fn branch(&self, id: NumerologyId, grid: &SymbolGrid) -> Result<Vec<Complex64>> {
        let num = self.scenario.numerology(id);
        grid.check_shape(self.scenario.symbols_per_frame(id), num.num_active())?;
        let dft = self.dft(id);
        let mut out = Vec::with_capacity(self.scenario.frame_len());
        for row in grid.rows() {
            let mut spectrum = allocate_bins(row, num)?;
            dft.inverse_in_place(&mut spectrum);
            out.extend_from_slice(&spectrum[num.nfft - num.cp_len..]);
            out.extend_from_slice(&spectrum);
        }
        Ok(out)
    }

    /// Composite frame: numerology-1 branch plus numerology-2 branch, sample by sample.
    pub fn build_frame(&self, grid1: &SymbolGrid, grid2: &SymbolGrid) -> Result<TimeSignal> {
        let mut samples = self.branch(NumerologyId::One, grid1)?;
        let branch2 = self.branch(NumerologyId::Two, grid2)?;
        debug_assert_eq!(samples.len(), branch2.len());
        samples.iter_mut().zip(&branch2).for_each(|(a, b)| *a += b);
        Ok(TimeSignal {
            samples,
            sample_rate_hz: self.scenario.sample_rate_hz(),
        })
    }
}

pub fn build_frame(
    scenario: &MixedScenario,
    grid1: &SymbolGrid,
    grid2: &SymbolGrid,
) -> Result<TimeSignal> {
    Transceiver::new(scenario).build_frame(grid1, grid2)
}
