//! Asymmetric receiver: one full-frame transform for numerology 1, `2^k`
//! subblock transforms for numerology 2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerology::{MixedScenario, NumerologyId};
use crate::tx::{SymbolGrid, TimeSignal, Transceiver};

impl Transceiver {
    fn check_frame(&self, frame: &TimeSignal) -> Result<()> {
        let expected = self.scenario().frame_len();
        if frame.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: frame.len(),
            });
        }
        Ok(())
    }

    /// Strips the numerology-1 CP, runs the `n_ref`-point transform over the
    /// rest of the frame and returns the active bins.
    pub fn recv_num1(&self, frame: &TimeSignal) -> Result<Vec<Complex64>> {
        self.check_frame(frame)?;
        let num = self.scenario().num1();
        let mut buf = frame.samples[num.cp_len..].to_vec();
        self.dft(NumerologyId::One).forward_in_place(&mut buf);
        Ok(buf[num.active_bins.clone()].to_vec())
    }

    /// Cuts the frame into `2^k` subblocks on numerology-2 symbol boundaries;
    /// each one drops its own CP before the short transform.
    pub fn recv_num2(&self, frame: &TimeSignal) -> Result<SymbolGrid> {
        self.check_frame(frame)?;
        let num = self.scenario().num2();
        let dft = self.dft(NumerologyId::Two);
        let rows = frame
            .samples
            .chunks_exact(num.symbol_len())
            .map(|block| {
                let mut buf = block[num.cp_len..].to_vec();
                dft.forward_in_place(&mut buf);
                buf[num.active_bins.clone()].to_vec()
            })
            .collect::<Vec<_>>();
        debug_assert_eq!(rows.len(), self.scenario().scale());
        Ok(SymbolGrid::new(rows))
    }
}

pub fn recv_num1(frame: &TimeSignal, scenario: &MixedScenario) -> Result<Vec<Complex64>> {
    Transceiver::new(scenario).recv_num1(frame)
}

pub fn recv_num2(frame: &TimeSignal, scenario: &MixedScenario) -> Result<SymbolGrid> {
    Transceiver::new(scenario).recv_num2(frame)
}

/// `received - transmitted`, element by element.
pub fn error_vector(received: &[Complex64], transmitted: &[Complex64]) -> Result<Vec<Complex64>> {
    if received.len() != transmitted.len() {
        return Err(Error::ShapeMismatch(format!(
            "received has {} bins, transmitted has {}",
            received.len(),
            transmitted.len()
        )));
    }
    Ok(received.iter().zip(transmitted).map(|(r, t)| r - t).collect())
}

/// [`error_vector`] applied symbol by symbol.
pub fn grid_error(received: &SymbolGrid, transmitted: &SymbolGrid) -> Result<SymbolGrid> {
    if received.num_symbols() != transmitted.num_symbols() {
        return Err(Error::ShapeMismatch(format!(
            "received has {} symbols, transmitted has {}",
            received.num_symbols(),
            transmitted.num_symbols()
        )));
    }
    received
        .rows()
        .iter()
        .zip(transmitted.rows())
        .map(|(r, t)| error_vector(r, t))
        .collect::<Result<Vec<_>>>()
        .map(SymbolGrid::new)
}
