use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::IniReport;
use crate::error::{Error, Result};
use crate::numerology::{MixedScenario, NumerologyId};
use crate::tx::{SymbolGrid, Transceiver};

/// One resource element: numerology, OFDM symbol within the frame, bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Slot {
    pub numerology: NumerologyId,
    pub symbol: usize,
    pub bin: usize,
}

/// Active slots of one numerology, symbol-major.
fn active_slots(scenario: &MixedScenario, id: NumerologyId) -> Vec<Slot> {
    let num = scenario.numerology(id);
    (0..scenario.symbols_per_frame(id))
        .flat_map(|symbol| {
            num.active_bins.clone().map(move |bin| Slot {
                numerology: id,
                symbol,
                bin,
            })
        })
        .collect()
}

/// Gains from every slot of one numerology onto every slot of the other.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingBlock {
    victims: Vec<Slot>,
    sources: Vec<Slot>,
    /// Source-major: `gains[s * victims.len() + v]`.
    gains: Vec<Complex64>,
}

impl CouplingBlock {
    /// `gains` is source-major. Victims and sources must each belong to a
    /// single numerology, and not the same one.
    pub fn new(victims: Vec<Slot>, sources: Vec<Slot>, gains: Vec<Complex64>) -> Result<Self> {
        if gains.len() != victims.len() * sources.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} gains for {} victims x {} sources",
                gains.len(),
                victims.len(),
                sources.len()
            )));
        }
        if let (Some(v), Some(s)) = (victims.first(), sources.first()) {
            let cross = victims.iter().all(|x| x.numerology == v.numerology)
                && sources.iter().all(|x| x.numerology == s.numerology)
                && v.numerology != s.numerology;
            if !cross {
                return Err(Error::ShapeMismatch(
                    "coupling is defined between different numerologies only".into(),
                ));
            }
        }
        Ok(Self {
            victims,
            sources,
            gains,
        })
    }

    pub fn victims(&self) -> &[Slot] {
        &self.victims
    }

    pub fn sources(&self) -> &[Slot] {
        &self.sources
    }

    pub fn gain(&self, victim: usize, source: usize) -> Complex64 {
        self.gains[source * self.victims.len() + victim]
    }

    /// Gains of one source onto all victims.
    pub fn column(&self, source: usize) -> &[Complex64] {
        let n = self.victims.len();
        &self.gains[source * n..(source + 1) * n]
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Slot, &Slot, Complex64)> + '_ {
        self.sources.iter().enumerate().flat_map(move |(s, src)| {
            self.victims
                .iter()
                .zip(self.column(s))
                .map(move |(v, &g)| (v, src, g))
        })
    }

    /// Σ over sources of |gain|², per victim.
    fn victim_power(&self) -> Vec<f64> {
        let mut power = vec![0.0; self.victims.len()];
        for s in 0..self.sources.len() {
            power
                .iter_mut()
                .zip(self.column(s))
                .for_each(|(p, g)| *p += g.norm_sqr());
        }
        power
    }
}

/// Deterministic leakage model of one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    scenario: MixedScenario,
    onto_num1: CouplingBlock,
    onto_num2: CouplingBlock,
}

impl CouplingMatrix {
    pub fn from_blocks(
        scenario: &MixedScenario,
        onto_num1: CouplingBlock,
        onto_num2: CouplingBlock,
    ) -> Result<Self> {
        for (block, id) in [(&onto_num1, NumerologyId::One), (&onto_num2, NumerologyId::Two)] {
            let num = scenario.numerology(id);
            let symbols = scenario.symbols_per_frame(id);
            let bad = block.victims.iter().find(|v| {
                v.numerology != id || v.symbol >= symbols || !num.active_bins.contains(&v.bin)
            });
            if let Some(v) = bad {
                return Err(Error::ShapeMismatch(format!(
                    "victim {v:?} is not an active slot of numerology {id}"
                )));
            }
        }
        Ok(Self {
            scenario: scenario.clone(),
            onto_num1,
            onto_num2,
        })
    }

    pub fn scenario(&self) -> &MixedScenario {
        &self.scenario
    }

    /// Leakage onto the given victim numerology.
    pub fn onto(&self, victim: NumerologyId) -> &CouplingBlock {
        match victim {
            NumerologyId::One => &self.onto_num1,
            NumerologyId::Two => &self.onto_num2,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.onto_num1.is_empty() && self.onto_num2.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Slot, &Slot, Complex64)> + '_ {
        self.onto_num1.iter().chain(self.onto_num2.iter())
    }

    pub fn max_gain(&self) -> f64 {
        self.iter().map(|(_, _, g)| g.norm()).fold(0.0, f64::max)
    }
}

/// Probes the chain with a lone +1 on every slot of each numerology and
/// records what the other numerology's receiver sees.
pub fn coupling_matrix(scenario: &MixedScenario) -> CouplingMatrix {
    let trx = Transceiver::new(scenario);
    let onto_num1 = probe(&trx, NumerologyId::One);
    let onto_num2 = probe(&trx, NumerologyId::Two);
    CouplingMatrix {
        scenario: scenario.clone(),
        onto_num1,
        onto_num2,
    }
}

fn probe(trx: &Transceiver, victim: NumerologyId) -> CouplingBlock {
    let scenario = trx.scenario();
    let source = victim.other();
    let victims = active_slots(scenario, victim);
    let sources = active_slots(scenario, source);
    let offset = scenario.numerology(source).active_bins.start;

    let columns: Vec<Vec<Complex64>> = sources
        .par_iter()
        .map(|slot| {
            let mut grid = SymbolGrid::silent(scenario, source);
            grid.symbol_mut(slot.symbol)[slot.bin - offset] = Complex64::new(1.0, 0.0);
            let silent = SymbolGrid::silent(scenario, victim);
            let (g1, g2) = match source {
                NumerologyId::One => (&grid, &silent),
                NumerologyId::Two => (&silent, &grid),
            };
            // shapes come from the scenario itself
            let frame = trx.build_frame(g1, g2).expect("probe grid matches scenario");
            match victim {
                NumerologyId::One => trx.recv_num1(&frame).expect("frame length"),
                NumerologyId::Two => trx
                    .recv_num2(&frame)
                    .expect("frame length")
                    .rows()
                    .concat(),
            }
        })
        .collect();

    CouplingBlock {
        victims,
        sources,
        gains: columns.concat(),
    }
}

/// Expected |e|² per victim bin for independent, zero-mean, unit-power
/// sources: the sum of squared gains. Numerology-2 bins are averaged over
/// their `2^k` symbol positions.
pub fn expected_ini(matrix: &CouplingMatrix, scenario: &MixedScenario) -> Result<IniReport> {
    if !matrix.scenario.same_layout(scenario) {
        return Err(Error::ScenarioMismatch);
    }
    let width1 = scenario.num1().num_active();
    let width2 = scenario.num2().num_active();
    let mut num1_power = vec![0.0; width1];
    let mut num2_power = vec![0.0; width2 * scenario.scale()];

    let start1 = scenario.num1().active_bins.start;
    for (v, p) in matrix.onto_num1.victims.iter().zip(matrix.onto_num1.victim_power()) {
        num1_power[v.bin - start1] += p;
    }
    let start2 = scenario.num2().active_bins.start;
    for (v, p) in matrix.onto_num2.victims.iter().zip(matrix.onto_num2.victim_power()) {
        num2_power[v.symbol * width2 + v.bin - start2] += p;
    }
    Ok(IniReport::from_slot_power(scenario, &num1_power, &num2_power, 0))
}
