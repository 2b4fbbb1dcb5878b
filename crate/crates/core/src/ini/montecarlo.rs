use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::IniReport;
use crate::error::Result;
use crate::numerology::{MixedScenario, NumerologyId};
use crate::rx::{error_vector, grid_error};
use crate::tx::{map_bpsk, SymbolGrid, Transceiver};

/// Trials per parallel batch. Batches are merged in trial order.
const BATCH: usize = 64;

/// Averages |received − transmitted|² per active subcarrier over
/// `scenario.trials()` random frames.
///
/// Trial `t` draws its bits from ChaCha8 seeded with `scenario.seed()` on
/// stream `t`: numerology-1 bins ascending, then numerology-2 symbol by
/// symbol, bins ascending. Per-trial powers are summed in ascending trial
/// order, so the report does not depend on the thread count.
pub fn run_monte_carlo(scenario: &MixedScenario) -> Result<IniReport> {
    let trx = Transceiver::new(scenario);
    let width1 = scenario.num1().num_active();
    let mut acc = vec![0.0f64; width1 + scenario.scale() * scenario.num2().num_active()];

    let trials = scenario.trials();
    for start in (0..trials).step_by(BATCH) {
        let end = (start + BATCH).min(trials);
        let batch = (start..end)
            .into_par_iter()
            .map(|t| trial_error_power(&trx, t as u64))
            .collect::<Result<Vec<_>>>()?;
        for power in batch {
            acc.iter_mut().zip(&power).for_each(|(a, p)| *a += p);
        }
    }

    let n = trials as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    let (num1_power, num2_power) = acc.split_at(width1);
    Ok(IniReport::from_slot_power(scenario, num1_power, num2_power, trials))
}

fn random_grid(rng: &mut ChaCha8Rng, symbols: usize, width: usize) -> SymbolGrid {
    SymbolGrid::new(
        (0..symbols)
            .map(|_| {
                let bits: Vec<bool> = (0..width).map(|_| rng.random()).collect();
                map_bpsk(&bits)
            })
            .collect(),
    )
}

fn trial_error_power(trx: &Transceiver, trial: u64) -> Result<Vec<f64>> {
    let scenario = trx.scenario();
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed());
    rng.set_stream(trial);

    let grid1 = random_grid(&mut rng, 1, scenario.num1().num_active());
    let grid2 = random_grid(
        &mut rng,
        scenario.symbols_per_frame(NumerologyId::Two),
        scenario.num2().num_active(),
    );
    let frame = trx.build_frame(&grid1, &grid2)?;

    let e1 = error_vector(&trx.recv_num1(&frame)?, grid1.symbol(0))?;
    let e2 = grid_error(&trx.recv_num2(&frame)?, &grid2)?;
    Ok(e1.iter().chain(e2.iter()).map(|e| e.norm_sqr()).collect())
}
