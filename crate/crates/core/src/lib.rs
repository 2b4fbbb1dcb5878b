//! Link-level simulation of two coexisting CP-OFDM numerologies.
//!
//! A narrow-spacing numerology (Δf, `N`-point transform) and a wide one
//! (`2^k·Δf`, `N/2^k`-point transform) share one composite frame. The
//! receiver demodulates each with its own transform and everything left over
//! after removing the transmitted symbols is inter-numerology interference.
//!
//! ```
//! use mixed_numerology::{build_scenario, run_monte_carlo, summarize};
//!
//! let scenario = build_scenario(64, 1, 1.0 / 14.0, 0, 50, 1).unwrap();
//! let report = run_monte_carlo(&scenario).unwrap();
//! let summary = summarize(&report, &scenario);
//! let num1 = summary.num1.unwrap();
//! assert!(num1.edge_ini_db > num1.inner_median_db);
//! ```

pub mod cli;
pub mod error;
pub mod ini;
pub mod numerology;
pub mod rx;
pub mod tx;

pub use error::{Error, Result};
pub use ini::{
    coupling_matrix, expected_ini, min_guard_search, run_monte_carlo, summarize, CouplingMatrix,
    IniEntry, IniReport, IniSummary,
};
pub use numerology::{
    build_scenario, catalog, catalog_lookup, guard_split, FreqRange, MixedScenario, Numerology,
    NumerologyEntry, NumerologyId, ScenarioConfig,
};
pub use rx::{error_vector, recv_num1, recv_num2};
pub use tx::{
    add_cp, allocate_bins, build_frame, forward_transform, inverse_transform, map_bpsk, SymbolGrid,
    TimeSignal, Transceiver,
};
