use thiserror::Error;

use crate::numerology::FreqRange;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown numerology: {scs_khz} kHz is not defined in {freq_range}")]
    UnknownNumerology { scs_khz: u32, freq_range: FreqRange },

    #[error("invalid guard: {0}")]
    InvalidGuard(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("coupling matrix was built for a different scenario")]
    ScenarioMismatch,

    #[error("target {target_db} dB unreachable, best worst-case INI {best_db:.3} dB")]
    TargetUnreachable { target_db: f64, best_db: f64 },
}
