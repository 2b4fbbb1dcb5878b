use super::{coupling_matrix, expected_ini, FLOOR_DB};
use crate::error::{Error, Result};
use crate::numerology::MixedScenario;

/// Highest expected INI over the active bins of both numerologies.
pub fn worst_case_ini_db(scenario: &MixedScenario) -> Result<f64> {
    let report = expected_ini(&coupling_matrix(scenario), scenario)?;
    Ok(report
        .entries()
        .iter()
        .map(|e| e.ini_db)
        .fold(FLOOR_DB, f64::max))
}

/// Smallest guard, scanning upward in steps of the base spacing, whose
/// worst-case expected INI is at or below `ini_target_db`.
///
/// The template supplies everything except the guard. The scan ends where
/// the guard would leave one of the numerologies without an active bin.
pub fn min_guard_search(template: &MixedScenario, ini_target_db: f64) -> Result<u32> {
    let step = template.base_scs_khz();
    let mut best_db = f64::INFINITY;
    for guard_khz in (0..).step_by(step as usize) {
        let scenario = match template.with_guard(guard_khz) {
            Ok(s) => s,
            Err(Error::InvalidScenario(_)) if guard_khz > 0 => break,
            Err(e) => return Err(e),
        };
        let worst = worst_case_ini_db(&scenario)?;
        if worst <= ini_target_db {
            return Ok(guard_khz);
        }
        best_db = best_db.min(worst);
    }
    Err(Error::TargetUnreachable {
        target_db: ini_target_db,
        best_db,
    })
}
