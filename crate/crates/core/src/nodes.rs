//! Node counts of smoothable nodal del Pezzo surfaces.

use crate::error::{LabError, Result};

/// Upper bound `10 - 2 d` on the number of nodes of a degree `d` surface
/// admitting a Kahler-Einstein smoothing. Nonpositive values mean none exist.
pub fn node_bound(degree: u32) -> Result<i32> {
    if !(1..=9).contains(&degree) {
        return Err(LabError::DegreeOutOfRange(degree));
    }
    Ok(10 - 2 * degree as i32)
}
