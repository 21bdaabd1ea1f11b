//! Repeated cross-sections and staggered adoption.

mod rcs;
mod staggered;

use serde::Serialize;

pub use rcs::{bounds_tau_oo_rcs, naive_did_rcs, rcs_weights};
pub use staggered::{bounds_staggered, staggered_panel, StaggeredTarget};

/// How selection in the two periods is linked across arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RcsVariant {
    /// Selection rates of the untreated equal across arms in the post period.
    LevelEquality,
    /// Selection rates move in parallel across arms between periods.
    TrendEquality,
}
