//! Partial identification of treatment effects in difference-in-differences
//! designs where outcomes are only observed for selected units.
//!
//! Units are classified by potential selection in both periods and under both
//! treatment states. Bounds on the effect for a latent group come from
//! trimming the observed outcome distribution of the treated arm by the
//! estimated share of that group, then differencing against the control arm.
//!
//! ```
//! use selbounds::{bounds_tau_ooo, AssumptionSet, MonotonicityDirection, Panel, PanelRecord};
//!
//! let rec = |id: &str, d, y0, y1| PanelRecord {
//!     id: id.to_string(),
//!     d,
//!     s0: true,
//!     s1: true,
//!     y0: Some(y0),
//!     y1: Some(y1),
//! };
//! let data = Panel::new(vec![
//!     rec("a", true, 1.0, 4.0),
//!     rec("b", true, 2.0, 6.0),
//!     rec("c", false, 1.0, 2.0),
//!     rec("d", false, 2.0, 3.0),
//! ])
//! .unwrap();
//! let r = bounds_tau_ooo(&data, &AssumptionSet::monotone(MonotonicityDirection::Positive)).unwrap();
//! assert_eq!((r.lb, r.ub), (2.5, 2.5));
//! ```

pub mod bounds;
pub mod data;
pub mod error;
pub mod estimators;
pub mod extensions;
pub mod inference;
pub mod oracle;
pub mod scalar;
pub mod simulation;

pub use bounds::{
    bounds_tau_nno, bounds_tau_noo, bounds_tau_ono, bounds_tau_ooo, estimate_bounds, naive_did,
    BoundsResult, MixingProportions, Parameter, SupportMinima, SupportOverrides,
};
pub use data::{
    AssumptionSet, LatentGroup, MeanDominance, MonotonicityDirection, MultiPeriodPanel,
    MultiRecord, PanelDataset, PanelRecord, RcsDataset, RcsRecord, SelectionAssumption, Warning,
    WarningCode,
};
pub use error::{Error, ErrorKind, Result};
pub use extensions::{
    bounds_staggered, bounds_tau_oo_rcs, naive_did_rcs, RcsVariant, StaggeredTarget,
};
pub use scalar::Scalar;

pub type Panel = PanelDataset<f64>;
pub type Rcs = RcsDataset<f64>;
pub type MultiPanel = MultiPeriodPanel<f64>;
pub type Bounds = BoundsResult<f64>;
