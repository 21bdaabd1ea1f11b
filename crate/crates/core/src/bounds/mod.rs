//! Mixing proportions and trimming bounds for two-period panels.

mod mixing;
mod panel;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::data::{AssumptionSet, LatentGroup, Warning};
use crate::estimators::FrechetInterval;
use crate::extensions::RcsVariant;
use crate::scalar::Scalar;

pub use mixing::{mixing_mono, mixing_no_mono, p_nno1, p_ono0, strata_proportions};
pub use panel::{
    bounds_tau_nno, bounds_tau_noo, bounds_tau_ono, bounds_tau_ooo, estimate_bounds, naive_did,
};

/// Target subpopulation of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Parameter {
    #[serde(rename = "tau_OOO")]
    TauOoo,
    #[serde(rename = "tau_ONO")]
    TauOno,
    #[serde(rename = "tau_NNO")]
    TauNno,
    #[serde(rename = "tau_NOO")]
    TauNoo,
    #[serde(rename = "tau_OO_rcs")]
    TauOoRcs,
    #[serde(rename = "tau_OOO_staggered")]
    TauOooStaggered,
}

impl Parameter {
    pub fn needs_support_minima(self) -> bool {
        matches!(
            self,
            Parameter::TauOno | Parameter::TauNno | Parameter::TauNoo
        )
    }
}

/// How the mixing proportions were identified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProportionSource {
    #[serde(rename = "frechet")]
    Frechet,
    #[serde(rename = "monotone_ptsa")]
    MonotonePts,
    #[serde(rename = "joint")]
    Joint,
}

/// Share of latent group `group` with treatment `d`, as a key into
/// [`MixingProportions::strata`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Stratum {
    pub group: LatentGroup,
    pub d: bool,
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.group, self.d as u8)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingProportions<T> {
    /// Share of OOO among treated units observed in both periods; the trim
    /// share actually used.
    pub p_ooo1: T,
    /// Share of OOO among control units observed in both periods.
    pub p_ooo0: T,
    /// Identified set for `p_ooo1` when it is only partially identified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ooo1_interval: Option<FrechetInterval<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ooo0_interval: Option<FrechetInterval<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_ono0: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_nno1: Option<T>,
    /// Strata shares of the full sample.
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_strata")]
    pub strata: Option<BTreeMap<Stratum, T>>,
    pub source: ProportionSource,
}

fn ser_strata<T: Serialize, S: Serializer>(
    strata: &Option<BTreeMap<Stratum, T>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match strata {
        Some(m) => s.collect_map(m.iter().map(|(k, v)| (k.to_string(), v))),
        None => s.serialize_none(),
    }
}

impl<T: Scalar> MixingProportions<T> {
    /// π_g0 + π_g1, when strata are available.
    pub fn group_share(&self, group: LatentGroup) -> Option<T> {
        let m = self.strata.as_ref()?;
        let get = |d| m.get(&Stratum { group, d }).copied();
        Some(get(false)? + get(true)?)
    }

    pub fn stratum(&self, group: LatentGroup, d: bool) -> Option<T> {
        self.strata.as_ref()?.get(&Stratum { group, d }).copied()
    }
}

/// Lower ends of the outcome support used by the other-group bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportMinima<T> {
    /// Untreated, pre-period.
    pub y00_lb: T,
    /// Untreated, post-period.
    pub y01_lb: T,
    /// Treated, pre-period.
    pub y10_lb: T,
}

/// Known support bounds replacing the observed minima.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SupportOverrides<T> {
    pub y00_lb: Option<T>,
    pub y01_lb: Option<T>,
    pub y10_lb: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsResult<T> {
    pub parameter: Parameter,
    pub assumptions: AssumptionSet,
    pub lb: T,
    pub ub: T,
    pub proportions: MixingProportions<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_minima: Option<SupportMinima<T>>,
    pub warnings: Vec<Warning>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<RcsVariant>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u32>,
}
