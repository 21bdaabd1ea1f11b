use std::collections::HashMap;

use serde::Serialize;

use crate::bounds::{bounds_tau_ooo, BoundsResult, Parameter};
use crate::data::{
    AssumptionSet, MultiPeriodPanel, MultiRecord, PanelDataset, PanelRecord, Warning, WarningCode,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Group first treated in `gamma`, evaluated in period `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StaggeredTarget {
    pub gamma: u32,
    pub t: u32,
}

impl StaggeredTarget {
    pub fn new(gamma: u32, t: u32) -> Result<Self> {
        if gamma == 0 {
            return Err(Error::InvalidConfig(
                "gamma must be at least 1 (0 marks never-treated units)".into(),
            ));
        }
        if t < gamma {
            return Err(Error::InvalidConfig(format!(
                "evaluation period {t} precedes first treatment period {gamma}"
            )));
        }
        Ok(StaggeredTarget { gamma, t })
    }
}

/// Two-period panel comparing the `gamma` cohort with never-treated units,
/// using period 0 as baseline and period `t` as follow-up. Units from other
/// cohorts are dropped. A unit without a row in period `t` counts as not
/// selected there.
pub fn staggered_panel<T: Scalar>(
    data: &MultiPeriodPanel<T>,
    target: StaggeredTarget,
) -> Result<(PanelDataset<T>, Vec<Warning>)> {
    let mut by_key: HashMap<(&str, u32), &MultiRecord<T>> = HashMap::new();
    for r in data.rows() {
        by_key.insert((r.id.as_str(), r.t), r);
    }
    let mut units = Vec::new();
    let mut missing = 0usize;
    let mut period_seen = false;
    for id in data.ids() {
        let base = by_key[&(id, 0)];
        if base.gvar != target.gamma && base.gvar != 0 {
            continue;
        }
        let post = by_key.get(&(id, target.t));
        period_seen |= post.is_some();
        if post.is_none() {
            missing += 1;
        }
        units.push(PanelRecord {
            id: id.to_string(),
            d: base.gvar == target.gamma,
            s0: base.s,
            s1: post.is_some_and(|r| r.s),
            y0: base.y,
            y1: post.and_then(|r| r.y),
        });
    }
    if !units.iter().any(|u| u.d) {
        return Err(Error::EmptyGroup(target.gamma));
    }
    if !units.iter().any(|u| !u.d) {
        return Err(Error::EmptyGroup(0));
    }
    if !period_seen {
        return Err(Error::MissingPeriod(target.t));
    }
    let mut warnings = Vec::new();
    if missing > 0 {
        warnings.push(Warning::new(
            WarningCode::MissingPeriodRow,
            format!(
                "{missing} unit(s) have no row in period {}; treated as not selected",
                target.t
            ),
        ));
    }
    Ok((PanelDataset::new(units)?, warnings))
}

/// Always-observed bounds for one cohort and period, computed on the 2×2
/// comparison built by [`staggered_panel`].
pub fn bounds_staggered<T: Scalar>(
    data: &MultiPeriodPanel<T>,
    target: StaggeredTarget,
    assumptions: &AssumptionSet,
) -> Result<BoundsResult<T>> {
    let (panel, mut warnings) = staggered_panel(data, target)?;
    let mut res = bounds_tau_ooo(&panel, assumptions)?;
    warnings.append(&mut res.warnings);
    res.warnings = warnings;
    res.parameter = Parameter::TauOooStaggered;
    res.gamma = Some(target.gamma);
    res.t = Some(target.t);
    Ok(res)
}
