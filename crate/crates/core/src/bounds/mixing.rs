use std::collections::BTreeMap;

use super::{MixingProportions, ProportionSource, Stratum};
use crate::data::{LatentGroup, MonotonicityDirection, PanelDataset, Warning, WarningCode};
use crate::error::{Cell, Error, Result};
use crate::estimators::{cond_prob_s1, FrechetInterval};
use crate::scalar::{clamp_unit, max_of, min_of, Scalar};

fn empty(d: bool, s0: bool, s1: bool) -> Error {
    Error::EmptyCell(Cell::panel(Some(d as u8), Some(s0 as u8), Some(s1 as u8)))
}

/// `num / den`, or zero when the numerator is zero (the denominator may then
/// be zero as well).
fn share<T: Scalar>(num: T, den: T) -> T {
    if num == T::zero() {
        T::zero()
    } else {
        num / den
    }
}

/// Least-favourable Frechet weights when selection need not be monotone.
///
/// The trim shares are `v / P_d` with `v = max(P0 + P1 - 1, 0)` and
/// `P_d = P̂[S1 = 1 | D = d, S0 = 1]`; the reported intervals run from that
/// point up to `min(P0, P1) / P_d`.
pub fn mixing_no_mono<T: Scalar>(
    data: &PanelDataset<T>,
) -> Result<(MixingProportions<T>, Vec<Warning>)> {
    let p0 = cond_prob_s1(data, false, true)?.value;
    let p1 = cond_prob_s1(data, true, true)?.value;
    let v = max_of(p0 + p1 - T::one(), T::zero());
    let top = min_of(p0, p1);
    let mut warnings = Vec::new();
    if v == T::zero() {
        warnings.push(Warning::new(
            WarningCode::VacuousIdentification,
            "selection rates sum to at most one; the always-observed share is not bounded away from zero",
        ));
    }
    let props = MixingProportions {
        p_ooo1: share(v, p1),
        p_ooo0: share(v, p0),
        p_ooo1_interval: Some(FrechetInterval {
            lo: share(v, p1),
            hi: share(top, p1),
        }),
        p_ooo0_interval: Some(FrechetInterval {
            lo: share(v, p0),
            hi: share(top, p0),
        }),
        p_ono0: None,
        p_nno1: None,
        strata: None,
        source: ProportionSource::Frechet,
    };
    Ok((props, warnings))
}

fn clamp_ratio<T: Scalar>(name: &str, raw: T, warnings: &mut Vec<Warning>) -> T {
    let (v, clamped) = clamp_unit(raw);
    if clamped {
        warnings.push(Warning::new(
            WarningCode::MonotonicityViolatedInSample,
            format!("{name} = {} clamped to {}", raw.as_f64(), v.as_f64()),
        ));
    }
    v
}

/// Point-identified OOO shares under monotone selection.
pub fn mixing_mono<T: Scalar>(
    data: &PanelDataset<T>,
    direction: MonotonicityDirection,
) -> Result<(MixingProportions<T>, Vec<Warning>)> {
    let p0 = cond_prob_s1(data, false, true)?;
    let p1 = cond_prob_s1(data, true, true)?;
    let mut warnings = Vec::new();
    let (p_ooo1, p_ooo0) = match direction {
        MonotonicityDirection::Positive => {
            if p1.numerator_count == 0 {
                return Err(empty(true, true, true));
            }
            let r = clamp_ratio("p_ooo1", p0.value / p1.value, &mut warnings);
            (r, T::one())
        }
        MonotonicityDirection::Negative => {
            if p0.numerator_count == 0 {
                return Err(empty(false, true, true));
            }
            let r = clamp_ratio("p_ooo0", p1.value / p0.value, &mut warnings);
            (T::one(), r)
        }
    };
    let props = MixingProportions {
        p_ooo1,
        p_ooo0,
        p_ooo1_interval: None,
        p_ooo0_interval: None,
        p_ono0: None,
        p_nno1: None,
        strata: None,
        source: ProportionSource::MonotonePts,
    };
    Ok((props, warnings))
}

fn clamp_named<T: Scalar>(name: &str, raw: T, warnings: &mut Vec<Warning>) -> T {
    let (v, clamped) = clamp_unit(raw);
    if clamped {
        warnings.push(Warning::new(
            WarningCode::ProportionClamped,
            format!("{name} = {} clamped to {}", raw.as_f64(), v.as_f64()),
        ));
    }
    v
}

/// Share of ONO among untreated units observed only at baseline:
/// `1 - P̂[S1=0 | S0=1, D=1] / P̂[S1=0 | S0=1, D=0]`, clamped to `[0, 1]`.
pub fn p_ono0<T: Scalar>(data: &PanelDataset<T>, warnings: &mut Vec<Warning>) -> Result<T> {
    let treated = cond_prob_s1(data, true, true)?;
    let control = cond_prob_s1(data, false, true)?;
    if control.numerator_count == control.denominator_count {
        return Err(empty(false, true, false));
    }
    let raw = T::one() - (T::one() - treated.value) / (T::one() - control.value);
    Ok(clamp_named("p_ono0", raw, warnings))
}

/// Share of NNO among treated units observed only in the post period:
/// `1 - P̂[S1=1 | S0=0, D=0] / P̂[S1=1 | S0=0, D=1]`, clamped to `[0, 1]`.
pub fn p_nno1<T: Scalar>(data: &PanelDataset<T>, warnings: &mut Vec<Warning>) -> Result<T> {
    let treated = cond_prob_s1(data, true, false)?;
    let control = cond_prob_s1(data, false, false)?;
    if treated.numerator_count == 0 {
        return Err(empty(true, false, true));
    }
    let raw = T::one() - control.value / treated.value;
    Ok(clamp_named("p_nno1", raw, warnings))
}

/// Shares of the twelve strata identified under positive monotonicity and
/// joint independence of the counterfactual selections, as fractions of the
/// full sample. Difference formulas that go negative in sample are clamped to
/// zero with a warning.
pub fn strata_proportions<T: Scalar>(
    data: &PanelDataset<T>,
) -> Result<(MixingProportions<T>, Vec<Warning>)> {
    let (mono, mut warnings) = mixing_mono(data, MonotonicityDirection::Positive)?;
    let n = T::from_count(data.len());
    let frac = |d: bool, s0: Option<bool>, s1: Option<bool>| {
        T::from_count(data.count(Some(d), s0, s1)) / n
    };
    // A conditional share is only needed when the arm it is scaled onto is
    // non-empty; otherwise the product is zero whatever the share.
    let scaled = |d: bool, s0: bool, s1: bool, weight_arm: bool| -> Result<T> {
        let w = frac(weight_arm, Some(s0), None);
        if w == T::zero() {
            return Ok(w);
        }
        let p = cond_prob_s1(data, d, s0)?.value;
        Ok(if s1 { p } else { T::one() - p } * w)
    };

    let ooo0 = frac(false, Some(true), Some(true));
    let ooo1 = scaled(false, true, true, true)?;
    let onn0 = scaled(true, true, false, false)?;
    let ono0 = frac(false, Some(true), Some(false)) - onn0;
    let ono1 = frac(true, Some(true), Some(true)) - ooo1;
    let onn1 = frac(true, Some(true), Some(false));
    let noo0 = frac(false, Some(false), Some(true));
    let noo1 = scaled(false, false, true, true)?;
    let nnn0 = scaled(true, false, false, false)?;
    let nno0 = frac(false, Some(false), Some(false)) - nnn0;
    let nno1 = frac(true, Some(false), Some(true)) - noo1;
    let nnn1 = frac(true, Some(false), Some(false));

    let raw = [
        (LatentGroup::OOO, false, ooo0),
        (LatentGroup::OOO, true, ooo1),
        (LatentGroup::ONO, false, ono0),
        (LatentGroup::ONO, true, ono1),
        (LatentGroup::ONN, false, onn0),
        (LatentGroup::ONN, true, onn1),
        (LatentGroup::NOO, false, noo0),
        (LatentGroup::NOO, true, noo1),
        (LatentGroup::NNO, false, nno0),
        (LatentGroup::NNO, true, nno1),
        (LatentGroup::NNN, false, nnn0),
        (LatentGroup::NNN, true, nnn1),
    ];
    let mut strata = BTreeMap::new();
    for (group, d, v) in raw {
        let key = Stratum { group, d };
        let v = if v < T::zero() {
            warnings.push(Warning::new(
                WarningCode::NegativeProportionClamped,
                format!("pi_{key} = {} clamped to 0", v.as_f64()),
            ));
            T::zero()
        } else {
            v
        };
        strata.insert(key, v);
    }
    let p_ono0 = p_ono0(data, &mut warnings).ok();
    let p_nno1 = p_nno1(data, &mut warnings).ok();
    let props = MixingProportions {
        p_ono0,
        p_nno1,
        strata: Some(strata),
        source: ProportionSource::Joint,
        ..mono
    };
    Ok((props, warnings))
}
