use super::RcsVariant;
use crate::bounds::{BoundsResult, MixingProportions, Parameter, ProportionSource};
use crate::data::{
    AssumptionSet, MonotonicityDirection, RcsDataset, SelectionAssumption, Warning, WarningCode,
};
use crate::error::{Cell, Error, Result};
use crate::estimators::{mean, trimmed_mean_lower as low, trimmed_mean_upper as up};
use crate::scalar::{clamp_unit, max_of, Scalar};

/// P̂[S = 1 | D = d, T = t].
fn sel<T: Scalar>(data: &RcsDataset<T>, d: bool, t: bool) -> Result<T> {
    let den = data.count(d, t, None);
    if den == 0 {
        return Err(Error::EmptyCell(Cell {
            d: Some(d as u8),
            t: Some(t as u8),
            ..Default::default()
        }));
    }
    Ok(T::from_count(data.count(d, t, Some(true))) / T::from_count(den))
}

fn observed<T: Scalar>(data: &RcsDataset<T>, d: bool, t: bool) -> Result<Vec<T>> {
    let v = data.outcomes(d, t);
    if v.is_empty() {
        return Err(Error::EmptyCell(Cell::rcs(d as u8, t as u8, 1)));
    }
    Ok(v)
}

/// Four-mean contrast on selected rows, `(m11 - m10) - (m01 - m00)`.
pub fn naive_did_rcs<T: Scalar>(data: &RcsDataset<T>) -> Result<T> {
    let m11 = mean(&observed(data, true, true)?);
    let m01 = mean(&observed(data, false, true)?);
    // Same association as the bounds so fully observed data collapse exactly.
    Ok(m11 - m01 + pre_period_contrast(data)?)
}

/// `m00 - m10`: the pre-period part of the contrast.
fn pre_period_contrast<T: Scalar>(data: &RcsDataset<T>) -> Result<T> {
    Ok(mean(&observed(data, false, false)?) - mean(&observed(data, true, false)?))
}

fn clamp<T: Scalar>(name: &str, raw: T, warnings: &mut Vec<Warning>) -> T {
    let (v, clamped) = clamp_unit(raw);
    if clamped {
        warnings.push(Warning::new(
            WarningCode::ProportionClamped,
            format!("{name} = {} clamped to {}", raw.as_f64(), v.as_f64()),
        ));
    }
    v
}

/// Post-period always-observed shares. `p_ooo1` carries the treated weight
/// q_OO11 and `p_ooo0` the untreated weight q_OO01.
pub fn rcs_weights<T: Scalar>(
    data: &RcsDataset<T>,
    variant: RcsVariant,
    monotone: bool,
) -> Result<(MixingProportions<T>, Vec<Warning>)> {
    let p01 = sel(data, false, true)?;
    let p11 = sel(data, true, true)?;
    // Pre-period correction (zero under level equality).
    let (p00, p10) = match variant {
        RcsVariant::LevelEquality => (T::zero(), T::zero()),
        RcsVariant::TrendEquality => (sel(data, false, false)?, sel(data, true, false)?),
    };
    let mut warnings = Vec::new();
    let (q11, q01, source) = if monotone {
        if p11 == T::zero() {
            return Err(Error::EmptyCell(Cell::rcs(1, 1, 1)));
        }
        let q11 = clamp("q_oo11", (p01 - p00 + p10) / p11, &mut warnings);
        (q11, T::one(), ProportionSource::MonotonePts)
    } else {
        let one = T::one();
        let v1 = max_of(p01 - p00 + p10 + p11 - one, T::zero());
        let v0 = max_of(p01 + p11 - p10 + p00 - one, T::zero());
        if v1 == T::zero() || v0 == T::zero() {
            warnings.push(Warning::new(
                WarningCode::VacuousIdentification,
                "always-observed share in the post period is not bounded away from zero",
            ));
        }
        let q11 = if v1 == T::zero() { v1 } else { v1 / p11 };
        let q01 = if v0 == T::zero() { v0 } else { v0 / p01 };
        (
            clamp("q_oo11", q11, &mut warnings),
            clamp("q_oo01", q01, &mut warnings),
            ProportionSource::Frechet,
        )
    };
    let props = MixingProportions {
        p_ooo1: q11,
        p_ooo0: q01,
        p_ooo1_interval: None,
        p_ooo0_interval: None,
        p_ono0: None,
        p_nno1: None,
        strata: None,
        source,
    };
    Ok((props, warnings))
}

/// Bounds for units observed in the post period under either treatment.
///
/// Post-period treated outcomes are trimmed at q_OO11; without monotonicity
/// the post-period control outcomes are trimmed at q_OO01 in the opposite
/// direction. Pre-period means enter untrimmed.
pub fn bounds_tau_oo_rcs<T: Scalar>(
    data: &RcsDataset<T>,
    variant: RcsVariant,
    assumptions: &AssumptionSet,
) -> Result<BoundsResult<T>> {
    let monotone = match assumptions.selection {
        SelectionAssumption::WithoutMonotonicity => false,
        SelectionAssumption::WithMonotonicity(MonotonicityDirection::Positive) => true,
        SelectionAssumption::WithMonotonicity(MonotonicityDirection::Negative) => {
            return Err(Error::AssumptionMismatch(
                "repeated cross-section bounds are derived under positive monotonicity only".into(),
            ))
        }
    };
    let (props, warnings) = rcs_weights(data, variant, monotone)?;
    let y11 = observed(data, true, true)?;
    let y01 = observed(data, false, true)?;
    let pre = pre_period_contrast(data)?;
    let vacuous = |name: &str, q: T| -> Result<()> {
        if q <= T::zero() {
            return Err(Error::VacuousIdentification(format!(
                "trim share {name} is {}",
                q.as_f64()
            )));
        }
        Ok(())
    };
    vacuous("q_oo11", props.p_ooo1)?;
    let (lb, ub) = if monotone {
        let m01 = mean(&y01);
        (
            low(&y11, props.p_ooo1)? - m01 + pre,
            up(&y11, props.p_ooo1)? - m01 + pre,
        )
    } else {
        vacuous("q_oo01", props.p_ooo0)?;
        (
            low(&y11, props.p_ooo1)? - up(&y01, props.p_ooo0)? + pre,
            up(&y11, props.p_ooo1)? - low(&y01, props.p_ooo0)? + pre,
        )
    };
    Ok(BoundsResult {
        parameter: Parameter::TauOoRcs,
        assumptions: *assumptions,
        lb,
        ub,
        proportions: props,
        support_minima: None,
        warnings,
        variant: Some(variant),
        gamma: None,
        t: None,
    })
}
