use super::{
    mixing_mono, mixing_no_mono, p_nno1, p_ono0, BoundsResult, MixingProportions, Parameter,
    SupportMinima, SupportOverrides,
};
use crate::data::{
    AssumptionSet, MonotonicityDirection, PanelDataset, SelectionAssumption, Warning,
};
use crate::error::{Cell, Error, Result};
use crate::estimators::{mean, minimum, trimmed_mean_lower as low, trimmed_mean_upper as up};
use crate::scalar::Scalar;

fn nonempty<T>(values: Vec<T>, d: bool, s0: Option<bool>, s1: Option<bool>) -> Result<Vec<T>> {
    if values.is_empty() {
        Err(Error::EmptyCell(Cell::panel(
            Some(d as u8),
            s0.map(u8::from),
            s1.map(u8::from),
        )))
    } else {
        Ok(values)
    }
}

fn delta_y<T: Scalar>(data: &PanelDataset<T>, d: bool) -> Result<Vec<T>> {
    nonempty(data.delta_y(d), d, Some(true), Some(true))
}

fn vacuous<T: Scalar>(what: &str, share: T) -> Result<()> {
    if share <= T::zero() {
        return Err(Error::VacuousIdentification(format!(
            "trim share {what} is {}",
            share.as_f64()
        )));
    }
    Ok(())
}

/// Difference in mean outcome changes between treated and control units
/// observed in both periods.
pub fn naive_did<T: Scalar>(data: &PanelDataset<T>) -> Result<T> {
    let t = delta_y(data, true)?;
    let c = delta_y(data, false)?;
    Ok(mean(&t) - mean(&c))
}

fn finish<T: Scalar>(
    parameter: Parameter,
    assumptions: AssumptionSet,
    lb: T,
    ub: T,
    proportions: MixingProportions<T>,
    support_minima: Option<SupportMinima<T>>,
    warnings: Vec<Warning>,
) -> Result<BoundsResult<T>> {
    if lb > ub {
        return Err(Error::CrossedBounds {
            lb: lb.as_f64(),
            ub: ub.as_f64(),
        });
    }
    Ok(BoundsResult {
        parameter,
        assumptions,
        lb,
        ub,
        proportions,
        support_minima,
        warnings,
        variant: None,
        gamma: None,
        t: None,
    })
}

/// Bounds on the effect for units observed in both periods regardless of
/// treatment.
///
/// Without monotonicity both arms are trimmed at their least-favourable
/// Frechet shares. Under positive monotonicity only the treated arm is
/// trimmed; under negative monotonicity only the control arm.
pub fn bounds_tau_ooo<T: Scalar>(
    data: &PanelDataset<T>,
    assumptions: &AssumptionSet,
) -> Result<BoundsResult<T>> {
    let (props, warnings) = match assumptions.selection {
        SelectionAssumption::WithoutMonotonicity => mixing_no_mono(data)?,
        SelectionAssumption::WithMonotonicity(dir) => mixing_mono(data, dir)?,
    };
    let treated = delta_y(data, true)?;
    let control = delta_y(data, false)?;
    let (lb, ub) = match assumptions.selection {
        SelectionAssumption::WithoutMonotonicity => {
            vacuous("p_ooo1", props.p_ooo1)?;
            vacuous("p_ooo0", props.p_ooo0)?;
            (
                low(&treated, props.p_ooo1)? - up(&control, props.p_ooo0)?,
                up(&treated, props.p_ooo1)? - low(&control, props.p_ooo0)?,
            )
        }
        SelectionAssumption::WithMonotonicity(MonotonicityDirection::Positive) => {
            vacuous("p_ooo1", props.p_ooo1)?;
            let m = mean(&control);
            (
                low(&treated, props.p_ooo1)? - m,
                up(&treated, props.p_ooo1)? - m,
            )
        }
        SelectionAssumption::WithMonotonicity(MonotonicityDirection::Negative) => {
            vacuous("p_ooo0", props.p_ooo0)?;
            let m = mean(&treated);
            (
                m - up(&control, props.p_ooo0)?,
                m - low(&control, props.p_ooo0)?,
            )
        }
    };
    finish(
        Parameter::TauOoo,
        *assumptions,
        lb,
        ub,
        props,
        None,
        warnings,
    )
}

fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::AssumptionMismatch(what.to_string()))
    }
}

fn support_minima<T: Scalar>(
    data: &PanelDataset<T>,
    overrides: &SupportOverrides<T>,
) -> Result<SupportMinima<T>> {
    let observed = |values: Vec<T>, d: bool, s0, s1| -> Result<T> {
        Ok(minimum(&nonempty(values, d, s0, s1)?))
    };
    Ok(SupportMinima {
        y00_lb: match overrides.y00_lb {
            Some(v) => v,
            None => observed(data.y0(Some(false), None), false, Some(true), None)?,
        },
        y01_lb: match overrides.y01_lb {
            Some(v) => v,
            None => observed(data.y1(Some(false), None), false, None, Some(true))?,
        },
        y10_lb: match overrides.y10_lb {
            Some(v) => v,
            None => observed(data.y0(Some(true), None), true, Some(true), None)?,
        },
    })
}

/// Untreated-arm and treated-arm OOO shares under positive monotonicity.
fn positive_mixing<T: Scalar>(
    data: &PanelDataset<T>,
) -> Result<(MixingProportions<T>, Vec<Warning>)> {
    mixing_mono(data, MonotonicityDirection::Positive)
}

/// Bounds for units observed at baseline and, if treated, afterwards, but
/// lost without treatment. Requires positive monotonicity, joint independence
/// and mean dominance (a).
pub fn bounds_tau_ono<T: Scalar>(
    data: &PanelDataset<T>,
    assumptions: &AssumptionSet,
    overrides: &SupportOverrides<T>,
) -> Result<BoundsResult<T>> {
    require(
        assumptions.is_positive() && assumptions.joint_independence && assumptions.mean_dominance.a,
        "tau_ONO needs positive monotonicity, joint independence and mean dominance (a)",
    )?;
    let (mut props, mut warnings) = positive_mixing(data)?;
    let treated = delta_y(data, true)?;
    let y1_011 = nonempty(
        data.y1(Some(false), Some(true)),
        false,
        Some(true),
        Some(true),
    )?;
    let y0_010 = nonempty(
        data.y0(Some(false), Some(false)),
        false,
        Some(true),
        Some(false),
    )?;
    let p_ono0 = p_ono0(data, &mut warnings)?;
    props.p_ono0 = Some(p_ono0);
    let share = T::one() - props.p_ooo1;
    vacuous("1 - p_ooo1", share)?;
    vacuous("p_ono0", p_ono0)?;
    let sm = support_minima(data, overrides)?;

    let lb = low(&treated, share)? - mean(&y1_011) + low(&y0_010, p_ono0)?;
    let ub = up(&treated, share)? - sm.y01_lb + up(&y0_010, p_ono0)?;
    finish(
        Parameter::TauOno,
        *assumptions,
        lb,
        ub,
        props,
        Some(sm),
        warnings,
    )
}

/// Bounds for units observed only in the post period and only if treated.
/// Requires positive monotonicity, joint independence and mean dominance (b).
pub fn bounds_tau_nno<T: Scalar>(
    data: &PanelDataset<T>,
    assumptions: &AssumptionSet,
    overrides: &SupportOverrides<T>,
) -> Result<BoundsResult<T>> {
    require(
        assumptions.is_positive() && assumptions.joint_independence && assumptions.mean_dominance.b,
        "tau_NNO needs positive monotonicity, joint independence and mean dominance (b)",
    )?;
    let (mut props, mut warnings) = positive_mixing(data)?;
    let y1_101 = nonempty(
        data.y1(Some(true), Some(false)),
        true,
        Some(false),
        Some(true),
    )?;
    let y0_111 = nonempty(
        data.y0(Some(true), Some(true)),
        true,
        Some(true),
        Some(true),
    )?;
    let y1_001 = nonempty(
        data.y1(Some(false), Some(false)),
        false,
        Some(false),
        Some(true),
    )?;
    let y0_010 = nonempty(
        data.y0(Some(false), Some(false)),
        false,
        Some(true),
        Some(false),
    )?;
    let p_nno1 = p_nno1(data, &mut warnings)?;
    let p_ono0 = p_ono0(data, &mut warnings)?;
    props.p_nno1 = Some(p_nno1);
    props.p_ono0 = Some(p_ono0);
    let share = T::one() - props.p_ooo1;
    vacuous("p_nno1", p_nno1)?;
    vacuous("1 - p_ooo1", share)?;
    vacuous("p_ono0", p_ono0)?;
    let sm = support_minima(data, overrides)?;

    let lb = low(&y1_101, p_nno1)? - low(&y0_111, share)? - mean(&y1_001) + sm.y00_lb;
    let ub = up(&y1_101, p_nno1)? - sm.y10_lb - sm.y01_lb + low(&y0_010, p_ono0)?;
    finish(
        Parameter::TauNno,
        *assumptions,
        lb,
        ub,
        props,
        Some(sm),
        warnings,
    )
}

/// Bounds for units observed in the post period whatever their treatment but
/// not at baseline. Requires positive monotonicity and mean dominance (c).
pub fn bounds_tau_noo<T: Scalar>(
    data: &PanelDataset<T>,
    assumptions: &AssumptionSet,
    overrides: &SupportOverrides<T>,
) -> Result<BoundsResult<T>> {
    require(
        assumptions.is_positive() && assumptions.mean_dominance.c,
        "tau_NOO needs positive monotonicity and mean dominance (c)",
    )?;
    let (mut props, mut warnings) = positive_mixing(data)?;
    let y1_101 = nonempty(
        data.y1(Some(true), Some(false)),
        true,
        Some(false),
        Some(true),
    )?;
    let y0_111 = nonempty(
        data.y0(Some(true), Some(true)),
        true,
        Some(true),
        Some(true),
    )?;
    let y1_001 = nonempty(
        data.y1(Some(false), Some(false)),
        false,
        Some(false),
        Some(true),
    )?;
    let y0_011 = nonempty(
        data.y0(Some(false), Some(true)),
        false,
        Some(true),
        Some(true),
    )?;
    let p_nno1 = p_nno1(data, &mut warnings)?;
    props.p_nno1 = Some(p_nno1);
    let share = T::one() - p_nno1;
    vacuous("1 - p_nno1", share)?;
    vacuous("p_ooo1", props.p_ooo1)?;
    let sm = support_minima(data, overrides)?;

    let m001 = mean(&y1_001);
    let lb = low(&y1_101, share)? - low(&y0_111, props.p_ooo1)? - m001 + sm.y00_lb;
    let ub = up(&y1_101, share)? - sm.y10_lb - m001 + mean(&y0_011);
    finish(
        Parameter::TauNoo,
        *assumptions,
        lb,
        ub,
        props,
        Some(sm),
        warnings,
    )
}

/// Dispatches to the panel bound for `parameter`.
pub fn estimate_bounds<T: Scalar>(
    data: &PanelDataset<T>,
    parameter: Parameter,
    assumptions: &AssumptionSet,
    overrides: &SupportOverrides<T>,
) -> Result<BoundsResult<T>> {
    match parameter {
        Parameter::TauOoo => bounds_tau_ooo(data, assumptions),
        Parameter::TauOno => bounds_tau_ono(data, assumptions, overrides),
        Parameter::TauNno => bounds_tau_nno(data, assumptions, overrides),
        Parameter::TauNoo => bounds_tau_noo(data, assumptions, overrides),
        other => Err(Error::InvalidConfig(format!(
            "{other:?} is not a two-period panel parameter"
        ))),
    }
}
