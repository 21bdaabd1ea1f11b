//! Bootstrap standard errors and confidence intervals for bound estimates.
//!
//! Standard errors are the bootstrap standard deviations of the bound
//! estimates themselves, i.e. already on the estimator's scale.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::{erfc, erfc_inv};

use crate::data::{MultiPeriodPanel, MultiRecord, PanelDataset, RcsDataset};
use crate::error::{Error, Result};

/// Critical value of the union interval.
pub const Z_UNION: f64 = 1.96;
pub const LEVEL: f64 = 0.95;
/// Largest share of bootstrap replicates allowed to fail.
pub const MAX_FAILED_SHARE: f64 = 0.2;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * p)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Independent random stream for replicate `index` under `seed`.
pub fn replicate_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapSpec {
    pub reps: usize,
    pub seed: u64,
}

impl BootstrapSpec {
    pub const DEFAULT_REPS: usize = 200;

    pub fn new(reps: usize, seed: u64) -> Result<Self> {
        if reps < 2 {
            return Err(Error::InvalidConfig(format!(
                "bootstrap needs at least 2 replicates, got {reps}"
            )));
        }
        Ok(BootstrapSpec { reps, seed })
    }
}

/// Datasets that can be resampled at the unit level.
pub trait Resample: Sized + Sync {
    fn n_units(&self) -> usize;
    fn resample<R: Rng>(&self, rng: &mut R) -> Self;
}

fn draw<R: Rng>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

impl Resample for PanelDataset<f64> {
    fn n_units(&self) -> usize {
        self.len()
    }

    fn resample<R: Rng>(&self, rng: &mut R) -> Self {
        let units = self.units();
        let picked = draw(units.len(), rng)
            .into_iter()
            .map(|i| units[i].clone())
            .collect();
        PanelDataset::new(picked).expect("resampled units stay valid")
    }
}

impl Resample for RcsDataset<f64> {
    fn n_units(&self) -> usize {
        self.len()
    }

    /// Rows are resampled independently. A draw that misses one period
    /// entirely is kept as is, so the bound function fails on it and the
    /// replicate is counted as failed.
    fn resample<R: Rng>(&self, rng: &mut R) -> Self {
        let rows = self.rows();
        let picked = draw(rows.len(), rng)
            .into_iter()
            .map(|i| rows[i].clone())
            .collect();
        RcsDataset::from_rows_unchecked(picked)
    }
}

impl Resample for MultiPeriodPanel<f64> {
    fn n_units(&self) -> usize {
        self.n_units()
    }

    /// Resamples whole units; the k-th drawn copy of unit `id` is renamed
    /// `id#k` so ids stay unique.
    fn resample<R: Rng>(&self, rng: &mut R) -> Self {
        let ids = self.ids();
        let mut rows_of: HashMap<&str, Vec<&MultiRecord<f64>>> = HashMap::new();
        for r in self.rows() {
            rows_of.entry(r.id.as_str()).or_default().push(r);
        }
        let mut rows = Vec::with_capacity(self.rows().len());
        for (k, i) in draw(ids.len(), rng).into_iter().enumerate() {
            for r in &rows_of[ids[i]] {
                rows.push(MultiRecord {
                    id: format!("{}#{k}", r.id),
                    ..(*r).clone()
                });
            }
        }
        MultiPeriodPanel::new(rows).expect("resampled units stay valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapOutput {
    pub se_lb: f64,
    pub se_ub: f64,
    /// `(lb, ub)` of each successful replicate, in replicate order.
    pub replicates: Vec<(f64, f64)>,
    pub reps_used: usize,
    pub failed_reps: usize,
}

fn sample_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1.0)).sqrt()
}

/// Bootstrap standard deviations of the lower and upper bound estimates.
///
/// Replicate `r` draws from its own stream derived from `spec.seed`, so the
/// output does not depend on how replicates are scheduled across threads.
pub fn bootstrap_ses<D, F>(data: &D, bound_fn: F, spec: &BootstrapSpec) -> Result<BootstrapOutput>
where
    D: Resample,
    F: Fn(&D) -> Result<(f64, f64)> + Sync,
{
    BootstrapSpec::new(spec.reps, spec.seed)?;
    bound_fn(data)?;
    let results: Vec<Option<(f64, f64)>> = (0..spec.reps)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(spec.seed, r as u64);
            bound_fn(&data.resample(&mut rng)).ok()
        })
        .collect();
    let replicates: Vec<(f64, f64)> = results.into_iter().flatten().collect();
    let failed = spec.reps - replicates.len();
    if failed as f64 > MAX_FAILED_SHARE * spec.reps as f64 || replicates.len() < 2 {
        return Err(Error::TooManyFailedReps {
            failed,
            reps: spec.reps,
        });
    }
    Ok(BootstrapOutput {
        se_lb: sample_sd(replicates.iter().map(|r| r.0)),
        se_ub: sample_sd(replicates.iter().map(|r| r.1)),
        reps_used: replicates.len(),
        failed_reps: failed,
        replicates,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Union,
    ImbensManski,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub method: CiMethod,
    pub level: f64,
    pub lo: f64,
    pub hi: f64,
    pub se_lb: f64,
    pub se_ub: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_n: Option<f64>,
    pub reps_used: usize,
    pub failed_reps: usize,
}

impl ConfidenceInterval {
    /// Records the bootstrap bookkeeping behind the standard errors.
    pub fn with_bootstrap(mut self, boot: &BootstrapOutput) -> Self {
        self.reps_used = boot.reps_used;
        self.failed_reps = boot.failed_reps;
        self
    }
}

fn check_se(se_lb: f64, se_ub: f64) -> Result<()> {
    if !(se_lb >= 0.0 && se_ub >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "standard errors must be non-negative, got {se_lb} and {se_ub}"
        )));
    }
    Ok(())
}

/// Interval covering the identified set with at least 95% probability.
pub fn ci_union(lb: f64, ub: f64, se_lb: f64, se_ub: f64) -> Result<ConfidenceInterval> {
    check_se(se_lb, se_ub)?;
    Ok(ConfidenceInterval {
        method: CiMethod::Union,
        level: LEVEL,
        lo: lb - Z_UNION * se_lb,
        hi: ub + Z_UNION * se_ub,
        se_lb,
        se_ub,
        c_n: None,
        reps_used: 0,
        failed_reps: 0,
    })
}

/// Solves Φ(c + Δ) − Φ(−c) = 0.95 for c by bisection on [1, 3].
pub fn imbens_manski_cn(delta: f64) -> Result<f64> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "interval width ratio must be non-negative, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(normal_quantile(1.0 - (1.0 - LEVEL) / 2.0));
    }
    if delta.is_infinite() {
        return Ok(normal_quantile(LEVEL));
    }
    let f = |c: f64| normal_cdf(c + delta) - normal_cdf(-c) - LEVEL;
    let (mut lo, mut hi) = (1.0_f64, 3.0_f64);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::RootNotBracketed);
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Interval covering the parameter (not the whole identified set) with 95%
/// probability.
pub fn ci_imbens_manski(
    lb: f64,
    ub: f64,
    se_lb: f64,
    se_ub: f64,
    n: usize,
) -> Result<ConfidenceInterval> {
    check_se(se_lb, se_ub)?;
    if ub < lb {
        return Err(Error::CrossedBounds { lb, ub });
    }
    let root_n = (n as f64).sqrt();
    let scale = (se_lb * root_n).max(se_ub * root_n);
    let delta = if ub == lb {
        0.0
    } else if scale == 0.0 {
        f64::INFINITY
    } else {
        root_n * (ub - lb) / scale
    };
    let c = imbens_manski_cn(delta)?;
    Ok(ConfidenceInterval {
        method: CiMethod::ImbensManski,
        level: LEVEL,
        lo: lb - c * se_lb,
        hi: ub + c * se_ub,
        se_lb,
        se_ub,
        c_n: Some(c),
        reps_used: 0,
        failed_reps: 0,
    })
}
