//! Population values of the simulation design by Monte Carlo integration.
//!
//! With `z1 = b + v0`, `z2 = z3 = b + v1`, `z4 = a + w` and `Δu = u1 − u0`,
//! the always-observed share among treated units observed in both periods is
//!
//! ```text
//! p = P[z1>0, z2>0, z3>−s, z4>0] / (P[z1>0, z2>0, z3>−s, z4>0] + P[z1>0, z2<0, z3>−s, z4>0])
//! ```
//!
//! The treated outcome change `w = intercept + att + Δu` among units with
//! `z1 > 0, z3 > −s` is approximated by a normal with the matching first two
//! moments, and the true bounds are its truncated means at the `p` and
//! `1 − p` quantiles minus the control change `intercept + E[Δu | z1>0, z2>0]`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inference::{normal_pdf, normal_quantile, replicate_rng};
use crate::simulation::DgpConfig;

pub const MIN_DRAWS: u64 = 100_000;
/// Antithetic pairs per parallel chunk; fixed so results do not depend on the
/// thread count.
const CHUNK_PAIRS: u64 = 1 << 16;
/// Stream offset separating the cross-check draws from the main draws.
const CHECK_STREAM: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub p_true: f64,
    pub lb_true: f64,
    pub ub_true: f64,
    /// E[Δu | z1 > 0, z3 > −s].
    pub mu1: f64,
    /// E[Δu² | z1 > 0, z3 > −s].
    pub mu2: f64,
    /// E[Δu | z1 > 0, z2 > 0].
    pub mu3: f64,
    pub mc_draws: u64,
    /// Monte Carlo standard error of `p_true`.
    #[serde(rename = "se")]
    pub se_mc: f64,
    /// `p` recomputed as P[z2 > 0 | z1 > 0, z3 > −s] from independent draws.
    #[serde(skip)]
    pub p_check: f64,
    #[serde(skip)]
    pub se_check: f64,
    /// Population value of the naive difference-in-differences.
    #[serde(skip)]
    pub naive_did_true: f64,
}

/// Lower-triangular `L` with `L Lᵀ = a` for a positive semidefinite `a`;
/// columns with a vanishing pivot are set to zero.
pub fn semidefinite_cholesky<const K: usize>(a: &[[f64; K]; K]) -> Result<[[f64; K]; K]> {
    let mut l = [[0.0; K]; K];
    for j in 0..K {
        let d = a[j][j] - (0..j).map(|m| l[j][m] * l[j][m]).sum::<f64>();
        let tol = 1e-12 * a[j][j].abs().max(1.0);
        if d < -tol {
            return Err(Error::InvalidConfig(
                "covariance matrix is not positive semidefinite".into(),
            ));
        }
        if d <= tol {
            continue;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..K {
            let s = a[i][j] - (0..j).map(|m| l[i][m] * l[j][m]).sum::<f64>();
            l[i][j] = s / l[j][j];
        }
    }
    Ok(l)
}

fn apply<const K: usize>(l: &[[f64; K]; K], e: &[f64; K]) -> [f64; K] {
    let mut x = [0.0; K];
    for i in 0..K {
        x[i] = (0..=i).map(|m| l[i][m] * e[m]).sum();
    }
    x
}

/// Covariance of (Δu, z1, z2, z3, z4).
pub fn joint_covariance(cfg: &DgpConfig) -> [[f64; 5]; 5] {
    let r = cfg.rho_uv;
    [
        [2.0, -r, r, r, 0.0],
        [-r, 2.0, 1.0, 1.0, 0.0],
        [r, 1.0, 2.0, 2.0, 0.0],
        [r, 1.0, 2.0, 2.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 2.0],
    ]
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    pairs: f64,
    // Orthant counts per antithetic pair, with second moments for the SE.
    a: f64,
    b: f64,
    aa: f64,
    bb: f64,
    ab: f64,
    // Conditional moments of Δu.
    n1: f64,
    du1: f64,
    du2: f64,
    n3: f64,
    du3: f64,
}

impl Sums {
    fn add(mut self, o: Sums) -> Sums {
        self.pairs += o.pairs;
        self.a += o.a;
        self.b += o.b;
        self.aa += o.aa;
        self.bb += o.bb;
        self.ab += o.ab;
        self.n1 += o.n1;
        self.du1 += o.du1;
        self.du2 += o.du2;
        self.n3 += o.n3;
        self.du3 += o.du3;
        self
    }

    /// Ratio `a / (a + b)` with its delta-method standard error over pairs.
    fn ratio(&self) -> (f64, f64) {
        let m = self.pairs;
        let p = self.a / (self.a + self.b);
        let q = 1.0 - p;
        let mean_r = (q * self.a - p * self.b) / m;
        let mean_r2 = (q * q * self.aa - 2.0 * p * q * self.ab + p * p * self.bb) / m;
        let var_r = (mean_r2 - mean_r * mean_r).max(0.0);
        let mean_total = (self.a + self.b) / m;
        (p, (var_r / m).sqrt() / mean_total)
    }
}

fn chunks(pairs: u64) -> Vec<(u64, u64)> {
    let k = pairs.div_ceil(CHUNK_PAIRS);
    (0..k)
        .map(|i| (i, CHUNK_PAIRS.min(pairs - i * CHUNK_PAIRS)))
        .collect()
}

fn main_chunk(l: &[[f64; 5]; 5], shift: f64, seed: u64, stream: u64, pairs: u64) -> Sums {
    let mut rng = replicate_rng(seed, stream);
    let mut s = Sums::default();
    for _ in 0..pairs {
        let e: [f64; 5] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let x = apply(l, &e);
        let (mut a, mut b) = (0.0, 0.0);
        for sign in [1.0, -1.0] {
            let [du, z1, z2, z3, z4] = x.map(|v| sign * v);
            if z1 > 0.0 && z3 > -shift {
                s.n1 += 1.0;
                s.du1 += du;
                s.du2 += du * du;
                if z4 > 0.0 {
                    if z2 > 0.0 {
                        a += 1.0;
                    } else {
                        b += 1.0;
                    }
                }
            }
            if z1 > 0.0 && z2 > 0.0 {
                s.n3 += 1.0;
                s.du3 += du;
            }
        }
        s.pairs += 1.0;
        s.a += a;
        s.b += b;
        s.aa += a * a;
        s.bb += b * b;
        s.ab += a * b;
    }
    s
}

fn check_chunk(l: &[[f64; 3]; 3], shift: f64, seed: u64, stream: u64, pairs: u64) -> Sums {
    let mut rng = replicate_rng(seed, CHECK_STREAM + stream);
    let mut s = Sums::default();
    for _ in 0..pairs {
        let e: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let x = apply(l, &e);
        let (mut a, mut b) = (0.0, 0.0);
        for sign in [1.0, -1.0] {
            let [z1, z2, z3] = x.map(|v| sign * v);
            if z1 > 0.0 && z3 > -shift {
                if z2 > 0.0 {
                    a += 1.0;
                } else {
                    b += 1.0;
                }
            }
        }
        s.pairs += 1.0;
        s.a += a;
        s.b += b;
        s.aa += a * a;
        s.bb += b * b;
        s.ab += a * b;
    }
    s
}

/// Population mixing share, conditional moments and true bounds for `cfg`
/// using `mc_draws` draws (in antithetic pairs) seeded by `seed`.
pub fn oracle_true_values(cfg: &DgpConfig, mc_draws: u64, seed: u64) -> Result<OracleResult> {
    if mc_draws < MIN_DRAWS {
        return Err(Error::InvalidConfig(format!(
            "oracle needs at least {MIN_DRAWS} draws, got {mc_draws}"
        )));
    }
    if !(cfg.rho_uv > -1.0 && cfg.rho_uv < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "rho_uv must lie in (-1, 1), got {}",
            cfg.rho_uv
        )));
    }
    let shift = cfg.selection_shift;
    let cov = joint_covariance(cfg);
    let l5 = semidefinite_cholesky(&cov)?;
    let sub = [1, 2, 3].map(|i| [1, 2, 3].map(|j| cov[i][j]));
    let l3 = semidefinite_cholesky(&sub)?;

    let pairs = mc_draws / 2;
    let parts = chunks(pairs);
    let main = parts
        .par_iter()
        .map(|&(i, k)| main_chunk(&l5, shift, seed, i, k))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Sums::default(), Sums::add);
    let check = parts
        .par_iter()
        .map(|&(i, k)| check_chunk(&l3, shift, seed, i, k))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Sums::default(), Sums::add);

    let (p, se) = main.ratio();
    let (p_check, se_check) = check.ratio();
    let mu1 = main.du1 / main.n1;
    let mu2 = main.du2 / main.n1;
    let mu3 = main.du3 / main.n3;
    let var_w = mu2 - mu1 * mu1;
    if !(p > 0.0 && p < 1.0) || var_w <= 0.0 {
        return Err(Error::InvalidConfig(
            "design leaves the trimming problem degenerate".into(),
        ));
    }
    let sigma = var_w.sqrt();
    let mean_w = cfg.outcome_intercept + cfg.att + mu1;
    let control = cfg.outcome_intercept + mu3;
    // Truncated-normal tail means at the p and 1 − p quantiles; both tails
    // carry mass p and share the density value φ(Φ⁻¹(p)).
    let half_width = sigma * normal_pdf(normal_quantile(p)) / p;
    Ok(OracleResult {
        p_true: p,
        lb_true: mean_w - half_width - control,
        ub_true: mean_w + half_width - control,
        mu1,
        mu2,
        mu3,
        mc_draws: 2 * pairs,
        se_mc: se,
        p_check,
        se_check,
        naive_did_true: cfg.att + mu1 - mu3,
    })
}
