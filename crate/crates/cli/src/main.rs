mod args;

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::json;

use args::{
    AssumptionArgs, BoundsArgs, Ci, Cli, Command, Coverage, DataArg, Design, DgpArgs, Dominance,
    InferenceArgs, NaiveArgs, OracleArgs, Output, Param, RcsArgs, SimulateArgs, StaggeredArgs,
    Variant,
};
use selbounds::bounds::{mixing_no_mono, strata_proportions};
use selbounds::data::{cell_counts, load_multi_csv, load_panel_csv, load_rcs_csv};
use selbounds::inference::{
    bootstrap_ses, ci_imbens_manski, ci_union, BootstrapSpec, ConfidenceInterval, Resample,
};
use selbounds::oracle::oracle_true_values;
use selbounds::simulation::{run_monte_carlo, CoverageRule, DgpConfig};
use selbounds::{
    bounds_staggered, bounds_tau_oo_rcs, estimate_bounds, naive_did, naive_did_rcs, AssumptionSet,
    Bounds, Error, ErrorKind, MeanDominance, Parameter, RcsVariant, StaggeredTarget,
    SupportOverrides, Warning,
};

const SCHEMA: u32 = 1;

type Result<T> = selbounds::Result<T>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let body = json!({
                "code": "usage",
                "message": e.kind().to_string(),
                "context": e.to_string().trim_end(),
            });
            eprintln!("{body}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = json!({
                "code": e.code(),
                "message": e.to_string(),
                "context": e.context(),
            });
            eprintln!("{body}");
            ExitCode::from(match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Estimation => 3,
            })
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Error::InvalidConfig("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    let out = cli.output;
    match cli.command {
        Command::Bounds(a) => bounds(a, out),
        Command::BoundsRcs(a) => bounds_rcs(a, out),
        Command::BoundsStaggered(a) => bounds_stag(a, out),
        Command::Naive(a) => naive(a, out),
        Command::Strata(a) => strata(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Oracle(a) => oracle(a, out),
    }
}

fn assumption_set(a: &AssumptionArgs) -> Result<AssumptionSet> {
    let mut set = AssumptionSet::from_label(&a.assumptions)?;
    if a.joint {
        set = set.with_joint_independence();
    }
    let mut dom = MeanDominance::default();
    for d in &a.dominance {
        match d {
            Dominance::A => dom.a = true,
            Dominance::B => dom.b = true,
            Dominance::C => dom.c = true,
        }
    }
    Ok(set.with_dominance(dom))
}

fn require_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| Error::InvalidConfig(format!("--seed is required for {what}")))
}

/// Bootstrap confidence interval for `lb`/`ub` if one was requested.
fn interval<D: Resample>(
    data: &D,
    res: &Bounds,
    inf: &InferenceArgs,
    bound_fn: impl Fn(&D) -> Result<(f64, f64)> + Sync,
) -> Result<Option<ConfidenceInterval>> {
    if inf.ci == Ci::None {
        return Ok(None);
    }
    let spec = BootstrapSpec::new(inf.boot, require_seed(inf.seed, "the bootstrap")?)?;
    let boot = bootstrap_ses(data, bound_fn, &spec)?;
    let n = data.n_units();
    let scale = if inf.legacy_se_scaling {
        (n as f64).sqrt()
    } else {
        1.0
    };
    let (se_lb, se_ub) = (boot.se_lb / scale, boot.se_ub / scale);
    let ci = match inf.ci {
        Ci::Union => ci_union(res.lb, res.ub, se_lb, se_ub)?,
        Ci::Im => ci_imbens_manski(res.lb, res.ub, se_lb, se_ub, n)?,
        Ci::None => unreachable!(),
    };
    Ok(Some(ci.with_bootstrap(&boot)))
}

#[derive(Serialize)]
struct BoundsOut<'a> {
    schema: u32,
    #[serde(flatten)]
    result: &'a Bounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    ci: Option<ConfidenceInterval>,
    n: usize,
}

fn emit_bounds(
    mut result: Bounds,
    load_warnings: Vec<Warning>,
    ci: Option<ConfidenceInterval>,
    n: usize,
    out: Output,
) -> Result<String> {
    let mut warnings = load_warnings;
    warnings.append(&mut result.warnings);
    result.warnings = warnings;
    match out {
        Output::Json => to_json(&BoundsOut {
            schema: SCHEMA,
            result: &result,
            ci,
            n,
        }),
        Output::Csv => {
            let mut s = String::from(
                "parameter,assumption_set,lb,ub,ci_method,ci_lo,ci_hi,se_lb,se_ub,c_n,n,warnings\n",
            );
            let param = json!(result.parameter);
            let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let (method, lo, hi, sl, su, c) = match &ci {
                Some(ci) => (
                    json!(ci.method).as_str().unwrap_or_default().to_string(),
                    Some(ci.lo),
                    Some(ci.hi),
                    Some(ci.se_lb),
                    Some(ci.se_ub),
                    ci.c_n,
                ),
                None => (String::new(), None, None, None, None, None),
            };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                param.as_str().unwrap_or_default(),
                result.assumptions.label(),
                result.lb,
                result.ub,
                method,
                cell(lo),
                cell(hi),
                cell(sl),
                cell(su),
                cell(c),
                n,
                result.warnings.len()
            );
            Ok(s)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn bounds(a: BoundsArgs, out: Output) -> Result<String> {
    let loaded = load_panel_csv(&a.data)?;
    let set = assumption_set(&a.assumptions)?;
    let param = match a.param {
        Param::Ooo => Parameter::TauOoo,
        Param::Ono => Parameter::TauOno,
        Param::Nno => Parameter::TauNno,
        Param::Noo => Parameter::TauNoo,
    };
    let overrides = SupportOverrides {
        y00_lb: a.y00_lb,
        y01_lb: a.y01_lb,
        y10_lb: a.y10_lb,
    };
    let res = estimate_bounds(&loaded.data, param, &set, &overrides)?;
    let ci = interval(&loaded.data, &res, &a.inference, |d| {
        estimate_bounds(d, param, &set, &overrides).map(|r| (r.lb, r.ub))
    })?;
    emit_bounds(res, loaded.warnings, ci, loaded.data.len(), out)
}

fn rcs_variant(v: Variant) -> RcsVariant {
    match v {
        Variant::Level => RcsVariant::LevelEquality,
        Variant::Trend => RcsVariant::TrendEquality,
    }
}

fn bounds_rcs(a: RcsArgs, out: Output) -> Result<String> {
    let loaded = load_rcs_csv(&a.data)?;
    let set = assumption_set(&a.assumptions)?;
    let variant = rcs_variant(a.rcs_variant);
    let res = bounds_tau_oo_rcs(&loaded.data, variant, &set)?;
    let ci = interval(&loaded.data, &res, &a.inference, |d| {
        bounds_tau_oo_rcs(d, variant, &set).map(|r| (r.lb, r.ub))
    })?;
    emit_bounds(res, loaded.warnings, ci, loaded.data.len(), out)
}

fn bounds_stag(a: StaggeredArgs, out: Output) -> Result<String> {
    let loaded = load_multi_csv(&a.data)?;
    let set = assumption_set(&a.assumptions)?;
    let target = StaggeredTarget::new(a.gamma, a.t)?;
    let res = bounds_staggered(&loaded.data, target, &set)?;
    let ci = interval(&loaded.data, &res, &a.inference, |d| {
        bounds_staggered(d, target, &set).map(|r| (r.lb, r.ub))
    })?;
    emit_bounds(res, loaded.warnings, ci, loaded.data.n_units(), out)
}

fn naive(a: NaiveArgs, out: Output) -> Result<String> {
    let (value, warnings, n) = match a.design {
        Design::Panel => {
            let l = load_panel_csv(&a.data)?;
            (naive_did(&l.data)?, l.warnings, l.data.len())
        }
        Design::Rcs => {
            let l = load_rcs_csv(&a.data)?;
            (naive_did_rcs(&l.data)?, l.warnings, l.data.len())
        }
    };
    match out {
        Output::Json => to_json(&json!({
            "schema": SCHEMA,
            "naive_did": value,
            "n": n,
            "warnings": warnings,
        })),
        Output::Csv => Ok(format!(
            "naive_did,n,warnings\n{value},{n},{}\n",
            warnings.len()
        )),
    }
}

fn strata(a: DataArg, out: Output) -> Result<String> {
    let loaded = load_panel_csv(&a.data)?;
    let counts = cell_counts(&loaded.data);
    let (joint, mut w1) = strata_proportions(&loaded.data)?;
    let (frechet, mut w2) = mixing_no_mono(&loaded.data)?;
    let mut warnings = loaded.warnings;
    warnings.append(&mut w1);
    warnings.append(&mut w2);
    match out {
        Output::Json => to_json(&json!({
            "schema": SCHEMA,
            "n": loaded.data.len(),
            "cell_counts": counts,
            "proportions": joint,
            "frechet": frechet,
            "warnings": warnings,
        })),
        Output::Csv => {
            let mut s = String::from("stratum,share\n");
            for (k, v) in joint.strata.iter().flatten() {
                let _ = writeln!(s, "{k},{v}");
            }
            Ok(s)
        }
    }
}

fn dgp(d: &DgpArgs, n: usize, seed: u64) -> DgpConfig {
    DgpConfig {
        n,
        rho_ca: d.rho_ca,
        rho_uv: d.rho_uv,
        outcome_intercept: d.intercept,
        att: d.att,
        selection_shift: d.shift,
        seed,
    }
}

fn simulate(a: SimulateArgs, out: Output) -> Result<String> {
    let seed = require_seed(a.seed, "simulation")?;
    let cfg = dgp(&a.dgp, a.n, seed);
    let sets = a
        .assumptions
        .iter()
        .map(|l| AssumptionSet::from_label(l))
        .collect::<Result<Vec<_>>>()?;
    let (rule, truth) = match a.coverage {
        Coverage::Att => (CoverageRule::Att(cfg.att), None),
        Coverage::Interval => {
            let o = oracle_true_values(&cfg, a.mc_draws, seed)?;
            (
                CoverageRule::TrueInterval {
                    lb: o.lb_true,
                    ub: o.ub_true,
                },
                Some(o),
            )
        }
    };
    let mc = run_monte_carlo(&cfg, a.reps, &sets, rule)?;
    if let Some(path) = &a.replicates_out {
        let mut s = String::from("rep,assumption_set,lb,ub,naive,p_ooo1\n");
        for r in &mc.replicates {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.rep, r.assumption_set, r.lb, r.ub, r.naive, r.p_ooo1
            );
        }
        std::fs::write(path, s)?;
    }
    match out {
        Output::Json => to_json(&json!({
            "schema": SCHEMA,
            "config": cfg,
            "coverage_rule": rule,
            "oracle": truth,
            "rows": mc.rows,
        })),
        Output::Csv => {
            let mut s = String::from(
                "n,reps,assumption_set,mean_lb,mean_ub,mean_naive,mean_p_ooo1,coverage\n",
            );
            for r in &mc.rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.n,
                    r.reps,
                    r.assumption_set,
                    r.mean_lb,
                    r.mean_ub,
                    r.mean_naive,
                    r.mean_p_ooo1,
                    r.coverage
                );
            }
            Ok(s)
        }
    }
}

fn oracle(a: OracleArgs, out: Output) -> Result<String> {
    let seed = require_seed(a.seed, "the oracle")?;
    let cfg = dgp(&a.dgp, 2, seed);
    let o = oracle_true_values(&cfg, a.mc_draws, seed)?;
    match out {
        Output::Json => {
            let mut v = json!(o);
            v["schema"] = json!(SCHEMA);
            to_json(&v)
        }
        Output::Csv => Ok(format!(
            "p_true,lb_true,ub_true,mu1,mu2,mu3,mc_draws,se\n{},{},{},{},{},{},{},{}\n",
            o.p_true, o.lb_true, o.ub_true, o.mu1, o.mu2, o.mu3, o.mc_draws, o.se_mc
        )),
    }
}
