use selbounds::oracle::oracle_true_values;
use selbounds::simulation::{
    generate_panel_with_latents, run_monte_carlo, CoverageRule, DgpConfig,
};
use selbounds::{AssumptionSet, Error, LatentGroup};

#[test]
fn latent_draws_respect_positive_monotonicity() {
    let cfg = DgpConfig {
        n: 20_000,
        seed: 31,
        ..Default::default()
    };
    let (data, latent) = generate_panel_with_latents(&cfg).unwrap();
    for (u, obs) in latent.iter().zip(data.units()) {
        assert!(!u.s1_untreated || u.s1_treated);
        assert!(!matches!(u.group, LatentGroup::NON | LatentGroup::OON));
        assert_eq!(obs.d, u.d);
        assert_eq!(obs.s1, if u.d { u.s1_treated } else { u.s1_untreated });
        assert!((u.y1_treated - u.y1_untreated - cfg.att).abs() < 1e-12);
        assert_eq!(obs.y0.is_some(), u.s0);
    }
}

#[test]
fn sample_always_observed_share_matches_oracle() {
    let cfg = DgpConfig {
        n: 400_000,
        seed: 2,
        ..Default::default()
    };
    let (_, latent) = generate_panel_with_latents(&cfg).unwrap();
    let both: Vec<_> = latent
        .iter()
        .filter(|u| u.d && u.s0 && u.s1_treated)
        .collect();
    let ooo = both.iter().filter(|u| u.group == LatentGroup::OOO).count();
    let share = ooo as f64 / both.len() as f64;
    let o = oracle_true_values(&cfg, 2_000_000, 3).unwrap();
    // Binomial sd at ~97k treated units is about 0.0015.
    assert!((share - o.p_true).abs() < 0.006, "{share} vs {}", o.p_true);
}

#[test]
fn oracle_two_routes_agree() {
    let o = oracle_true_values(&DgpConfig::default(), 2_000_000, 11).unwrap();
    let se = (o.se_mc.powi(2) + o.se_check.powi(2)).sqrt();
    assert!((o.p_true - o.p_check).abs() < 4.0 * se, "{o:?}");
    assert!(o.lb_true < o.ub_true);
    assert!(o.mc_draws == 2_000_000);
    // Δu is symmetric given z1 > 0, z2 > 0 because z1 and z2 load on it with opposite signs.
    assert!(o.mu3.abs() < 0.01);
}

#[test]
fn oracle_is_deterministic_and_validates() {
    let cfg = DgpConfig::default();
    let a = oracle_true_values(&cfg, 200_000, 1).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| oracle_true_values(&cfg, 200_000, 1).unwrap());
    assert_eq!(a, b);
    assert!(matches!(
        oracle_true_values(&cfg, 99_999, 1),
        Err(Error::InvalidConfig(_))
    ));
    let json = serde_json::to_value(&a).unwrap();
    for k in [
        "p_true", "lb_true", "ub_true", "mu1", "mu2", "mu3", "mc_draws", "se",
    ] {
        assert!(json.get(k).is_some(), "{k}");
    }
    assert!(json.get("p_check").is_none());
}

#[test]
fn monte_carlo_rows_and_replicates() {
    let cfg = DgpConfig {
        n: 300,
        seed: 5,
        ..Default::default()
    };
    let sets = [
        AssumptionSet::positive(),
        AssumptionSet::without_monotonicity(),
    ];
    let out = run_monte_carlo(&cfg, 20, &sets, CoverageRule::Att(4.0)).unwrap();
    assert_eq!(out.rows.len(), 2);
    assert_eq!(out.rows[0].assumption_set, "mono-pos");
    assert_eq!(out.rows[1].assumption_set, "nomono");
    assert!(out.rows.iter().all(|r| r.reps == 20 && r.n == 300));
    let again = run_monte_carlo(&cfg, 20, &sets, CoverageRule::Att(4.0)).unwrap();
    assert_eq!(out.replicates.len(), again.replicates.len());
    assert_eq!(out.rows[0].mean_lb, again.rows[0].mean_lb);
    // A degenerate true interval is the same rule as covering the point.
    let point = run_monte_carlo(
        &cfg,
        20,
        &sets,
        CoverageRule::TrueInterval { lb: 4.0, ub: 4.0 },
    )
    .unwrap();
    assert_eq!(point.rows[0].coverage, out.rows[0].coverage);
    assert_eq!(point.rows[1].coverage, out.rows[1].coverage);
    assert!(run_monte_carlo(&cfg, 0, &sets, CoverageRule::Att(4.0)).is_err());
}
