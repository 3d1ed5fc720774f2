use aedg::harness::*;
use aedg::solver::FieldErrors;
use approx::assert_relative_eq;
use proptest::prelude::*;

fn entry(n: usize, h: f64, e: [f64; 4]) -> LadderEntry {
    LadderEntry {
        n,
        h,
        dt: 0.0,
        steps: 0,
        errors: FieldErrors { psi: e[0], p: e[1], u: e[2], v: e[3] },
        seconds: 0.0,
    }
}

#[test]
fn rate_of_exact_power_law() {
    let h = [0.5, 0.25, 0.125, 0.0625];
    let e: Vec<f64> = h.iter().map(|h: &f64| 3.0 * h.powi(4)).collect();
    assert_relative_eq!(fit_rate(&h, &e).unwrap(), 4.0, epsilon = 1e-12);
}

#[test]
fn paper_style_table_column() {
    // errors built from the reported rates reproduce them
    let rates = [4.07, 3.09, 4.21, 3.31];
    let ns = [4usize, 6, 8, 12, 16, 24, 32];
    let entries: Vec<LadderEntry> = ns
        .iter()
        .map(|&n| {
            let h = 2.0 / n as f64;
            entry(n, h, rates.map(|r| 0.1 * h.powf(r)))
        })
        .collect();
    let fitted = fit_rates(&entries, 10);
    for k in 0..4 {
        assert_relative_eq!(fitted[k], rates[k], epsilon = 1e-10);
    }
}

#[test]
fn fit_excludes_bad_points() {
    let h = [0.5, 0.25, 0.125];
    let e = [0.5f64.powi(3), f64::NAN, 0.125f64.powi(3)];
    assert_relative_eq!(fit_rate(&h, &e).unwrap(), 3.0, epsilon = 1e-12);
    assert!(fit_rate(&[0.5, 0.25], &[1.0, 0.0]).is_err());
}

#[test]
fn window_uses_finest_entries() {
    let mut entries = vec![entry(4, 0.5, [1.0; 4])];
    for (n, h) in [(8, 0.25), (16, 0.125)] {
        entries.push(entry(n, h, [h * h; 4]));
    }
    assert_relative_eq!(fit_rates(&entries, 2)[0], 2.0, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn two_point_rate(p in 0.5f64..8.0, h1 in 0.01f64..1.0, ratio in 1.1f64..4.0) {
        let h2 = h1 / ratio;
        let e1 = 0.3 * h1.powf(p);
        let e2 = 0.3 * h2.powf(p);
        prop_assert!((fit_rate(&[h1, h2], &[e1, e2]).unwrap() - p).abs() < 1e-12);
    }
}

#[test]
fn config_defaults_and_round_trip() {
    let cfg = RunConfig::from_toml("scenario = \"snell\"\nq = 5\nflux = \"alt0\"\n").unwrap();
    assert_eq!(cfg.scenario, Scenario::Snell);
    assert_eq!(cfg.ladder, vec![4, 6, 8, 12, 16, 24, 32]);
    assert_eq!(cfg.flux_params().tau, 0.0);
    let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn config_rejects_bad_input() {
    for text in [
        "scenario = \"snell\"\nbogus = 1\n",
        "scenario = \"nowhere\"\n",
        "scenario = \"snell\"\nq = 0\n",
        "scenario = \"snell\"\nladder = [8, 4]\n",
        "scenario = \"snell\"\nalpha = 0.5\n",
        "scenario = \"snell\"\ndt_rule = \"manual\"\n",
        "scenario = \"custom\"\nfinal_time = 1.0\n",
        "scenario = \"snell\"\n[inversion]\nq = 2\n",
    ] {
        assert!(RunConfig::from_toml(text).is_err(), "accepted: {text}");
    }
}

#[test]
fn scenario_names_parse() {
    assert_eq!(Scenario::parse("standing-wave").unwrap(), Scenario::StandingWave);
    assert_eq!(Scenario::parse("inversion_material").unwrap(), Scenario::InversionMaterial);
    assert!(Scenario::parse("tsunami").is_err());
}

#[test]
fn scenario_defaults() {
    assert_relative_eq!(default_final_time(Scenario::StandingWave).unwrap(), 2.0 * 2f64.sqrt());
    assert_eq!(default_final_time(Scenario::Snell), Some(2.0));
    assert_eq!(default_final_time(Scenario::Scholte), Some(2.0));
    assert_eq!(default_final_time(Scenario::Annulus), Some(1.0));
    assert_eq!(default_window(Scenario::Annulus), 5);
    assert_eq!(default_window(Scenario::Snell), 10);
}

#[test]
fn contrast_step_follows_rule() {
    let mut cfg = RunConfig::new(Scenario::SnellContrast);
    cfg.q = 3;
    let s = build_setup(&cfg, 4).unwrap();
    let rule = 1.4 * 0.5 / (6.42 * 4.5 * 4.5 * 2.7);
    assert_relative_eq!(aedg::timestep::select_dt(s.rule).unwrap(), rule, max_relative = 1e-12);
    assert_relative_eq!(s.dt, rule / CONTRAST_REFINE, max_relative = 1e-12);
}

#[test]
fn standing_wave_short_ladder_converges() {
    let mut cfg = RunConfig::new(Scenario::StandingWave);
    cfg.q = 3;
    cfg.ladder = vec![4, 8];
    let report = run_ladder(&cfg).unwrap();
    assert_eq!(report.window, 2);
    for r in report.rates {
        assert!(r > 2.5, "{:?}", report.rates);
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Scenario::Scholte);
    cfg.q = 2;
    cfg.ladder = vec![2, 3];
    cfg.final_time = Some(0.2);
    cfg.snapshot_samples = 2;
    let mut read = |sub: &str| {
        cfg.output = dir.path().join(sub);
        converge(&cfg).unwrap();
        run_scenario(&cfg).unwrap();
        ["errors.csv", "rates.csv", "energy.csv", "snapshot.csv"]
            .map(|f| std::fs::read(dir.path().join(sub).join(f)).unwrap())
    };
    let a = read("a");
    let b = read("b");
    assert_eq!(a, b);
    let meta = std::fs::read_to_string(dir.path().join("a/metadata.toml")).unwrap();
    assert!(meta.contains("version") && meta.contains("scholte") && meta.contains("dt"));
    let energy = String::from_utf8(a[2].clone()).unwrap();
    assert!(energy.starts_with("t,E_a,E_e,E_total"));
}

#[test]
fn random_data_energy_decays_under_upwind() {
    let mut cfg = RunConfig::new(Scenario::StandingWave);
    cfg.q = 2;
    cfg.initial = InitialData::Random;
    cfg.boundary_data = BoundaryDataChoice::Zero;
    cfg.final_time = Some(0.3);
    let audit = energy_audit(&cfg, 3, 1e-12).unwrap();
    assert_eq!(audit.violations, 0);
    assert!(audit.trace.last().unwrap().total < audit.initial);
}

#[test]
fn audit_counts_increases() {
    let s = |t: f64, e: f64| EnergySample { step: 0, t, acoustic: e, elastic: 0.0, total: e };
    let a = audit_trace(vec![s(0.0, 1.0), s(0.1, 0.9), s(0.2, 0.95), s(0.3, 0.5)], 1e-12);
    assert_eq!(a.violations, 1);
    assert_relative_eq!(a.max_drift, 0.5);
    assert_relative_eq!(a.max_increase, 0.05, epsilon = 1e-14);
}

#[test]
fn blowup_is_reported() {
    // a step far beyond the stability limit
    let mut cfg = RunConfig::new(Scenario::StandingWave);
    cfg.q = 3;
    cfg.dt_rule = Some(DtRule::Manual);
    cfg.dt = Some(0.5);
    cfg.final_time = Some(50.0);
    cfg.initial = InitialData::Random;
    cfg.boundary_data = BoundaryDataChoice::Zero;
    cfg.energy_every = 1;
    let err = run_single(&cfg, 4).err().expect("unstable run must fail");
    assert!(err.to_string().contains("energy") || err.to_string().contains("non-finite"), "{err}");
}

#[test]
fn custom_scenario_runs() {
    let text = r#"
scenario = "custom"
q = 2
ladder = [2]
initial = "zero"
boundary_data = "zero"
final_time = 0.5

[custom]
amplitude = 0.1
n_wave = 1
source = [0.9, 1.1]
"#;
    let cfg = RunConfig::from_toml(text).unwrap();
    let out = run_single(&cfg, 2).unwrap();
    assert!(out.state.iter().any(|v| *v != 0.0));
    assert!(out.entry.errors.psi.is_nan());
}
