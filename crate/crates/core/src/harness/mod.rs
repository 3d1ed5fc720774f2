//! Scenario runner: refinement ladders, error tables, energy traces and
//! run records.

mod config;
mod rates;

pub use config::{
    BoundaryDataChoice, CustomScenario, DtRule, FluxChoice, InitialData, RunConfig, Scenario,
};
pub use rates::{fit_rate, fit_rates, ConvergenceReport, LadderEntry};

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic::{
    AnnulusSpec, ExactSolution, PointSource, ScholteSpec, SnellSpec, StandingWaveSpec,
};
use crate::error::{Error, Result};
use crate::inversion::{
    write_inversion_outputs, InversionKind, InversionProblem, InversionSettings, MinimizeResult,
};
use crate::mesh::{
    build_annulus_coupled, build_cartesian_coupled, build_sinusoidal_interface, BoundaryTag,
    BoxBoundary, CoupledSetup, Material, Mesh, Rect,
};
use crate::solver::{BoundaryData, Degrees, FieldErrors, Solver};
use crate::timestep::{integrate, select_dt, TimeStepRule};

pub const VERSION: &str = concat!("aedg ", env!("CARGO_PKG_VERSION"));

/// Energy growth factor that aborts a dissipative run.
pub const BLOWUP_FACTOR: f64 = 10.0;

/// Mesh, exact solution and time grid of one ladder entry.
pub struct ScenarioSetup {
    pub mesh: Mesh<f64>,
    pub exact: Option<Arc<dyn ExactSolution<f64>>>,
    pub source: Option<PointSource<f64>>,
    pub final_time: f64,
    pub rule: TimeStepRule,
    pub dt: f64,
}

fn exact_solution(s: Scenario) -> Option<Arc<dyn ExactSolution<f64>>> {
    match s {
        Scenario::StandingWave => Some(Arc::new(StandingWaveSpec::reference())),
        Scenario::Snell => Some(Arc::new(SnellSpec::reference())),
        Scenario::SnellContrast => Some(Arc::new(SnellSpec::water_aluminum())),
        Scenario::Scholte => Some(Arc::new(ScholteSpec::reference())),
        Scenario::Annulus => Some(Arc::new(AnnulusSpec::reference())),
        _ => None,
    }
}

pub fn default_final_time(s: Scenario) -> Option<f64> {
    match s {
        Scenario::StandingWave => Some(2.0 * 2f64.sqrt()),
        Scenario::Snell | Scenario::SnellContrast | Scenario::Scholte => Some(2.0),
        Scenario::Annulus => Some(1.0),
        _ => None,
    }
}

/// Default rate window: ten finest entries, five on the annulus.
pub fn default_window(s: Scenario) -> usize {
    if s == Scenario::Annulus {
        5
    } else {
        10
    }
}

/// Step divisor keeping the time error below the spatial error at high order.
/// Extra step reduction for the water/aluminum case.
pub const CONTRAST_REFINE: f64 = 2.5;

pub fn default_dt_refine(q: usize) -> f64 {
    match q {
        0..=4 => 1.0,
        5 => 2.0,
        _ => 4.0,
    }
}

fn max_speed(mesh: &Mesh<f64>) -> f64 {
    mesh.elements.iter().map(|e| e.material.max_speed()).fold(0.0, f64::max)
}

pub fn build_setup(cfg: &RunConfig, n: usize) -> Result<ScenarioSetup> {
    cfg.validate()?;
    if cfg.scenario.is_inversion() {
        return Err(Error::Configuration(format!(
            "scenario `{}` runs through `invert`",
            cfg.scenario.name()
        )));
    }
    let exact = exact_solution(cfg.scenario);
    let mut source = None;
    let mesh = match cfg.scenario {
        Scenario::Annulus => {
            let a = AnnulusSpec::<f64>::reference();
            let setup = CoupledSetup {
                fluid: Material::fluid(1.0),
                solid: Material::solid(a.material.rho, a.material.lambda, a.material.mu),
                ..CoupledSetup::default()
            };
            build_annulus_coupled(a.r0, a.r1, a.r2, n, 8 * n, &setup)?
        }
        Scenario::Custom => {
            let c = cfg.custom.as_ref().expect("validated");
            let setup = CoupledSetup {
                fluid: Material::fluid(c.c),
                solid: Material::solid(c.rho, c.lambda, c.mu),
                fluid_boundary: BoxBoundary { left: c.fluid_sides, right: c.fluid_sides, far: c.fluid_far },
                solid_boundary: BoxBoundary { left: c.solid_sides, right: c.solid_sides, far: c.solid_far },
            };
            let rect = |b: [f64; 4]| Rect::new(b[0], b[1], b[2], b[3]);
            if let Some(x) = c.source {
                source = Some(PointSource::new(x, c.source_t0, c.source_w0));
            }
            if c.amplitude == 0.0 {
                build_cartesian_coupled(n, rect(c.fluid_box), rect(c.solid_box), &setup)?
            } else {
                build_sinusoidal_interface(c.n_wave, c.amplitude, rect(c.fluid_box), rect(c.solid_box), n, &setup)?
            }
        }
        _ => {
            let ex = exact.as_ref().expect("built-in scenario");
            let m = ex.solid_material();
            let setup = CoupledSetup {
                fluid: Material::fluid(ex.fluid_speed()),
                solid: Material::solid(m.rho, m.lambda, m.mu),
                fluid_boundary: BoxBoundary::uniform(BoundaryTag::Dirichlet),
                solid_boundary: BoxBoundary::uniform(BoundaryTag::Dirichlet),
            };
            build_cartesian_coupled(
                n,
                Rect::new(0.0, 2.0, 0.0, 2.0),
                Rect::new(0.0, 2.0, -2.0, 0.0),
                &setup,
            )?
        }
    };
    let mesh = if cfg.perturbation > 0.0 {
        mesh.perturb_interior_nodes(cfg.perturbation, cfg.seed)?
    } else {
        mesh
    };
    let final_time = cfg
        .final_time
        .or_else(|| default_final_time(cfg.scenario))
        .expect("validated");
    let rule = time_step_rule(cfg, &mesh)?;
    let refine = cfg.dt_refine.unwrap_or_else(|| {
        match (rule, cfg.scenario) {
            (TimeStepRule::Manual { .. }, _) => 1.0,
            // the interface penalty scales with the solid impedance
            (_, Scenario::SnellContrast) => default_dt_refine(cfg.q).max(CONTRAST_REFINE),
            _ => default_dt_refine(cfg.q),
        }
    });
    let dt = select_dt(rule)? / refine;
    Ok(ScenarioSetup { mesh, exact, source, final_time, rule, dt })
}

fn time_step_rule(cfg: &RunConfig, mesh: &Mesh<f64>) -> Result<TimeStepRule> {
    let h = mesh.h;
    let q = cfg.q;
    let solid = mesh
        .solid
        .elements
        .first()
        .map(|&e| mesh.elements[e].material)
        .ok_or_else(|| Error::Configuration("mesh has no solid region".into()))?;
    let Material::Solid { rho, lambda, mu } = solid else {
        return Err(Error::Configuration("solid region carries a fluid material".into()));
    };
    let default = match cfg.scenario {
        Scenario::Snell | Scenario::SnellContrast => DtRule::Contrast,
        _ => DtRule::StandingWave,
    };
    Ok(match cfg.dt_rule.unwrap_or(default) {
        DtRule::StandingWave => {
            // the rule is tuned for speeds up to sqrt(3)
            let scale = (max_speed(mesh) / 3f64.sqrt()).max(1.0);
            TimeStepRule::StandingWave { h: h / scale, q }
        }
        DtRule::Contrast => TimeStepRule::Contrast { h, q, c_m: max_speed(mesh), rho_s: rho },
        DtRule::InversionMaterial => TimeStepRule::InversionMaterial { h, q, mu, lambda },
        DtRule::Manual => TimeStepRule::Manual { dt: cfg.dt.expect("validated") },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergySample {
    pub step: usize,
    pub t: f64,
    pub acoustic: f64,
    pub elastic: f64,
    pub total: f64,
}

/// Result of one forward run.
pub struct RunOutcome {
    pub entry: LadderEntry,
    pub energy: Vec<EnergySample>,
    pub state: Vec<f64>,
    pub solver: Solver<f64>,
    pub setup_dt: f64,
}

pub fn build_solver(cfg: &RunConfig, setup: &ScenarioSetup) -> Result<Solver<f64>> {
    let degrees = Degrees::standard(cfg.q)?;
    let data = match (cfg.boundary_data, &setup.exact) {
        (BoundaryDataChoice::Exact, Some(ex)) => BoundaryData::Exact(ex.clone()),
        (BoundaryDataChoice::Exact, None) => {
            return Err(Error::Configuration("exact boundary data needs an exact solution".into()))
        }
        (BoundaryDataChoice::Zero, _) => BoundaryData::Zero,
    };
    let mut solver = Solver::new(setup.mesh.clone(), degrees, cfg.flux_params(), data)?;
    if let Some(src) = setup.source {
        solver.add_source(src)?;
    }
    Ok(solver)
}

pub fn initial_state(cfg: &RunConfig, setup: &ScenarioSetup, solver: &Solver<f64>) -> Result<Vec<f64>> {
    Ok(match (cfg.initial, &setup.exact) {
        (InitialData::Exact, Some(ex)) => solver.project(ex.as_ref(), 0.0)?.data,
        (InitialData::Exact, None) => {
            return Err(Error::Configuration("exact initial data needs an exact solution".into()))
        }
        (InitialData::Zero, _) => solver.zero_state().data,
        (InitialData::Random, _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..solver.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    })
}

/// Runs one ladder entry to the final time.
pub fn run_single(cfg: &RunConfig, n: usize) -> Result<RunOutcome> {
    let clock = Instant::now();
    let setup = build_setup(cfg, n)?;
    let solver = build_solver(cfg, &setup)?;
    let mut y = initial_state(cfg, &setup, &solver)?;
    let dissipative = cfg.is_dissipative();
    let every = cfg.energy_every;
    let check_every = if every == 0 { 10 } else { every };
    let e0 = solver.energies(&y).total;
    let mut energy = Vec::new();
    let mut last_step = 0;
    let final_time = setup.final_time;
    let used = integrate(&solver, &mut y, 0.0, final_time, setup.dt, |step, t, y| {
        last_step = step;
        let at_end = (t - final_time).abs() <= 1e-12 * final_time.max(1.0);
        if step % check_every == 0 || at_end {
            let e = solver.energies(y);
            if every > 0 && (step % every == 0 || at_end) {
                energy.push(EnergySample { step, t, acoustic: e.acoustic, elastic: e.elastic, total: e.total });
            }
            if dissipative && e0 > 0.0 && e.total > BLOWUP_FACTOR * e0 {
                return Err(Error::Integration {
                    time: t,
                    reason: format!(
                        "energy {:.3e} exceeds {BLOWUP_FACTOR} times the initial {e0:.3e} under dissipative fluxes",
                        e.total
                    ),
                });
            }
        }
        Ok(())
    })?;
    let errors = match &setup.exact {
        Some(ex) if cfg.initial == InitialData::Exact => solver.l2_errors(&y, ex.as_ref(), final_time)?,
        _ => FieldErrors { psi: f64::NAN, p: f64::NAN, u: f64::NAN, v: f64::NAN },
    };
    let entry = LadderEntry {
        n,
        h: setup.mesh.h,
        dt: used,
        steps: last_step,
        errors,
        seconds: clock.elapsed().as_secs_f64(),
    };
    log::info!(
        "{} q={} N={n}: errors {:?} in {:.1}s",
        cfg.scenario.name(),
        cfg.q,
        errors.as_array(),
        entry.seconds
    );
    Ok(RunOutcome { entry, energy, state: y, solver, setup_dt: setup.dt })
}

/// Runs every ladder entry and fits rates over the configured window.
pub fn run_ladder(cfg: &RunConfig) -> Result<ConvergenceReport> {
    let mut quiet = cfg.clone();
    quiet.energy_every = 0;
    let entries = cfg
        .ladder
        .iter()
        .map(|&n| run_single(&quiet, n).map(|o| o.entry))
        .collect::<Result<Vec<_>>>()?;
    let window = cfg.window.unwrap_or_else(|| default_window(cfg.scenario)).min(entries.len());
    let rates = fit_rates(&entries, window);
    Ok(ConvergenceReport { entries, rates, window })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyAudit {
    pub initial: f64,
    /// `max |E(t) - E(0)| / E(0)`
    pub max_drift: f64,
    /// Steps with `E(t_{n+1}) > E(t_n) + tol E(0)`.
    pub violations: usize,
    /// Largest single-step increase relative to `E(0)`.
    pub max_increase: f64,
    pub tolerance: f64,
    pub trace: Vec<EnergySample>,
}

/// Runs entry `n` recording the energy after every step.
pub fn energy_audit(cfg: &RunConfig, n: usize, tolerance: f64) -> Result<EnergyAudit> {
    let mut c = cfg.clone();
    c.energy_every = 1;
    let out = run_single(&c, n)?;
    Ok(audit_trace(out.energy, tolerance))
}

pub fn audit_trace(trace: Vec<EnergySample>, tolerance: f64) -> EnergyAudit {
    let e0 = trace.first().map_or(0.0, |s| s.total);
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let max_drift = trace.iter().map(|s| (s.total - e0).abs() / scale).fold(0.0, f64::max);
    let mut violations = 0;
    let mut max_increase = f64::NEG_INFINITY;
    for w in trace.windows(2) {
        let inc = (w[1].total - w[0].total) / scale;
        max_increase = max_increase.max(inc);
        if inc > tolerance {
            violations += 1;
        }
    }
    EnergyAudit { initial: e0, max_drift, violations, max_increase, tolerance, trace }
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'a str,
    command: &'a str,
    dt: Option<f64>,
    degrees: Degrees,
    flux: FluxRecord,
    config: &'a RunConfig,
}

#[derive(Serialize)]
struct FluxRecord {
    tau: f64,
    alpha: f64,
    beta: f64,
    gamma_fluid: f64,
    gamma_solid: f64,
}

pub fn write_metadata(dir: &Path, command: &str, cfg: &RunConfig, dt: Option<f64>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let meta = Metadata {
        version: VERSION,
        command,
        dt,
        degrees: Degrees::standard(cfg.q)?,
        flux: {
            let f = cfg.flux_params();
            FluxRecord { tau: f.tau, alpha: f.alpha, beta: f.beta, gamma_fluid: f.gamma_fluid, gamma_solid: f.gamma_solid }
        },
        config: cfg,
    };
    let text = toml::to_string(&meta).map_err(|e| Error::Configuration(e.to_string()))?;
    std::fs::write(dir.join("metadata.toml"), text)?;
    Ok(())
}

pub fn write_errors(dir: &Path, entries: &[LadderEntry]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("errors.csv"))?);
    writeln!(f, "N,h,dt,steps,psi,p,u,v")?;
    for e in entries {
        let [a, b, c, d] = e.errors.as_array();
        writeln!(f, "{},{:.17e},{:.17e},{},{a:.17e},{b:.17e},{c:.17e},{d:.17e}", e.n, e.h, e.dt, e.steps)?;
    }
    f.flush()?;
    Ok(())
}

pub fn write_rates(dir: &Path, report: &ConvergenceReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("rates.csv"))?);
    writeln!(f, "field,rate,window")?;
    for (name, r) in ["psi", "p", "u", "v"].iter().zip(report.rates) {
        writeln!(f, "{name},{r:.6},{}", report.window)?;
    }
    f.flush()?;
    Ok(())
}

pub fn write_energy(dir: &Path, trace: &[EnergySample]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("energy.csv"))?);
    writeln!(f, "t,E_a,E_e,E_total")?;
    for s in trace {
        writeln!(f, "{:.17e},{:.17e},{:.17e},{:.17e}", s.t, s.acoustic, s.elastic, s.total)?;
    }
    f.flush()?;
    Ok(())
}

/// `run`: the finest ladder entry with energy trace and optional snapshot.
pub fn run_scenario(cfg: &RunConfig) -> Result<RunOutcome> {
    let n = *cfg.ladder.last().expect("validated");
    let out = run_single(cfg, n)?;
    let dir = &cfg.output;
    write_metadata(dir, "run", cfg, Some(out.entry.dt))?;
    write_errors(dir, std::slice::from_ref(&out.entry))?;
    if cfg.energy_every > 0 {
        write_energy(dir, &out.energy)?;
    }
    if cfg.snapshot_samples > 0 {
        let f = std::fs::File::create(dir.join("snapshot.csv"))?;
        out.solver.write_snapshot(&out.state, cfg.snapshot_samples, std::io::BufWriter::new(f))?;
    }
    Ok(out)
}

/// `converge`: the whole ladder with errors and rates.
pub fn converge(cfg: &RunConfig) -> Result<ConvergenceReport> {
    let report = run_ladder(cfg)?;
    let dir = &cfg.output;
    write_metadata(dir, "converge", cfg, None)?;
    write_errors(dir, &report.entries)?;
    write_rates(dir, &report)?;
    Ok(report)
}

/// `energy-audit`: per-step energy of the finest ladder entry.
pub fn energy_audit_scenario(cfg: &RunConfig, tolerance: f64) -> Result<EnergyAudit> {
    let n = *cfg.ladder.last().expect("validated");
    let audit = energy_audit(cfg, n, tolerance)?;
    let dir = &cfg.output;
    write_metadata(dir, "energy-audit", cfg, None)?;
    write_energy(dir, &audit.trace)?;
    let mut f = std::fs::File::create(dir.join("audit.csv"))?;
    writeln!(f, "initial,max_drift,violations,max_increase,tolerance")?;
    writeln!(
        f,
        "{:.17e},{:.17e},{},{:.17e},{:.3e}",
        audit.initial, audit.max_drift, audit.violations, audit.max_increase, audit.tolerance
    )?;
    Ok(audit)
}

pub fn inversion_settings(cfg: &RunConfig) -> Result<(InversionKind, InversionSettings)> {
    let kind = match cfg.scenario {
        Scenario::InversionInterface => InversionKind::Interface,
        Scenario::InversionMaterial => InversionKind::Material,
        s => {
            return Err(Error::Configuration(format!("scenario `{}` is not an inversion", s.name())))
        }
    };
    let settings = cfg.inversion.clone().unwrap_or_else(|| match kind {
        InversionKind::Interface => InversionSettings::default(),
        InversionKind::Material => InversionSettings::material_defaults(),
    });
    Ok((kind, settings))
}

/// `invert`: synthetic data at the true parameters, then recovery.
pub fn run_inversion(cfg: &RunConfig) -> Result<MinimizeResult> {
    let (kind, settings) = inversion_settings(cfg)?;
    let problem = InversionProblem::new(kind, settings)?;
    let result = problem.run()?;
    write_metadata(&cfg.output, "invert", cfg, Some(problem.forward.dt()))?;
    write_inversion_outputs(&cfg.output, &result)?;
    Ok(result)
}

/// Runs `f` on a pool with the configured thread count.
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Configuration(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
