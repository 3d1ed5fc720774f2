use std::path::PathBuf;

use aedg::harness::{self, FluxChoice, RunConfig, Scenario};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aedg", version, about = "Coupled acoustic-elastic DG solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the finest ladder entry and write errors, energy and snapshot.
    Run(Common),
    /// Run the refinement ladder and fit convergence rates.
    Converge(Common),
    /// Record the energy after every step and report drift.
    EnergyAudit {
        #[command(flatten)]
        common: Common,
        /// Allowed per-step increase relative to the initial energy.
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Recover interface or material parameters from synthetic data.
    Invert(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    /// conserving, upwind, alt0 or alt1.
    #[arg(long)]
    flux: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Comma-separated elements per side, e.g. 4,8,16.
    #[arg(long, value_delimiter = ',')]
    ladder: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match (&self.config, &self.scenario) {
            (Some(path), _) => RunConfig::load(path)?,
            (None, Some(s)) => RunConfig::new(Scenario::parse(s)?),
            (None, None) => bail!("give --config or --scenario"),
        };
        if let (Some(_), Some(s)) = (&self.config, &self.scenario) {
            cfg.scenario = Scenario::parse(s)?;
        }
        if let Some(q) = self.q {
            cfg.q = q;
            if let Some(inv) = cfg.inversion.as_mut() {
                inv.q = q;
            }
        }
        if let Some(f) = &self.flux {
            cfg.flux = FluxChoice::parse(f)?;
        }
        cfg.tau = self.tau.or(cfg.tau);
        cfg.alpha = self.alpha.or(cfg.alpha);
        cfg.beta = self.beta.or(cfg.beta);
        if let Some(l) = &self.ladder {
            cfg.ladder = l.clone();
        }
        if let Some(o) = &self.out {
            cfg.output = o.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.threads = self.threads.or(cfg.threads);
        cfg.validate().context("invalid configuration")?;
        Ok(cfg)
    }
}

fn fmt_errors(e: [f64; 4]) -> String {
    e.map(|x| format!("{x:.4e}")).join("  ")
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(c) => {
            let cfg = c.config()?;
            let out = harness::with_threads(cfg.threads, || harness::run_scenario(&cfg))??;
            println!("N = {}  h = {:.4}  dt = {:.4e}  steps = {}", out.entry.n, out.entry.h, out.entry.dt, out.entry.steps);
            println!("errors (psi, p, u, v): {}", fmt_errors(out.entry.errors.as_array()));
            println!("outputs in {}", cfg.output.display());
        }
        Command::Converge(c) => {
            let cfg = c.config()?;
            let report = harness::with_threads(cfg.threads, || harness::converge(&cfg))??;
            println!("{:>4} {:>10}  {}", "N", "h", "errors (psi, p, u, v)");
            for e in &report.entries {
                println!("{:>4} {:>10.5}  {}", e.n, e.h, fmt_errors(e.errors.as_array()));
            }
            let r = report.rates;
            println!(
                "rates over {} finest: psi {:.2}  p {:.2}  u {:.2}  v {:.2}",
                report.window, r[0], r[1], r[2], r[3]
            );
        }
        Command::EnergyAudit { common, tolerance } => {
            let cfg = common.config()?;
            let audit = harness::with_threads(cfg.threads, || harness::energy_audit_scenario(&cfg, tolerance))??;
            println!("initial energy {:.6e}", audit.initial);
            println!("max relative drift {:.3e}", audit.max_drift);
            println!("steps with growth above {:.1e}: {} (largest {:.3e})", tolerance, audit.violations, audit.max_increase);
        }
        Command::Invert(c) => {
            let cfg = c.config()?;
            if !cfg.scenario.is_inversion() {
                bail!("`invert` needs scenario inversion_interface or inversion_material");
            }
            let res = harness::with_threads(cfg.threads, || harness::run_inversion(&cfg))??;
            let first = res.records.first().map_or(f64::NAN, |r| r.cost);
            println!("cost {:.4e} -> {:.4e} in {} iterations ({:?})", first, res.cost, res.records.len() - 1, res.termination);
            println!("recovered: {:?}", res.theta);
        }
    }
    Ok(())
}
