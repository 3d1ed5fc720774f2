use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fluxes::{FluxMode, FluxParams};
use crate::inversion::InversionSettings;
use crate::mesh::BoundaryTag;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    StandingWave,
    Snell,
    SnellContrast,
    Scholte,
    Annulus,
    InversionInterface,
    InversionMaterial,
    Custom,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Self> {
        let name = s.replace('-', "_");
        let de = serde::de::value::StrDeserializer::<serde::de::value::Error>::new(&name);
        Self::deserialize(de).map_err(|_| Error::Configuration(format!("unknown scenario `{s}`")))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::StandingWave => "standing_wave",
            Scenario::Snell => "snell",
            Scenario::SnellContrast => "snell_contrast",
            Scenario::Scholte => "scholte",
            Scenario::Annulus => "annulus",
            Scenario::InversionInterface => "inversion_interface",
            Scenario::InversionMaterial => "inversion_material",
            Scenario::Custom => "custom",
        }
    }

    pub fn is_inversion(&self) -> bool {
        matches!(self, Scenario::InversionInterface | Scenario::InversionMaterial)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxChoice {
    Conserving,
    Upwind,
    Alt0,
    Alt1,
}

impl FluxChoice {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match FluxMode::parse(s)? {
            FluxMode::EnergyConserving => FluxChoice::Conserving,
            FluxMode::Upwind => FluxChoice::Upwind,
            FluxMode::Alternating0 => FluxChoice::Alt0,
            FluxMode::Alternating1 => FluxChoice::Alt1,
        })
    }

    pub fn mode(&self) -> FluxMode {
        match self {
            FluxChoice::Conserving => FluxMode::EnergyConserving,
            FluxChoice::Upwind => FluxMode::Upwind,
            FluxChoice::Alt0 => FluxMode::Alternating0,
            FluxChoice::Alt1 => FluxMode::Alternating1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtRule {
    StandingWave,
    Contrast,
    InversionMaterial,
    Manual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    #[default]
    Exact,
    Random,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryDataChoice {
    #[default]
    Exact,
    Zero,
}

/// Free-form two-box geometry without an exact solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CustomScenario {
    /// `[x0, x1, y0, y1]`
    pub fluid_box: [f64; 4],
    pub solid_box: [f64; 4],
    pub c: f64,
    pub rho: f64,
    pub lambda: f64,
    pub mu: f64,
    pub fluid_sides: BoundaryTag,
    pub fluid_far: BoundaryTag,
    pub solid_sides: BoundaryTag,
    pub solid_far: BoundaryTag,
    /// Interface `y = y_i + amplitude sin(n_wave pi x1)`; flat when zero.
    pub amplitude: f64,
    pub n_wave: usize,
    pub source: Option<[f64; 2]>,
    pub source_t0: f64,
    pub source_w0: f64,
}

impl Default for CustomScenario {
    fn default() -> Self {
        Self {
            fluid_box: [0.0, 2.0, 0.0, 2.0],
            solid_box: [0.0, 2.0, -2.0, 0.0],
            c: 1.0,
            rho: 1.0,
            lambda: 1.0,
            mu: 1.0,
            fluid_sides: BoundaryTag::Dirichlet,
            fluid_far: BoundaryTag::Dirichlet,
            solid_sides: BoundaryTag::Dirichlet,
            solid_far: BoundaryTag::Dirichlet,
            amplitude: 0.0,
            n_wave: 1,
            source: None,
            source_t0: 1.0,
            source_w0: 6.0,
        }
    }
}

/// Run configuration; every field except `scenario` has a scenario default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Scenario,
    #[serde(default = "default_q")]
    pub q: usize,
    #[serde(default = "default_ladder")]
    pub ladder: Vec<usize>,
    /// Number of finest ladder entries used for rate fits.
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default = "default_flux")]
    pub flux: FluxChoice,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    /// Interior and boundary penalty weight.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub dt_rule: Option<DtRule>,
    /// Step for the manual rule.
    #[serde(default)]
    pub dt: Option<f64>,
    /// The rule's step is divided by this factor.
    #[serde(default)]
    pub dt_refine: Option<f64>,
    #[serde(default)]
    pub final_time: Option<f64>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Random interior node displacement as a fraction of `h`.
    #[serde(default)]
    pub perturbation: f64,
    #[serde(default)]
    pub initial: InitialData,
    #[serde(default)]
    pub boundary_data: BoundaryDataChoice,
    /// Energy sampling interval in steps; 0 disables the trace.
    #[serde(default = "default_energy_every")]
    pub energy_every: usize,
    /// Samples per element side in the final snapshot; 0 disables it.
    #[serde(default)]
    pub snapshot_samples: usize,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub custom: Option<CustomScenario>,
    #[serde(default)]
    pub inversion: Option<InversionSettings>,
}

fn default_q() -> usize {
    3
}

fn default_ladder() -> Vec<usize> {
    vec![4, 6, 8, 12, 16, 24, 32]
}

fn default_flux() -> FluxChoice {
    FluxChoice::Upwind
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_energy_every() -> usize {
    10
}

impl RunConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            scenario,
            q: default_q(),
            ladder: default_ladder(),
            window: None,
            flux: default_flux(),
            tau: None,
            alpha: None,
            beta: None,
            gamma: None,
            dt_rule: None,
            dt: None,
            dt_refine: None,
            final_time: None,
            output: default_output(),
            seed: 0,
            perturbation: 0.0,
            initial: InitialData::default(),
            boundary_data: BoundaryDataChoice::default(),
            energy_every: default_energy_every(),
            snapshot_samples: 0,
            threads: None,
            custom: None,
            inversion: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Configuration(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Configuration(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Configuration(m));
        if self.q == 0 {
            return bad("q must be at least 1".into());
        }
        if self.ladder.is_empty() || self.ladder.contains(&0) {
            return bad("ladder entries must be positive".into());
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return bad("ladder must be strictly increasing".into());
        }
        if let Some(w) = self.window {
            if w < 2 {
                return bad("rate window needs at least two entries".into());
            }
        }
        for (name, v) in [("tau", self.tau), ("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if let Some(x) = v {
                if !x.is_finite() {
                    return bad(format!("{name} must be finite"));
                }
            }
        }
        if let Some(g) = self.gamma {
            if g < 0.0 {
                return bad("gamma must be non-negative".into());
            }
        }
        self.flux_params().validate()?;
        if self.dt_rule == Some(DtRule::Manual) && self.dt.is_none() {
            return bad("manual time-step rule needs `dt`".into());
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt must be positive, got {dt}"));
            }
        }
        if let Some(r) = self.dt_refine {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("dt_refine must be positive, got {r}"));
            }
        }
        if let Some(t) = self.final_time {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("final time must be positive, got {t}"));
            }
        }
        if !(0.0..0.25).contains(&self.perturbation) {
            return bad("perturbation must lie in [0, 0.25)".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if self.scenario == Scenario::Custom {
            if self.custom.is_none() {
                return bad("custom scenario needs a [custom] section".into());
            }
            if self.initial == InitialData::Exact || self.boundary_data == BoundaryDataChoice::Exact {
                return bad("custom scenario has no exact solution; use initial = \"random\" or \"zero\" and boundary_data = \"zero\"".into());
            }
            if self.final_time.is_none() {
                return bad("custom scenario needs `final_time`".into());
            }
        } else if self.custom.is_some() {
            return bad("[custom] section given for a built-in scenario".into());
        }
        if self.inversion.is_some() && !self.scenario.is_inversion() {
            return bad("[inversion] section given for a forward scenario".into());
        }
        Ok(())
    }

    pub fn flux_params(&self) -> FluxParams<f64> {
        let mut f = FluxParams::new(self.flux.mode());
        if let Some(t) = self.tau {
            f.tau = t;
        }
        if let Some(a) = self.alpha {
            f.alpha = a;
        }
        if let Some(b) = self.beta {
            f.beta = b;
        }
        if let Some(g) = self.gamma {
            f.gamma_fluid = g;
            f.gamma_solid = g;
        }
        f
    }

    /// Whether the interface and interior fluxes dissipate energy.
    pub fn is_dissipative(&self) -> bool {
        let f = self.flux_params();
        f.alpha < 0.0 || f.beta < 0.0 || f.gamma_fluid > 0.0 || f.gamma_solid > 0.0
    }
}
