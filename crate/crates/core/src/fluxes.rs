//! Star states on faces.
//!
//! Fluid traces are `(p, g)` with `g = grad(psi) . n`; solid traces are
//! `(v, s)` with `s = sigma . n`. On fluid-solid faces `n` is the fluid's
//! outward normal, so the solid's own outward traction is `-s`. On interior
//! faces both traces are measured with the owner normal and jumps are
//! owner minus neighbor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::BoundaryTag;
use crate::scalar::{dot2, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxMode {
    EnergyConserving,
    Upwind,
    Alternating0,
    Alternating1,
}

impl FluxMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "conserving" | "energy_conserving" | "central" => Ok(FluxMode::EnergyConserving),
            "upwind" => Ok(FluxMode::Upwind),
            "alt0" | "alternating0" => Ok(FluxMode::Alternating0),
            "alt1" | "alternating1" => Ok(FluxMode::Alternating1),
            _ => Err(Error::Configuration(format!("unknown flux mode `{s}`"))),
        }
    }
}

/// Interface parameters `tau, alpha, beta` and interior/boundary penalty
/// weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxParams<T> {
    pub mode: FluxMode,
    pub tau: T,
    pub alpha: T,
    pub beta: T,
    pub gamma_fluid: T,
    pub gamma_solid: T,
}

impl<T: Real> FluxParams<T> {
    pub fn new(mode: FluxMode) -> Self {
        let half = T::lit(0.5);
        let (tau, ab, gamma) = match mode {
            FluxMode::EnergyConserving => (half, T::zero(), T::zero()),
            FluxMode::Upwind => (half, -T::one(), half),
            FluxMode::Alternating0 => (T::zero(), -T::one(), half),
            FluxMode::Alternating1 => (T::one(), -T::one(), half),
        };
        Self {
            mode,
            tau,
            alpha: ab,
            beta: ab,
            gamma_fluid: gamma,
            gamma_solid: gamma,
        }
    }

    pub fn conserving() -> Self {
        Self::new(FluxMode::EnergyConserving)
    }

    pub fn upwind() -> Self {
        Self::new(FluxMode::Upwind)
    }

    pub fn validate(&self) -> Result<()> {
        let z = T::zero();
        if self.alpha > z || self.beta > z {
            return Err(Error::Configuration(format!(
                "interface weights must be non-positive, got alpha = {}, beta = {}",
                self.alpha, self.beta
            )));
        }
        if self.gamma_fluid < z || self.gamma_solid < z {
            return Err(Error::Configuration("penalty weights must be non-negative".into()));
        }
        if self.mode == FluxMode::EnergyConserving
            && (self.alpha != z || self.beta != z || self.gamma_fluid != z || self.gamma_solid != z)
        {
            return Err(Error::Configuration(
                "energy-conserving mode needs alpha = beta = gamma = 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FluidTrace<T> {
    pub p: T,
    pub g: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolidTrace<T> {
    pub v: [T; 2],
    pub s: [T; 2],
}

/// Normal and tangential parts of a traction vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StressTrace<T> {
    pub traction: [T; 2],
    pub normal: T,
    pub tangential: T,
}

impl<T: Real> StressTrace<T> {
    pub fn new(traction: [T; 2], n: [T; 2]) -> Self {
        let m = [-n[1], n[0]];
        Self {
            traction,
            normal: dot2(traction, n),
            tangential: dot2(traction, m),
        }
    }

    pub fn recompose(&self, n: [T; 2]) -> [T; 2] {
        let m = [-n[1], n[0]];
        [
            self.normal * n[0] + self.tangential * m[0],
            self.normal * n[1] + self.tangential * m[1],
        ]
    }
}

/// Fluid star values `(p*, g*)`.
pub type FluidStar<T> = FluidTrace<T>;
/// Solid star values `(v*, s*)`.
pub type SolidStar<T> = SolidTrace<T>;

/// Interface star states; `solid.s` is `(sigma . n)*` for the fluid normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StarStates<T> {
    pub fluid: FluidStar<T>,
    pub solid: SolidStar<T>,
}

/// Rotates normal/tangential components back to Cartesian ones.
#[inline]
fn from_frame<T: Real>(n: [T; 2], wn: T, wm: T) -> [T; 2] {
    [n[0] * wn - n[1] * wm, n[1] * wn + n[0] * wm]
}

/// Fluid-solid coupling flux.
pub fn interface_flux<T: Real>(
    fluid: FluidTrace<T>,
    solid: SolidTrace<T>,
    n: [T; 2],
    params: &FluxParams<T>,
) -> Result<StarStates<T>> {
    let tol = T::lit(1e-10).max(T::epsilon() * T::lit(64.0));
    if (dot2(n, n) - T::one()).abs() > tol {
        return Err(Error::Contract(format!("interface normal {n:?} is not unit")));
    }
    if params.alpha > T::zero() || params.beta > T::zero() {
        return Err(Error::Contract("alpha and beta must be non-positive".into()));
    }
    Ok(interface_star(fluid, solid, n, params))
}

#[inline]
pub(crate) fn interface_star<T: Real>(
    fluid: FluidTrace<T>,
    solid: SolidTrace<T>,
    n: [T; 2],
    params: &FluxParams<T>,
) -> StarStates<T> {
    let m = [-n[1], n[0]];
    let vn = dot2(solid.v, n);
    let vm = dot2(solid.v, m);
    let sn = dot2(solid.s, n);
    let tau = params.tau;
    let one_m = T::one() - tau;
    let vn_star = tau * vn + one_m * fluid.g - params.alpha * (sn - fluid.p);
    let p_star = tau * fluid.p + one_m * sn - params.beta * (vn - fluid.g);
    StarStates {
        fluid: FluidTrace { p: p_star, g: vn_star },
        solid: SolidTrace {
            v: from_frame(n, vn_star, vm),
            s: from_frame(n, p_star, T::zero()),
        },
    }
}

/// Pointwise rate of change of the total energy due to one interface point.
pub fn interface_energy_rate<T: Real>(
    fluid: FluidTrace<T>,
    solid: SolidTrace<T>,
    star: &StarStates<T>,
) -> T {
    let f = fluid.g * (star.fluid.p - fluid.p) + fluid.p * star.fluid.g;
    // solid sees outward traction -s and star traction -s*
    let dv = [star.solid.v[0] - solid.v[0], star.solid.v[1] - solid.v[1]];
    let s = -(dot2(solid.s, dv)) - dot2(solid.v, star.solid.s);
    f + s
}

/// The dissipation the interface flux is designed to produce.
pub fn interface_dissipation<T: Real>(
    fluid: FluidTrace<T>,
    solid: SolidTrace<T>,
    n: [T; 2],
    params: &FluxParams<T>,
) -> T {
    let sn = dot2(solid.s, n);
    let vn = dot2(solid.v, n);
    params.alpha * (sn - fluid.p) * (sn - fluid.p) + params.beta * (fluid.g - vn) * (fluid.g - vn)
}

/// Average plus impedance-scaled jump penalty between two fluid elements.
#[inline]
pub fn interior_flux_fluid<T: Real>(
    owner: FluidTrace<T>,
    neighbor: FluidTrace<T>,
    c: T,
    gamma: T,
) -> FluidStar<T> {
    let half = T::lit(0.5);
    FluidTrace {
        p: half * (owner.p + neighbor.p) - gamma * c * (owner.g - neighbor.g),
        g: half * (owner.g + neighbor.g) - gamma / c * (owner.p - neighbor.p),
    }
}

/// Solid counterpart of [`interior_flux_fluid`] with impedance `z`.
#[inline]
pub fn interior_flux_solid<T: Real>(
    owner: SolidTrace<T>,
    neighbor: SolidTrace<T>,
    z: T,
    gamma: T,
) -> SolidStar<T> {
    let half = T::lit(0.5);
    let mut out = SolidTrace::default();
    for a in 0..2 {
        out.v[a] = half * (owner.v[a] + neighbor.v[a]) - gamma / z * (owner.s[a] - neighbor.s[a]);
        out.s[a] = half * (owner.s[a] + neighbor.s[a]) - gamma * z * (owner.v[a] - neighbor.v[a]);
    }
    out
}

/// Boundary data: for fluids `p` is the time derivative of the prescribed
/// potential and `g` the prescribed normal derivative; for solids `v` is
/// the prescribed velocity and `s` the prescribed traction.
pub fn boundary_flux_fluid<T: Real>(
    trace: FluidTrace<T>,
    tag: BoundaryTag,
    data: FluidTrace<T>,
    c: T,
    gamma: T,
) -> Result<FluidStar<T>> {
    match tag {
        BoundaryTag::Dirichlet => Ok(FluidTrace {
            p: data.p,
            g: trace.g - gamma / c * (trace.p - data.p),
        }),
        BoundaryTag::Neumann => Ok(FluidTrace {
            p: trace.p - gamma * c * (trace.g - data.g),
            g: data.g,
        }),
        BoundaryTag::FreeTraction => Err(Error::Configuration(
            "traction condition on a fluid boundary".into(),
        )),
    }
}

pub fn boundary_flux_solid<T: Real>(
    trace: SolidTrace<T>,
    tag: BoundaryTag,
    data: SolidTrace<T>,
    z: T,
    gamma: T,
) -> Result<SolidStar<T>> {
    let mut out = SolidTrace::default();
    match tag {
        BoundaryTag::Dirichlet => {
            for a in 0..2 {
                out.v[a] = data.v[a];
                out.s[a] = trace.s[a] - gamma * z * (trace.v[a] - data.v[a]);
            }
        }
        BoundaryTag::FreeTraction => {
            for a in 0..2 {
                out.s[a] = data.s[a];
                out.v[a] = trace.v[a] - gamma / z * (trace.s[a] - data.s[a]);
            }
        }
        BoundaryTag::Neumann => {
            return Err(Error::Configuration("Neumann condition on a solid boundary".into()))
        }
    }
    Ok(out)
}

/// Energy rate contributed by one fluid face point, `g (p* - p) + p g*`.
#[inline]
pub fn fluid_face_energy_rate<T: Real>(trace: FluidTrace<T>, star: FluidStar<T>) -> T {
    trace.g * (star.p - trace.p) + trace.p * star.g
}

/// Energy rate contributed by one solid face point with outward traction.
#[inline]
pub fn solid_face_energy_rate<T: Real>(trace: SolidTrace<T>, star: SolidStar<T>) -> T {
    let dv = [star.v[0] - trace.v[0], star.v[1] - trace.v[1]];
    dot2(trace.s, dv) + dot2(trace.v, star.s)
}
