//! Misfit-driven parameter recovery with finite-difference gradients and a
//! projected BFGS iteration on box constraints.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{ExactSolution, FluidFields, PointSource, ReceiverField, SolidFields};
use crate::elastic::ElasticMaterial;
use crate::error::{Error, Result};
use crate::fluxes::FluxParams;
use crate::mesh::{
    build_cartesian_coupled, build_radial_interface, BoundaryTag, BoxBoundary, CoupledSetup,
    Material, Mesh, Rect,
};
use crate::solver::{BoundaryData, Degrees, Solver};
use crate::timestep::{integrate, select_dt, TimeStepRule};

/// Scalar cost with box constraints.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, theta: &[f64]) -> Result<f64>;
    fn lower(&self) -> Vec<f64>;
    fn upper(&self) -> Vec<f64>;
}

/// Forward-difference step for component `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Forward-difference gradient. Steps flip to the other side at active
/// upper bounds, so every probe is feasible. A failed probe is retried once
/// with a ten times smaller step.
pub fn fd_gradient<O: Objective + ?Sized>(obj: &O, theta: &[f64], j0: f64) -> Result<Vec<f64>> {
    fd_gradient_with(obj, theta, j0, fd_step)
}

pub fn fd_gradient_with<O: Objective + ?Sized>(
    obj: &O,
    theta: &[f64],
    j0: f64,
    step: impl Fn(f64) -> f64 + Sync,
) -> Result<Vec<f64>> {
    let (lo, hi) = (obj.lower(), obj.upper());
    (0..theta.len())
        .into_par_iter()
        .map(|i| {
            let mut d = step(theta[i]);
            for attempt in 0..2 {
                let signed = if theta[i] + d <= hi[i] { d } else { -d };
                if theta[i] + signed < lo[i] {
                    return Err(Error::Optimization(format!(
                        "bounds of component {i} are narrower than the difference step"
                    )));
                }
                let mut probe = theta.to_vec();
                probe[i] += signed;
                match obj.value(&probe) {
                    Ok(j) if j.is_finite() => return Ok((j - j0) / signed),
                    res => {
                        if attempt == 1 {
                            return Err(Error::Optimization(format!(
                                "difference probe of component {i} failed: {:?}",
                                res.err()
                            )));
                        }
                        log::warn!("difference probe of component {i} failed, shrinking step");
                        d *= 0.1;
                    }
                }
            }
            unreachable!()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MisfitRecord {
    pub iteration: usize,
    pub cost: f64,
    pub grad_inf: f64,
    pub step: f64,
    pub theta: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Stop when the projected gradient max-norm falls below this.
    pub grad_tol: f64,
    /// Stop when the cost falls below this.
    pub cost_tol: f64,
    /// Stop when the cost falls below this fraction of the initial cost.
    pub relative_cost_tol: f64,
    pub armijo_c1: f64,
    pub max_backtracks: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iter: 30,
            grad_tol: 1e-12,
            cost_tol: 1e-20,
            relative_cost_tol: 1e-10,
            armijo_c1: 1e-4,
            max_backtracks: 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Termination {
    Gradient,
    Cost,
    MaxIterations,
    NoDescent,
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    pub theta: Vec<f64>,
    pub cost: f64,
    pub records: Vec<MisfitRecord>,
    pub termination: Termination,
    pub evaluations: usize,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(lo[i], hi[i]);
    }
}

/// Gradient components not pinned by an active bound.
fn free_mask(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> Vec<bool> {
    (0..x.len())
        .map(|i| !((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)))
        .collect()
}

fn projected_grad_inf(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let free = free_mask(x, g, lo, hi);
    (0..x.len()).filter(|&i| free[i]).map(|i| g[i].abs()).fold(0.0, f64::max)
}

/// Projected BFGS with Armijo backtracking. Every evaluated point lies in
/// the box; accepted costs never increase.
pub fn minimize<O: Objective + ?Sized>(
    obj: &O,
    theta0: &[f64],
    opts: &MinimizeOptions,
) -> Result<MinimizeResult> {
    minimize_with_gradient(obj, theta0, opts, |x, j| fd_gradient(obj, x, j))
}

pub fn minimize_with_gradient<O: Objective + ?Sized>(
    obj: &O,
    theta0: &[f64],
    opts: &MinimizeOptions,
    mut gradient: impl FnMut(&[f64], f64) -> Result<Vec<f64>>,
) -> Result<MinimizeResult> {
    let n = obj.dim();
    let (lo, hi) = (obj.lower(), obj.upper());
    if theta0.len() != n || lo.len() != n || hi.len() != n {
        return Err(Error::InvalidArgument("parameter dimension mismatch".into()));
    }
    if (0..n).any(|i| !(lo[i] <= theta0[i] && theta0[i] <= hi[i])) {
        return Err(Error::InvalidArgument("initial guess outside the bounds".into()));
    }
    let mut x = theta0.to_vec();
    let mut evaluations = 1;
    let mut f = obj.value(&x)?;
    if !f.is_finite() {
        return Err(Error::Optimization("cost at the initial guess is not finite".into()));
    }
    let mut g = gradient(&x, f)?;
    let mut h = identity(n);
    let mut scaled = false;
    let mut records = vec![MisfitRecord {
        iteration: 0,
        cost: f,
        grad_inf: projected_grad_inf(&x, &g, &lo, &hi),
        step: 0.0,
        theta: x.clone(),
    }];
    let cost_floor = opts.cost_tol.max(opts.relative_cost_tol * f);
    let mut termination = Termination::MaxIterations;
    for it in 1..=opts.max_iter {
        let gi = projected_grad_inf(&x, &g, &lo, &hi);
        if f <= cost_floor {
            termination = Termination::Cost;
            break;
        }
        if gi <= opts.grad_tol {
            termination = Termination::Gradient;
            break;
        }
        let free = free_mask(&x, &g, &lo, &hi);
        let mut d = direction(&h, &g, &free);
        if dot(&d, &g) >= 0.0 {
            h = identity(n);
            d = (0..n).map(|i| if free[i] { -g[i] } else { 0.0 }).collect();
        }
        // keep the trial step inside a box-sized region
        let span = (0..n).map(|i| hi[i] - lo[i]).fold(0.0, f64::max);
        let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if span.is_finite() && dmax > span {
            d.iter_mut().for_each(|v| *v *= span / dmax);
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_backtracks {
            let mut trial: Vec<f64> = (0..n).map(|i| x[i] + alpha * d[i]).collect();
            project(&mut trial, &lo, &hi);
            let s: Vec<f64> = (0..n).map(|i| trial[i] - x[i]).collect();
            if s.iter().all(|&v| v == 0.0) {
                break;
            }
            evaluations += 1;
            match obj.value(&trial) {
                Ok(ft) if ft.is_finite() && ft <= f + opts.armijo_c1 * dot(&g, &s) => {
                    accepted = Some((trial, ft, s));
                    break;
                }
                Ok(_) => {}
                Err(e) => log::warn!("forward evaluation failed during line search: {e}"),
            }
            alpha *= 0.5;
        }
        let Some((xn, fn_, s)) = accepted else {
            termination = Termination::NoDescent;
            log::warn!("no descent after {} backtracks at iteration {it}", opts.max_backtracks);
            break;
        };
        let (xn, fn_, s, alpha) = refine_step(obj, &x, f, &g, &d, (xn, fn_, s, alpha), &lo, &hi, &mut evaluations);
        let gn = gradient(&xn, fn_)?;
        evaluations += n;
        let y: Vec<f64> = (0..n).map(|i| gn[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) {
            if !scaled {
                let gamma = sy / dot(&y, &y);
                h = identity(n);
                h.iter_mut().flatten().for_each(|v| *v *= gamma);
                scaled = true;
            }
            bfgs_update(&mut h, &s, &y, sy);
        }
        x = xn;
        f = fn_;
        g = gn;
        records.push(MisfitRecord {
            iteration: it,
            cost: f,
            grad_inf: projected_grad_inf(&x, &g, &lo, &hi),
            step: alpha,
            theta: x.clone(),
        });
        log::info!("iteration {it}: cost {f:.6e}, step {alpha}");
    }
    if termination == Termination::MaxIterations {
        if f <= cost_floor {
            termination = Termination::Cost;
        } else if projected_grad_inf(&x, &g, &lo, &hi) <= opts.grad_tol {
            termination = Termination::Gradient;
        }
    }
    Ok(MinimizeResult { theta: x, cost: f, records, termination, evaluations })
}

/// One safeguarded quadratic-interpolation probe along an unclipped
/// accepted step; the lower of the two points is kept.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn refine_step<O: Objective + ?Sized>(
    obj: &O,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    accepted: (Vec<f64>, f64, Vec<f64>, f64),
    lo: &[f64],
    hi: &[f64],
    evaluations: &mut usize,
) -> (Vec<f64>, f64, Vec<f64>, f64) {
    let (_, fa, ref s, alpha) = accepted;
    let n = x.len();
    if (0..n).any(|i| (s[i] - alpha * d[i]).abs() > 1e-14 * (1.0 + x[i].abs())) {
        return accepted;
    }
    let slope = dot(g, d);
    let curv = fa - f - slope * alpha;
    if !(curv > 0.0) {
        return accepted;
    }
    let aq = -slope * alpha * alpha / (2.0 * curv);
    if !(aq > 0.1 * alpha && aq < 2.0 * alpha) || (aq - alpha).abs() < 1e-3 * alpha {
        return accepted;
    }
    let mut trial: Vec<f64> = (0..n).map(|i| x[i] + aq * d[i]).collect();
    project(&mut trial, lo, hi);
    *evaluations += 1;
    match obj.value(&trial) {
        Ok(fq) if fq.is_finite() && fq < fa => {
            let sq = (0..n).map(|i| trial[i] - x[i]).collect();
            (trial, fq, sq, aq)
        }
        _ => accepted,
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn direction(h: &[Vec<f64>], g: &[f64], free: &[bool]) -> Vec<f64> {
    let n = g.len();
    (0..n)
        .map(|i| {
            if !free[i] {
                return 0.0;
            }
            -(0..n).filter(|&j| free[j]).map(|j| h[i][j] * g[j]).sum::<f64>()
        })
        .collect()
}

fn bfgs_update(h: &mut [Vec<f64>], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i][j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}

/// `sum_r int (a_r - b_r)^2 dt` by the trapezoid rule on a uniform grid.
pub fn misfit(a: &[Vec<f64>], b: &[Vec<f64>], dt: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument("receiver counts differ".into()));
    }
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument("trace lengths differ".into()));
        }
        let m = x.len();
        for k in 0..m {
            let d = x[k] - y[k];
            let w = if k == 0 || k + 1 == m { 0.5 } else { 1.0 };
            total += w * d * d;
        }
    }
    Ok(total * dt)
}

/// Desk-scale settings of the two inversion problems.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InversionSettings {
    pub q: usize,
    pub final_time: f64,
    /// Receiver sampling interval in time steps.
    pub sample_every: usize,
    pub true_theta: Vec<f64>,
    pub initial_theta: Option<Vec<f64>>,
    pub bound: f64,
    pub n_theta: usize,
    pub n_r_solid: usize,
    pub n_r_fluid: usize,
    pub r_inner: f64,
    pub receivers: usize,
    /// Gaussian `amplitude exp(-width ((x1 - x0)^2 + x2^2))`.
    pub pulse_amplitude: f64,
    pub pulse_width: f64,
    pub pulse_center: f64,
    /// Elements per side in the material problem.
    pub n_material: usize,
    pub options: MinimizeOptions,
}

impl Default for InversionSettings {
    fn default() -> Self {
        Self {
            q: 3,
            final_time: 10.0,
            sample_every: 4,
            true_theta: vec![0.002, 0.050, -0.001, 0.008],
            initial_theta: None,
            bound: 0.1,
            n_theta: 24,
            n_r_solid: 2,
            n_r_fluid: 4,
            r_inner: 0.5,
            receivers: 50,
            pulse_amplitude: 1.0,
            pulse_width: 8.0,
            pulse_center: 2.0,
            n_material: 5,
            options: MinimizeOptions::default(),
        }
    }
}

impl InversionSettings {
    /// Full-size interface coefficients.
    pub fn interface_reference() -> Vec<f64> {
        vec![0.002, 0.050, -0.001, 0.008, -0.003, -0.006, -0.010, 0.010]
    }

    /// Defaults for the material problem.
    pub fn material_defaults() -> Self {
        let mut s = Self {
            q: 3,
            final_time: 4.0,
            sample_every: 2,
            true_theta: (0..25).map(|i| 0.5 + 0.4 * ((i as f64) * 1.7).sin()).collect(),
            bound: 1.0,
            ..Self::default()
        };
        s.options.max_iter = 20;
        s
    }
}

/// Initial potential used by the interface problem.
struct GaussianPulse {
    amplitude: f64,
    width: f64,
    center: f64,
    material: ElasticMaterial<f64>,
}

impl ExactSolution<f64> for GaussianPulse {
    fn fluid_speed(&self) -> f64 {
        1.0
    }

    fn solid_material(&self) -> ElasticMaterial<f64> {
        self.material
    }

    fn fluid(&self, x: [f64; 2], _t: f64) -> FluidFields<f64> {
        let (dx, dy) = (x[0] - self.center, x[1]);
        let psi = self.amplitude * (-self.width * (dx * dx + dy * dy)).exp();
        FluidFields { psi, p: 0.0, grad_psi: [-2.0 * self.width * dx * psi, -2.0 * self.width * dy * psi] }
    }

    fn solid(&self, _x: [f64; 2], _t: f64) -> SolidFields<f64> {
        SolidFields::default()
    }

    fn fluid_residual(&self, _x: [f64; 2], _t: f64) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn solid_residual(&self, _x: [f64; 2], _t: f64) -> ([f64; 2], f64) {
        ([0.0; 2], 1.0)
    }

    fn interface_point(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        let th = std::f64::consts::TAU * s;
        ([th.cos(), th.sin()], [-th.cos(), -th.sin()])
    }

    fn fluid_point(&self, a: f64, b: f64) -> [f64; 2] {
        let r = 1.0 + 2.0 * a;
        let th = std::f64::consts::TAU * b;
        [r * th.cos(), r * th.sin()]
    }

    fn solid_point(&self, a: f64, b: f64) -> [f64; 2] {
        let r = 0.5 + 0.5 * a;
        let th = std::f64::consts::TAU * b;
        [r * th.cos(), r * th.sin()]
    }
}

/// Receiver traces of one forward solve, `traces[receiver][sample]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Recording {
    pub dt: f64,
    pub times: Vec<f64>,
    pub traces: Vec<Vec<f64>>,
}

/// Which inverse problem a [`ForwardProblem`] solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionKind {
    Interface,
    Material,
}

/// Parameter-to-data map with a time step fixed at construction.
pub struct ForwardProblem {
    pub kind: InversionKind,
    pub settings: InversionSettings,
    dt: f64,
    receivers: Vec<[f64; 2]>,
}

impl ForwardProblem {
    pub fn new(kind: InversionKind, settings: InversionSettings) -> Result<Self> {
        let s = &settings;
        if s.q == 0 || s.sample_every == 0 || !(s.final_time > 0.0) || !(s.bound > 0.0) {
            return Err(Error::Configuration("inversion settings out of range".into()));
        }
        let receivers: Vec<[f64; 2]> = match kind {
            InversionKind::Interface => (0..s.receivers)
                .map(|i| {
                    let th = std::f64::consts::TAU * (i as f64 + 0.5) / s.receivers as f64;
                    [3.0 * th.cos(), 3.0 * th.sin()]
                })
                .collect(),
            InversionKind::Material => (0..9).map(|i| [-0.8 + 0.2 * i as f64, 2.0]).collect(),
        };
        let mut p = Self { kind, settings, dt: 0.0, receivers };
        let mesh = p.mesh(&vec![0.0; p.dim()])?;
        let q = p.settings.q;
        p.dt = match kind {
            InversionKind::Interface => {
                // solid speeds are the fastest: sqrt(lambda + 2 mu) = sqrt(2.4)
                0.8 * select_dt(TimeStepRule::InversionMaterial { h: mesh.h, q, mu: 0.2, lambda: 2.0 })?
            }
            InversionKind::Material => {
                let lmax = 4.0 + p.settings.bound;
                select_dt(TimeStepRule::InversionMaterial { h: mesh.h, q, mu: 2.0, lambda: lmax })?
            }
        };
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            InversionKind::Interface => self.settings.true_theta.len(),
            InversionKind::Material => self.settings.n_material * self.settings.n_material,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn receivers(&self) -> &[[f64; 2]] {
        &self.receivers
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        match self.kind {
            InversionKind::Interface => (vec![-self.settings.bound; n], vec![self.settings.bound; n]),
            InversionKind::Material => (vec![0.0; n], vec![self.settings.bound; n]),
        }
    }

    pub fn mesh(&self, theta: &[f64]) -> Result<Mesh<f64>> {
        let s = &self.settings;
        match self.kind {
            InversionKind::Interface => {
                let setup = CoupledSetup {
                    fluid: Material::fluid(1.0),
                    solid: Material::solid(1.0, 2.0, 0.2),
                    fluid_boundary: BoxBoundary::uniform(BoundaryTag::Neumann),
                    solid_boundary: BoxBoundary::uniform(BoundaryTag::FreeTraction),
                };
                build_radial_interface(theta, s.r_inner, 3.0, s.n_r_solid, s.n_r_fluid, s.n_theta, &setup)
            }
            InversionKind::Material => {
                let n = s.n_material;
                let setup = CoupledSetup {
                    fluid: Material::fluid(1.0),
                    solid: Material::solid(1.0, 4.0, 2.0),
                    fluid_boundary: BoxBoundary {
                        left: BoundaryTag::Dirichlet,
                        right: BoundaryTag::Dirichlet,
                        far: BoundaryTag::Neumann,
                    },
                    solid_boundary: BoxBoundary {
                        left: BoundaryTag::Dirichlet,
                        right: BoundaryTag::Dirichlet,
                        far: BoundaryTag::FreeTraction,
                    },
                };
                let mut mesh = build_cartesian_coupled(
                    n,
                    Rect::new(-1.0, 1.0, 0.0, 2.0),
                    Rect::new(-1.0, 1.0, -2.0, 0.0),
                    &setup,
                )?;
                let solid = mesh.solid.elements.clone();
                if theta.len() != solid.len() {
                    return Err(Error::InvalidArgument(format!(
                        "expected {} material parameters, got {}",
                        solid.len(),
                        theta.len()
                    )));
                }
                for (&e, &d) in solid.iter().zip(theta) {
                    mesh.set_material(e, Material::solid(1.0, 4.0 + d, 2.0))?;
                }
                Ok(mesh)
            }
        }
    }

    pub fn solve(&self, theta: &[f64]) -> Result<Recording> {
        let s = &self.settings;
        let mesh = self.mesh(theta)?;
        let degrees = Degrees::standard(s.q)?;
        let mut solver = Solver::new(mesh, degrees, FluxParams::upwind(), BoundaryData::Zero)?;
        let mut y = match self.kind {
            InversionKind::Interface => {
                let pulse = GaussianPulse {
                    amplitude: s.pulse_amplitude,
                    width: s.pulse_width,
                    center: s.pulse_center,
                    material: ElasticMaterial { rho: 1.0, lambda: 2.0, mu: 0.2 },
                };
                solver.project(&pulse, 0.0)?.data
            }
            InversionKind::Material => {
                solver.add_source(PointSource::new([0.1, 1.8], 1.0, 6.0))?;
                solver.zero_state().data
            }
        };
        let probes = self
            .receivers
            .iter()
            .map(|&x| solver.probe(x, ReceiverField::Psi))
            .collect::<Result<Vec<_>>>()?;
        let mut times = Vec::new();
        let mut traces = vec![Vec::new(); probes.len()];
        let every = s.sample_every;
        let used = integrate(&solver, &mut y, 0.0, s.final_time, self.dt, |step, t, y| {
            if step % every == 0 {
                times.push(t);
                for (tr, p) in traces.iter_mut().zip(&probes) {
                    tr.push(p.sample(y));
                }
            }
            Ok(())
        })?;
        Ok(Recording { dt: used * every as f64, times, traces })
    }
}

/// Misfit against data generated at `settings.true_theta`.
pub struct InversionProblem {
    pub forward: ForwardProblem,
    pub data: Recording,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl InversionProblem {
    pub fn new(kind: InversionKind, settings: InversionSettings) -> Result<Self> {
        let forward = ForwardProblem::new(kind, settings)?;
        let truth = forward.settings.true_theta.clone();
        if truth.len() != forward.dim() {
            return Err(Error::Configuration(format!(
                "true parameter vector has {} entries, the problem has {}",
                truth.len(),
                forward.dim()
            )));
        }
        let (lower, upper) = forward.bounds();
        if (0..truth.len()).any(|i| truth[i] < lower[i] || truth[i] > upper[i]) {
            return Err(Error::Configuration("true parameters violate the bounds".into()));
        }
        let data = forward.solve(&truth)?;
        Ok(Self { forward, data, lower, upper })
    }

    pub fn initial_guess(&self) -> Vec<f64> {
        self.forward
            .settings
            .initial_theta
            .clone()
            .unwrap_or_else(|| vec![0.0; self.forward.dim()])
    }

    pub fn run(&self) -> Result<MinimizeResult> {
        minimize(self, &self.initial_guess(), &self.forward.settings.options)
    }
}

impl Objective for InversionProblem {
    fn dim(&self) -> usize {
        self.forward.dim()
    }

    fn value(&self, theta: &[f64]) -> Result<f64> {
        let rec = self.forward.solve(theta)?;
        misfit(&rec.traces, &self.data.traces, self.data.dt)
    }

    fn lower(&self) -> Vec<f64> {
        self.lower.clone()
    }

    fn upper(&self) -> Vec<f64> {
        self.upper.clone()
    }
}

/// Writes `misfit.csv`, `theta_history.csv` and `recovered.csv`.
pub fn write_inversion_outputs(dir: &Path, result: &MinimizeResult) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("misfit.csv"))?);
    writeln!(f, "iteration,J,grad_inf,step")?;
    for r in &result.records {
        writeln!(f, "{},{:.17e},{:.17e},{:.17e}", r.iteration, r.cost, r.grad_inf, r.step)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("theta_history.csv"))?);
    let n = result.theta.len();
    let header: Vec<String> = (0..n).map(|i| format!("theta{i}")).collect();
    writeln!(f, "iteration,{}", header.join(","))?;
    for r in &result.records {
        let vals: Vec<String> = r.theta.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(f, "{},{}", r.iteration, vals.join(","))?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("recovered.csv"))?);
    writeln!(f, "index,value")?;
    for (i, v) in result.theta.iter().enumerate() {
        writeln!(f, "{i},{v:.17e}")?;
    }
    Ok(())
}

/// Shared handle used by the harness.
pub type SharedProblem = Arc<InversionProblem>;
