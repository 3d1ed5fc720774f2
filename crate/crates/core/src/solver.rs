//! Global semi-discrete operator.
//!
//! A right-hand-side evaluation runs three passes: element traces are
//! written to face-indexed buffers, star states are computed face by face
//! from those buffers, and every element is updated from its own star
//! values.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::acoustic::{acoustic_rhs, AcousticElementOps};
use crate::analytic::{traction, stress, ExactSolution, PointSource, ReceiverField};
use crate::basis::{gauss_rule, tensor_eval};
use crate::elastic::{curl_replacement_row, elastic_rhs, ElasticElementOps, ElasticMaterial};
use crate::error::{Error, Result};
use crate::fluxes::{
    boundary_flux_fluid, boundary_flux_solid, fluid_face_energy_rate, interface_dissipation, interface_star,
    interior_flux_fluid, interior_flux_solid, solid_face_energy_rate, FluidTrace, FluxParams,
    SolidTrace,
};
use crate::linalg::{Lu, Matrix};
use crate::mesh::{ElementGeometry, ElementMap, FaceKind, Material, Mesh, RegionKind};
use crate::modal::ModalTables;
use crate::scalar::Real;
use crate::timestep::System;

/// Polynomial degrees of the four fields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Degrees {
    pub psi: usize,
    pub p: usize,
    pub u: usize,
    pub v: usize,
}

impl Degrees {
    /// `q` for potential and displacement, `q - 1` for their rates.
    pub fn standard(q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("degree q must be at least 1".into()));
        }
        Ok(Self { psi: q, p: q - 1, u: q, v: q - 1 })
    }

    pub fn max(&self) -> usize {
        self.psi.max(self.p).max(self.u).max(self.v)
    }
}

/// Solution coefficients and time.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState<T> {
    pub t: T,
    pub data: Vec<T>,
}

#[derive(Clone, Debug)]
pub enum ElementOps<T> {
    Fluid(Arc<AcousticElementOps<T>>),
    Solid(Arc<ElasticElementOps<T>>),
}

/// Source of boundary values.
#[derive(Clone)]
pub enum BoundaryData<T> {
    Zero,
    Exact(Arc<dyn ExactSolution<T>>),
}

/// L2 errors per field; `u` and `v` combine both components.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct FieldErrors {
    pub psi: f64,
    pub p: f64,
    pub u: f64,
    pub v: f64,
}

impl FieldErrors {
    pub fn as_array(&self) -> [f64; 4] {
        [self.psi, self.p, self.u, self.v]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Energies<T> {
    pub acoustic: T,
    pub elastic: T,
    pub total: T,
}

#[derive(Clone, Debug)]
struct SourceTerm<T> {
    element: usize,
    pulse: PointSource<T>,
    /// Mass-inverse applied to the load vector, in the rate block.
    weights: Vec<T>,
}

/// Precomputed point evaluation of one field.
#[derive(Clone, Debug)]
pub struct Probe<T> {
    pub element: usize,
    pub field: ReceiverField,
    offset: usize,
    phi: Vec<T>,
}

impl<T: Real> Probe<T> {
    pub fn sample(&self, y: &[T]) -> T {
        crate::linalg::dot(&self.phi, &y[self.offset..self.offset + self.phi.len()])
    }
}

struct Workspace<T> {
    traces: Vec<T>,
    stars: Vec<T>,
}

pub struct Solver<T: Real> {
    pub mesh: Mesh<T>,
    pub degrees: Degrees,
    pub flux: FluxParams<T>,
    pub data: BoundaryData<T>,
    nq: usize,
    ops: Vec<ElementOps<T>>,
    geoms: Vec<ElementGeometry<T>>,
    offsets: Vec<usize>,
    trace_offsets: Vec<usize>,
    dim: usize,
    trace_len: usize,
    sources: Vec<SourceTerm<T>>,
    work: Mutex<Workspace<T>>,
}

fn key_of<T: Real>(mesh: &Mesh<T>, e: usize) -> Option<Vec<i64>> {
    let el = &mesh.elements[e];
    let ElementMap::Bilinear { nodes } = el.map else {
        return None;
    };
    let h = mesh.h.as_f64();
    let x0 = mesh.nodes[nodes[0]];
    let mut key = Vec::with_capacity(12);
    for &n in &nodes[1..] {
        for a in 0..2 {
            let d = (mesh.nodes[n][a] - x0[a]).as_f64() / h;
            key.push((d * 1e12).round() as i64);
        }
    }
    match el.material {
        Material::Fluid { c } => {
            key.push(0);
            key.push(c.as_f64().to_bits() as i64);
        }
        Material::Solid { rho, lambda, mu } => {
            key.push(1);
            for x in [rho, lambda, mu] {
                key.push(x.as_f64().to_bits() as i64);
            }
        }
    }
    Some(key)
}

fn split_blocks<'a, T>(mut buf: &'a mut [T], offsets: &[usize], total: usize) -> Vec<&'a mut [T]> {
    let mut out = Vec::with_capacity(offsets.len());
    for i in 0..offsets.len() {
        let end = if i + 1 < offsets.len() { offsets[i + 1] } else { total };
        let (a, b) = std::mem::take(&mut buf).split_at_mut(end - offsets[i]);
        out.push(a);
        buf = b;
    }
    out
}

impl<T: Real> Solver<T> {
    pub fn new(
        mesh: Mesh<T>,
        degrees: Degrees,
        flux: FluxParams<T>,
        data: BoundaryData<T>,
    ) -> Result<Self> {
        flux.validate()?;
        let nq = degrees.max() + 2;
        let rule = gauss_rule::<T>(nq)?;
        let ne = mesh.num_elements();
        let geoms: Vec<ElementGeometry<T>> = (0..ne)
            .into_par_iter()
            .map(|e| mesh.geometry(e, &rule.nodes, &rule.weights))
            .collect::<Result<_>>()?;

        // one representative per distinct element shape and material
        let mut rep: Vec<usize> = (0..ne).collect();
        let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
        for e in 0..ne {
            if let Some(k) = key_of(&mesh, e) {
                rep[e] = *seen.entry(k).or_insert(e);
            }
        }
        let uniques: Vec<usize> = (0..ne).filter(|&e| rep[e] == e).collect();
        let built: Vec<(usize, ElementOps<T>)> = uniques
            .par_iter()
            .map(|&e| Self::build_ops(&mesh, e, &geoms[e], &rule.nodes, degrees).map(|o| (e, o)))
            .collect::<Result<_>>()?;
        let table: HashMap<usize, ElementOps<T>> = built.into_iter().collect();
        let ops: Vec<ElementOps<T>> = (0..ne).map(|e| table[&rep[e]].clone()).collect();

        let nf = 4 * nq;
        let mut offsets = Vec::with_capacity(ne);
        let mut trace_offsets = Vec::with_capacity(ne);
        let (mut dim, mut trace_len) = (0, 0);
        for op in &ops {
            offsets.push(dim);
            trace_offsets.push(trace_len);
            match op {
                ElementOps::Fluid(o) => {
                    dim += o.n_psi + o.n_p;
                    trace_len += 2 * nf;
                }
                ElementOps::Solid(o) => {
                    dim += 2 * (o.n_u + o.n_v);
                    trace_len += 4 * nf;
                }
            }
        }
        log::debug!(
            "solver: {} elements, {} distinct operators, {} unknowns",
            ne,
            uniques.len(),
            dim
        );
        Ok(Self {
            mesh,
            degrees,
            flux,
            data,
            nq,
            ops,
            geoms,
            offsets,
            trace_offsets,
            dim,
            trace_len,
            sources: Vec::new(),
            work: Mutex::new(Workspace {
                traces: vec![T::zero(); trace_len],
                stars: vec![T::zero(); trace_len],
            }),
        })
    }

    fn build_ops(
        mesh: &Mesh<T>,
        e: usize,
        geom: &ElementGeometry<T>,
        nodes: &[T],
        d: Degrees,
    ) -> Result<ElementOps<T>> {
        match mesh.elements[e].material {
            Material::Fluid { c } => {
                let tp = ModalTables::new(d.psi, geom, nodes);
                let tq = ModalTables::new(d.p, geom, nodes);
                Ok(ElementOps::Fluid(Arc::new(AcousticElementOps::new(e, geom, &tp, &tq, c)?)))
            }
            Material::Solid { rho, lambda, mu } => {
                let tu = ModalTables::new(d.u, geom, nodes);
                let tv = ModalTables::new(d.v, geom, nodes);
                let (_, j) = mesh.map_point(e, T::zero(), T::zero());
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                let metrics = [j[1][1] / det, -j[0][1] / det, -j[1][0] / det, j[0][0] / det];
                let row = curl_replacement_row(d.u, metrics);
                let mat = ElasticMaterial { rho, lambda, mu };
                Ok(ElementOps::Solid(Arc::new(ElasticElementOps::new(e, geom, &tu, &tv, mat, row)?)))
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> T {
        self.mesh.h
    }

    pub fn num_quad(&self) -> usize {
        self.nq
    }

    pub fn element_ops(&self, e: usize) -> &ElementOps<T> {
        &self.ops[e]
    }

    pub fn geometry(&self, e: usize) -> &ElementGeometry<T> {
        &self.geoms[e]
    }

    /// Coefficient range of element `e`.
    pub fn block(&self, e: usize) -> std::ops::Range<usize> {
        let end = if e + 1 < self.offsets.len() { self.offsets[e + 1] } else { self.dim };
        self.offsets[e]..end
    }

    pub fn zero_state(&self) -> FieldState<T> {
        FieldState { t: T::zero(), data: vec![T::zero(); self.dim] }
    }

    /// Adds a point source; it drives the rate equation of whichever
    /// medium contains it.
    pub fn add_source(&mut self, pulse: PointSource<T>) -> Result<()> {
        let (element, r) = self.mesh.locate(pulse.location).ok_or_else(|| {
            Error::Configuration(format!("source at {:?} is outside the mesh", pulse.location))
        })?;
        let weights = match &self.ops[element] {
            ElementOps::Fluid(o) => {
                let (phi, _, _) = tensor_eval(self.degrees.p, r[0], r[1]);
                let lu = Lu::factor(&o.mass_p).map_err(|_| Error::Assembly {
                    element,
                    reason: "rate mass matrix singular".into(),
                })?;
                let mut w = vec![T::zero(); o.n_psi];
                w.extend(lu.solve(&phi));
                w
            }
            ElementOps::Solid(o) => {
                let (phi, _, _) = tensor_eval(self.degrees.v, r[0], r[1]);
                let mut load: Vec<T> = phi.iter().map(|&f| f * pulse.direction[0]).collect();
                load.extend(phi.iter().map(|&f| f * pulse.direction[1]));
                let lu = Lu::factor(&o.mass_v).map_err(|_| Error::Assembly {
                    element,
                    reason: "velocity mass matrix singular".into(),
                })?;
                let mut w = vec![T::zero(); 2 * o.n_u];
                w.extend(lu.solve(&load));
                w
            }
        };
        self.sources.push(SourceTerm { element, pulse, weights });
        Ok(())
    }

    /// Point evaluation of a field at a physical location.
    pub fn probe(&self, location: [T; 2], field: ReceiverField) -> Result<Probe<T>> {
        let (element, r) = self.mesh.locate(location).ok_or_else(|| {
            Error::Configuration(format!("receiver at {location:?} is outside the mesh"))
        })?;
        let base = self.offsets[element];
        let mismatch = || {
            Error::Configuration(format!(
                "receiver field {field:?} does not exist in the medium at {location:?}"
            ))
        };
        let (offset, degree) = match (&self.ops[element], field) {
            (ElementOps::Fluid(_), ReceiverField::Psi) => (base, self.degrees.psi),
            (ElementOps::Fluid(o), ReceiverField::P) => (base + o.n_psi, self.degrees.p),
            (ElementOps::Solid(_), ReceiverField::U1) => (base, self.degrees.u),
            (ElementOps::Solid(o), ReceiverField::U2) => (base + o.n_u, self.degrees.u),
            _ => return Err(mismatch()),
        };
        let (phi, _, _) = tensor_eval(degree, r[0], r[1]);
        Ok(Probe { element, field, offset, phi })
    }

    /// Writes element traces into `traces`.
    fn gather_traces(&self, y: &[T], traces: &mut [T]) {
        let nf = 4 * self.nq;
        let blocks = split_blocks(traces, &self.trace_offsets, self.trace_len);
        blocks.into_par_iter().enumerate().for_each(|(e, tr)| {
            let x = &y[self.block(e)];
            match &self.ops[e] {
                ElementOps::Fluid(o) => {
                    let (psi, p) = x.split_at(o.n_psi);
                    let (tp, tg) = tr.split_at_mut(nf);
                    o.traces(psi, p, tp, tg);
                }
                ElementOps::Solid(o) => {
                    let (u, v) = x.split_at(2 * o.n_u);
                    let (tv, ts) = tr.split_at_mut(2 * nf);
                    o.traces(u, v, tv, ts);
                }
            }
        });
    }

    fn fluid_at(&self, buf: &[T], e: usize, i: usize) -> FluidTrace<T> {
        let o = self.trace_offsets[e];
        FluidTrace { p: buf[o + i], g: buf[o + 4 * self.nq + i] }
    }

    fn set_fluid(&self, buf: &mut [T], e: usize, i: usize, s: FluidTrace<T>) {
        let o = self.trace_offsets[e];
        buf[o + i] = s.p;
        buf[o + 4 * self.nq + i] = s.g;
    }

    fn solid_at(&self, buf: &[T], e: usize, i: usize) -> SolidTrace<T> {
        let o = self.trace_offsets[e];
        let nf = 4 * self.nq;
        SolidTrace {
            v: [buf[o + i], buf[o + nf + i]],
            s: [buf[o + 2 * nf + i], buf[o + 3 * nf + i]],
        }
    }

    fn set_solid(&self, buf: &mut [T], e: usize, i: usize, s: SolidTrace<T>) {
        let o = self.trace_offsets[e];
        let nf = 4 * self.nq;
        buf[o + i] = s.v[0];
        buf[o + nf + i] = s.v[1];
        buf[o + 2 * nf + i] = s.s[0];
        buf[o + 3 * nf + i] = s.s[1];
    }

    fn fluid_speed(&self, e: usize) -> T {
        match self.mesh.elements[e].material {
            Material::Fluid { c } => c,
            _ => unreachable!("fluid face on solid element"),
        }
    }

    fn solid_impedance(&self, e: usize) -> T {
        self.mesh.elements[e].material.impedance()
    }

    /// Star states at every element face point, from the traces.
    fn compute_stars(&self, t: T, traces: &[T], stars: &mut [T]) -> Result<()> {
        let nq = self.nq;
        let neg = |s: FluidTrace<T>| FluidTrace { p: s.p, g: -s.g };
        let negs = |s: SolidTrace<T>| SolidTrace { v: s.v, s: [-s.s[0], -s.s[1]] };
        for rec in &self.mesh.faces {
            let (eo, fo) = (rec.owner.element, rec.owner.face);
            for k in 0..nq {
                let io = fo * nq + k;
                let nb = rec.neighbor.map(|nb| {
                    let kk = if rec.reversed { nq - 1 - k } else { k };
                    (nb.element, nb.face * nq + kk)
                });
                match rec.kind {
                    FaceKind::FluidInterior => {
                        let (en, inb) = nb.expect("interior face without neighbor");
                        let a = self.fluid_at(traces, eo, io);
                        let b = neg(self.fluid_at(traces, en, inb));
                        let c = self.fluid_speed(eo).max(self.fluid_speed(en));
                        let s = interior_flux_fluid(a, b, c, self.flux.gamma_fluid);
                        self.set_fluid(stars, eo, io, s);
                        self.set_fluid(stars, en, inb, neg(s));
                    }
                    FaceKind::SolidInterior => {
                        let (en, inb) = nb.expect("interior face without neighbor");
                        let a = self.solid_at(traces, eo, io);
                        let b = negs(self.solid_at(traces, en, inb));
                        let z = self.solid_impedance(eo).max(self.solid_impedance(en));
                        let s = interior_flux_solid(a, b, z, self.flux.gamma_solid);
                        self.set_solid(stars, eo, io, s);
                        self.set_solid(stars, en, inb, negs(s));
                    }
                    FaceKind::FluidSolidInterface => {
                        let (en, inb) = nb.expect("interface face without neighbor");
                        let n = self.geoms[eo].normals[io];
                        let f = self.fluid_at(traces, eo, io);
                        let sol = negs(self.solid_at(traces, en, inb));
                        let st = interface_star(f, sol, n, &self.flux);
                        self.set_fluid(stars, eo, io, st.fluid);
                        self.set_solid(stars, en, inb, negs(st.solid));
                    }
                    FaceKind::Boundary => {
                        let tag = rec.boundary.expect("boundary face without tag");
                        let g = &self.geoms[eo];
                        let (x, n) = (g.face_x[io], g.normals[io]);
                        match self.mesh.elements[eo].region {
                            RegionKind::Fluid => {
                                let data = match &self.data {
                                    BoundaryData::Zero => FluidTrace::default(),
                                    BoundaryData::Exact(ex) => {
                                        let f = ex.fluid(x, t);
                                        FluidTrace {
                                            p: f.p,
                                            g: f.grad_psi[0] * n[0] + f.grad_psi[1] * n[1],
                                        }
                                    }
                                };
                                let tr = self.fluid_at(traces, eo, io);
                                let c = self.fluid_speed(eo);
                                let s =
                                    boundary_flux_fluid(tr, tag, data, c, self.flux.gamma_fluid)?;
                                self.set_fluid(stars, eo, io, s);
                            }
                            RegionKind::Solid => {
                                let data = match &self.data {
                                    BoundaryData::Zero => SolidTrace::default(),
                                    BoundaryData::Exact(ex) => {
                                        let f = ex.solid(x, t);
                                        let m = ex.solid_material();
                                        SolidTrace { v: f.v, s: traction(stress(f.grad_u, &m), n) }
                                    }
                                };
                                let tr = self.solid_at(traces, eo, io);
                                let z = self.solid_impedance(eo);
                                let s =
                                    boundary_flux_solid(tr, tag, data, z, self.flux.gamma_solid)?;
                                self.set_solid(stars, eo, io, s);
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn element_update(&self, t: T, y: &[T], stars: &[T], dy: &mut [T]) -> Result<()> {
        let nf = 4 * self.nq;
        let blocks = split_blocks(dy, &self.offsets, self.dim);
        blocks.into_par_iter().enumerate().for_each(|(e, d)| {
            let x = &y[self.block(e)];
            let st = &stars[self.trace_offsets[e]..];
            match &self.ops[e] {
                ElementOps::Fluid(o) => {
                    let (psi, p) = x.split_at(o.n_psi);
                    let (dpsi, dp) = d.split_at_mut(o.n_psi);
                    acoustic_rhs(o, psi, p, &st[..nf], &st[nf..2 * nf], dpsi, dp);
                }
                ElementOps::Solid(o) => {
                    let (u, v) = x.split_at(2 * o.n_u);
                    let (du, dv) = d.split_at_mut(2 * o.n_u);
                    elastic_rhs(o, u, v, &st[..2 * nf], &st[2 * nf..4 * nf], du, dv);
                }
            }
        });
        for src in &self.sources {
            let a = src.pulse.amplitude(t);
            let r = self.block(src.element);
            for (d, &w) in dy[r].iter_mut().zip(&src.weights) {
                *d += a * w;
            }
        }
        if let Some(i) = dy.iter().position(|x| !x.is_finite()) {
            let e = self.offsets.partition_point(|&o| o <= i) - 1;
            return Err(Error::Integration {
                time: t.as_f64(),
                reason: format!("non-finite derivative in element {e}"),
            });
        }
        Ok(())
    }

    /// Semi-discrete time derivative.
    pub fn rhs(&self, t: T, y: &[T], dy: &mut [T]) -> Result<()> {
        if y.len() != self.dim || dy.len() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "state length {} / {} does not match {}",
                y.len(),
                dy.len(),
                self.dim
            )));
        }
        let mut guard = self.work.lock().unwrap_or_else(|p| p.into_inner());
        let Workspace { traces, stars } = &mut *guard;
        self.gather_traces(y, traces);
        self.compute_stars(t, traces, stars)?;
        self.element_update(t, y, stars, dy)
    }

    pub fn energies(&self, y: &[T]) -> Energies<T> {
        let parts: Vec<(T, T)> = (0..self.ops.len())
            .into_par_iter()
            .map(|e| {
                let x = &y[self.block(e)];
                match &self.ops[e] {
                    ElementOps::Fluid(o) => {
                        let (psi, p) = x.split_at(o.n_psi);
                        (o.energy(psi, p), T::zero())
                    }
                    ElementOps::Solid(o) => {
                        let (u, v) = x.split_at(2 * o.n_u);
                        (T::zero(), o.energy(u, v))
                    }
                }
            })
            .collect();
        let acoustic: T = parts.iter().map(|p| p.0).sum();
        let elastic: T = parts.iter().map(|p| p.1).sum();
        Energies { acoustic, elastic, total: acoustic + elastic }
    }

    /// Energy rate from the element operators, `dE/dt` along `rhs`.
    pub fn energy_rate(&self, t: T, y: &[T]) -> Result<T> {
        let mut dy = vec![T::zero(); self.dim];
        self.rhs(t, y, &mut dy)?;
        let mut total = T::zero();
        for e in 0..self.ops.len() {
            let r = self.block(e);
            let (x, d) = (&y[r.clone()], &dy[r]);
            total += match &self.ops[e] {
                ElementOps::Fluid(o) => {
                    let n = o.n_psi;
                    bilinear(&o.stiffness, &x[..n], &d[..n]) + bilinear(&o.mass_p, &x[n..], &d[n..])
                }
                ElementOps::Solid(o) => {
                    let n = 2 * o.n_u;
                    bilinear(&o.stiffness, &x[..n], &d[..n]) + bilinear(&o.mass_v, &x[n..], &d[n..])
                }
            };
        }
        Ok(total)
    }

    /// Energy rate as the quadrature of the face terms.
    pub fn face_energy_rate(&self, t: T, y: &[T]) -> Result<T> {
        let mut traces = vec![T::zero(); self.trace_len];
        let mut stars = vec![T::zero(); self.trace_len];
        self.gather_traces(y, &mut traces);
        self.compute_stars(t, &traces, &mut stars)?;
        let mut total = T::zero();
        for e in 0..self.ops.len() {
            let w = &self.geoms[e].face_w;
            for (i, &wi) in w.iter().enumerate() {
                total += wi
                    * match self.ops[e] {
                        ElementOps::Fluid(_) => fluid_face_energy_rate(
                            self.fluid_at(&traces, e, i),
                            self.fluid_at(&stars, e, i),
                        ),
                        ElementOps::Solid(_) => solid_face_energy_rate(
                            self.solid_at(&traces, e, i),
                            self.solid_at(&stars, e, i),
                        ),
                    };
            }
        }
        Ok(total)
    }

    /// Quadrature of `alpha (n.s.n - p)^2 + beta (g - v.n)^2` over the fluid-solid interface.
    pub fn interface_dissipation(&self, y: &[T]) -> T {
        let nq = self.nq;
        let mut traces = vec![T::zero(); self.trace_len];
        self.gather_traces(y, &mut traces);
        let negs = |s: SolidTrace<T>| SolidTrace { v: s.v, s: [-s.s[0], -s.s[1]] };
        let mut total = T::zero();
        for rec in self.mesh.faces.iter().filter(|r| r.kind == FaceKind::FluidSolidInterface) {
            let (eo, fo) = (rec.owner.element, rec.owner.face);
            let nb = rec.neighbor.expect("interface face without neighbor");
            for k in 0..nq {
                let io = fo * nq + k;
                let kk = if rec.reversed { nq - 1 - k } else { k };
                let g = &self.geoms[eo];
                let f = self.fluid_at(&traces, eo, io);
                let s = negs(self.solid_at(&traces, nb.element, nb.face * nq + kk));
                total += g.face_w[io] * interface_dissipation(f, s, g.normals[io], &self.flux);
            }
        }
        total
    }

    /// L2 projection of an exact solution at time `t`.
    pub fn project(&self, exact: &dyn ExactSolution<T>, t: T) -> Result<FieldState<T>> {
        let nq = self.degrees.max() + 3;
        let rule = gauss_rule::<T>(nq)?;
        let blocks: Vec<Vec<T>> = (0..self.ops.len())
            .into_par_iter()
            .map(|e| -> Result<Vec<T>> {
                let g = self.mesh.geometry(e, &rule.nodes, &rule.weights)?;
                let pts = point_values(&g, &rule.nodes);
                match &self.ops[e] {
                    ElementOps::Fluid(_) => {
                        let vals: Vec<_> = g.vol_x.iter().map(|&x| exact.fluid(x, t)).collect();
                        let mut out = l2_fit(e, &g, &pts, self.degrees.psi, |i| vals[i].psi)?;
                        out.extend(l2_fit(e, &g, &pts, self.degrees.p, |i| vals[i].p)?);
                        Ok(out)
                    }
                    ElementOps::Solid(_) => {
                        let vals: Vec<_> = g.vol_x.iter().map(|&x| exact.solid(x, t)).collect();
                        let (du, dv) = (self.degrees.u, self.degrees.v);
                        let mut out = l2_fit(e, &g, &pts, du, |i| vals[i].u[0])?;
                        out.extend(l2_fit(e, &g, &pts, du, |i| vals[i].u[1])?);
                        out.extend(l2_fit(e, &g, &pts, dv, |i| vals[i].v[0])?);
                        out.extend(l2_fit(e, &g, &pts, dv, |i| vals[i].v[1])?);
                        Ok(out)
                    }
                }
            })
            .collect::<Result<_>>()?;
        Ok(FieldState { t, data: blocks.concat() })
    }

    /// L2 norms of `numeric - exact` over each medium.
    pub fn l2_errors(&self, y: &[T], exact: &dyn ExactSolution<T>, t: T) -> Result<FieldErrors> {
        self.l2_norms(y, Some(exact), t)
    }

    /// L2 norms of the discrete fields themselves.
    pub fn l2_norms_of(&self, y: &[T]) -> Result<FieldErrors> {
        self.l2_norms(y, None, T::zero())
    }

    fn l2_norms(
        &self,
        y: &[T],
        exact: Option<&dyn ExactSolution<T>>,
        t: T,
    ) -> Result<FieldErrors> {
        let nq = self.degrees.max() + 3;
        let rule = gauss_rule::<T>(nq)?;
        let parts: Vec<[f64; 4]> = (0..self.ops.len())
            .into_par_iter()
            .map(|e| -> Result<[f64; 4]> {
                let g = self.mesh.geometry(e, &rule.nodes, &rule.weights)?;
                let x = &y[self.block(e)];
                let mut acc = [T::zero(); 4];
                for (pt, (&xp, &w)) in g.vol_x.iter().zip(&g.vol_jw).enumerate() {
                    let (a, b) = (rule.nodes[pt % nq], rule.nodes[pt / nq]);
                    match &self.ops[e] {
                        ElementOps::Fluid(o) => {
                            let psi = eval_modal(self.degrees.psi, a, b, &x[..o.n_psi]);
                            let p = eval_modal(self.degrees.p, a, b, &x[o.n_psi..]);
                            let (ep, eq) = match exact {
                                Some(ex) => {
                                    let f = ex.fluid(xp, t);
                                    (psi - f.psi, p - f.p)
                                }
                                None => (psi, p),
                            };
                            acc[0] += w * ep * ep;
                            acc[1] += w * eq * eq;
                        }
                        ElementOps::Solid(o) => {
                            let (nu, nv) = (o.n_u, o.n_v);
                            let u = [
                                eval_modal(self.degrees.u, a, b, &x[..nu]),
                                eval_modal(self.degrees.u, a, b, &x[nu..2 * nu]),
                            ];
                            let v = [
                                eval_modal(self.degrees.v, a, b, &x[2 * nu..2 * nu + nv]),
                                eval_modal(self.degrees.v, a, b, &x[2 * nu + nv..]),
                            ];
                            let f = exact.map(|ex| ex.solid(xp, t)).unwrap_or_default();
                            for c in 0..2 {
                                let (du, dv) = (u[c] - f.u[c], v[c] - f.v[c]);
                                acc[2] += w * du * du;
                                acc[3] += w * dv * dv;
                            }
                        }
                    }
                }
                Ok(acc.map(|a| a.as_f64()))
            })
            .collect::<Result<_>>()?;
        let mut tot = [0.0f64; 4];
        for p in parts {
            for i in 0..4 {
                tot[i] += p[i];
            }
        }
        Ok(FieldErrors {
            psi: tot[0].sqrt(),
            p: tot[1].sqrt(),
            u: tot[2].sqrt(),
            v: tot[3].sqrt(),
        })
    }

    /// Field values on a uniform `samples x samples` reference grid in every
    /// element, as CSV rows `x1,x2,psi,p,u1,u2,v1,v2`. Fields absent from a
    /// medium are written as `nan`.
    pub fn write_snapshot<W: Write>(&self, y: &[T], samples: usize, mut w: W) -> Result<()> {
        writeln!(w, "x1,x2,psi,p,u1,u2,v1,v2")?;
        let s = samples.max(2);
        let d = self.degrees;
        for e in 0..self.ops.len() {
            let x = &y[self.block(e)];
            for j in 0..s {
                for i in 0..s {
                    let a = T::lit(-1.0 + 2.0 * i as f64 / (s - 1) as f64);
                    let b = T::lit(-1.0 + 2.0 * j as f64 / (s - 1) as f64);
                    let (pt, _) = self.mesh.map_point(e, a, b);
                    let vals: [f64; 6] = match &self.ops[e] {
                        ElementOps::Fluid(o) => [
                            eval_modal(d.psi, a, b, &x[..o.n_psi]).as_f64(),
                            eval_modal(d.p, a, b, &x[o.n_psi..]).as_f64(),
                            f64::NAN,
                            f64::NAN,
                            f64::NAN,
                            f64::NAN,
                        ],
                        ElementOps::Solid(o) => {
                            let (nu, nv) = (o.n_u, o.n_v);
                            [
                                f64::NAN,
                                f64::NAN,
                                eval_modal(d.u, a, b, &x[..nu]).as_f64(),
                                eval_modal(d.u, a, b, &x[nu..2 * nu]).as_f64(),
                                eval_modal(d.v, a, b, &x[2 * nu..2 * nu + nv]).as_f64(),
                                eval_modal(d.v, a, b, &x[2 * nu + nv..]).as_f64(),
                            ]
                        }
                    };
                    write!(w, "{:.12e},{:.12e}", pt[0].as_f64(), pt[1].as_f64())?;
                    for v in vals {
                        write!(w, ",{v:.12e}")?;
                    }
                    writeln!(w)?;
                }
            }
        }
        Ok(())
    }
}

fn bilinear<T: Real>(a: &Matrix<T>, x: &[T], y: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..a.rows() {
        s += x[i] * crate::linalg::dot(a.row(i), y);
    }
    s
}

/// Value of a modal expansion at reference point `(a, b)`.
pub fn eval_modal<T: Real>(degree: usize, a: T, b: T, coeffs: &[T]) -> T {
    let (phi, _, _) = tensor_eval(degree, a, b);
    crate::linalg::dot(&phi, coeffs)
}

fn point_values<T: Real>(g: &ElementGeometry<T>, nodes: &[T]) -> Vec<(T, T)> {
    let nq = nodes.len();
    (0..g.vol_x.len()).map(|pt| (nodes[pt % nq], nodes[pt / nq])).collect()
}

fn l2_fit<T: Real>(
    e: usize,
    g: &ElementGeometry<T>,
    pts: &[(T, T)],
    degree: usize,
    f: impl Fn(usize) -> T,
) -> Result<Vec<T>> {
    let n = (degree + 1) * (degree + 1);
    let mut m = Matrix::zeros(n, n);
    let mut rhs = vec![T::zero(); n];
    for (pt, &(a, b)) in pts.iter().enumerate() {
        let (phi, _, _) = tensor_eval(degree, a, b);
        let w = g.vol_jw[pt];
        let fv = f(pt);
        for i in 0..n {
            rhs[i] += w * phi[i] * fv;
            for j in 0..n {
                m[(i, j)] += w * phi[i] * phi[j];
            }
        }
    }
    let lu = Lu::factor(&m).map_err(|_| Error::Assembly {
        element: e,
        reason: "projection mass matrix singular".into(),
    })?;
    Ok(lu.solve(&rhs))
}

impl<T: Real> System<T> for Solver<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn rhs(&self, t: T, y: &[T], dy: &mut [T]) -> Result<()> {
        Solver::rhs(self, t, y, dy)
    }
}
