//! Quadrilateral meshes for coupled fluid/solid domains.
//!
//! Every element carries an analytic map from the reference square
//! `[-1, 1]^2` to physical space. Straight-sided elements are bilinear in
//! their four corner nodes; curved elements sample a smooth patch map (polar
//! blends, graded vertical blends) so that faces shared by two elements are
//! evaluated from the same global function and match to rounding.
//!
//! Local face numbering: 0 is `eta = -1`, 1 is `xi = +1`, 2 is `eta = +1`,
//! 3 is `xi = -1`. Faces are parameterized by `t` running with increasing
//! `xi` (faces 0, 2) or `eta` (faces 1, 3).

mod build;
mod geometry;

pub use build::{
    build_annulus_coupled, build_cartesian_coupled, build_radial_interface,
    build_sinusoidal_interface, BoxBoundary, CoupledSetup, Rect,
};
pub use geometry::ElementGeometry;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionKind {
    Fluid,
    Solid,
}

/// Per-element constant material.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Material<T> {
    Fluid { c: T },
    Solid { rho: T, lambda: T, mu: T },
}

impl<T: Real> Material<T> {
    pub fn fluid(c: T) -> Self {
        Material::Fluid { c }
    }

    pub fn solid(rho: T, lambda: T, mu: T) -> Self {
        Material::Solid { rho, lambda, mu }
    }

    pub fn kind(&self) -> RegionKind {
        match self {
            Material::Fluid { .. } => RegionKind::Fluid,
            Material::Solid { .. } => RegionKind::Solid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Material::Fluid { c } => c > T::zero(),
            Material::Solid { rho, lambda, mu } => {
                rho > T::zero() && mu > T::zero() && lambda + mu + mu > T::zero()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("inadmissible material {self:?}")))
        }
    }

    /// Fastest wave speed.
    pub fn max_speed(&self) -> T {
        match *self {
            Material::Fluid { c } => c,
            Material::Solid { rho, lambda, mu } => ((lambda + mu + mu) / rho).sqrt(),
        }
    }

    /// Acoustic speed `c` for fluids, `rho c_p` for solids.
    pub fn impedance(&self) -> T {
        match *self {
            Material::Fluid { c } => c,
            Material::Solid { rho, .. } => rho * self.max_speed(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    /// Prescribed potential (fluid) or displacement (solid).
    Dirichlet,
    /// Prescribed normal derivative of the potential.
    Neumann,
    /// Prescribed traction, zero unless boundary data says otherwise.
    FreeTraction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceKind {
    FluidInterior,
    SolidInterior,
    FluidSolidInterface,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ElementFace {
    pub element: usize,
    pub face: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaceRecord {
    pub kind: FaceKind,
    /// Fluid element for interface faces.
    pub owner: ElementFace,
    pub neighbor: Option<ElementFace>,
    /// Neighbor face parameter runs opposite to the owner's.
    pub reversed: bool,
    pub boundary: Option<BoundaryTag>,
}

/// Radius as a function of angle.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialProfile<T> {
    Circle(T),
    /// `base + sum_k coeffs[k] sin((k + 2) theta)`
    SineSeries { base: T, coeffs: Vec<T> },
}

impl<T: Real> RadialProfile<T> {
    pub fn radius(&self, theta: T) -> (T, T) {
        match self {
            RadialProfile::Circle(r) => (*r, T::zero()),
            RadialProfile::SineSeries { base, coeffs } => {
                let mut r = *base;
                let mut dr = T::zero();
                for (k, &a) in coeffs.iter().enumerate() {
                    let m = T::from_usize_lossy(k + 2);
                    r += a * (m * theta).sin();
                    dr += a * m * (m * theta).cos();
                }
                (r, dr)
            }
        }
    }
}

/// Height as a function of `x1`.
#[derive(Clone, Debug, PartialEq)]
pub enum Curve<T> {
    Flat(T),
    /// `base + amplitude sin(n_wave pi x1)`
    Sine { base: T, amplitude: T, n_wave: usize },
}

impl<T: Real> Curve<T> {
    pub fn height(&self, x: T) -> (T, T) {
        match *self {
            Curve::Flat(y) => (y, T::zero()),
            Curve::Sine { base, amplitude, n_wave } => {
                let k = T::from_usize_lossy(n_wave) * T::PI();
                (base + amplitude * (k * x).sin(), amplitude * k * (k * x).cos())
            }
        }
    }
}

/// Smooth global map from logical coordinates to physical space.
#[derive(Clone, Debug, PartialEq)]
pub enum PatchMap<T> {
    /// Logical `(s, theta)`, `s` in [0, 1] blends `inner` to `outer`.
    Radial {
        inner: RadialProfile<T>,
        outer: RadialProfile<T>,
    },
    /// Logical `(x1, s)`, `s` in [0, 1] blends `bottom` to `top`.
    Vertical { bottom: Curve<T>, top: Curve<T> },
}

impl<T: Real> PatchMap<T> {
    /// Physical point and derivative `[[dx/da, dx/db], [dy/da, dy/db]]`.
    pub fn eval(&self, a: T, b: T) -> ([T; 2], [[T; 2]; 2]) {
        match self {
            PatchMap::Radial { inner, outer } => {
                let (s, theta) = (a, b);
                let (ri, dri) = inner.radius(theta);
                let (ro, dro) = outer.radius(theta);
                let r = ri + (ro - ri) * s;
                let r_s = ro - ri;
                let r_t = dri + (dro - dri) * s;
                let (sn, cs) = theta.sin_cos();
                (
                    [r * cs, r * sn],
                    [[r_s * cs, r_t * cs - r * sn], [r_s * sn, r_t * sn + r * cs]],
                )
            }
            PatchMap::Vertical { bottom, top } => {
                let (x, s) = (a, b);
                let (yb, dyb) = bottom.height(x);
                let (yt, dyt) = top.height(x);
                let y = yb + (yt - yb) * s;
                (
                    [x, y],
                    [[T::one(), T::zero()], [dyb + (dyt - dyb) * s, yt - yb]],
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ElementMap<T> {
    /// Corner node ids, counterclockwise from `(-1, -1)`.
    Bilinear { nodes: [usize; 4] },
    /// Tensor sub-box `[lo, hi]` of a patch's logical coordinates.
    Patch { patch: usize, lo: [T; 2], hi: [T; 2] },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Element<T> {
    pub region: RegionKind,
    pub map: ElementMap<T>,
    pub material: Material<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshRegion {
    pub kind: RegionKind,
    pub elements: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Mesh<T> {
    pub nodes: Vec<[T; 2]>,
    /// Nodes on block boundaries (outer boundary, interface) never move.
    pub node_fixed: Vec<bool>,
    pub patches: Vec<PatchMap<T>>,
    pub elements: Vec<Element<T>>,
    pub faces: Vec<FaceRecord>,
    pub fluid: MeshRegion,
    pub solid: MeshRegion,
    /// Nominal element size used by time-step rules.
    pub h: T,
}

/// Reference coordinates of face parameter `t`.
pub fn face_reference_point<T: Real>(face: usize, t: T) -> (T, T) {
    match face {
        0 => (t, -T::one()),
        1 => (T::one(), t),
        2 => (t, T::one()),
        3 => (-T::one(), t),
        _ => panic!("local face index {face} out of range"),
    }
}

impl<T: Real> Mesh<T> {
    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    /// Physical point and Jacobian `[[x_xi, x_eta], [y_xi, y_eta]]`.
    pub fn map_point(&self, e: usize, xi: T, eta: T) -> ([T; 2], [[T; 2]; 2]) {
        let quarter = T::lit(0.25);
        match &self.elements[e].map {
            ElementMap::Bilinear { nodes } => {
                let c = nodes.map(|n| self.nodes[n]);
                let (one, m) = (T::one(), T::lit(-1.0));
                let sx = [m, one, one, m];
                let sy = [m, m, one, one];
                let mut x = [T::zero(); 2];
                let mut jac = [[T::zero(); 2]; 2];
                for k in 0..4 {
                    let nx = one + sx[k] * xi;
                    let ny = one + sy[k] * eta;
                    let shape = quarter * nx * ny;
                    let dxi = quarter * sx[k] * ny;
                    let deta = quarter * nx * sy[k];
                    for a in 0..2 {
                        x[a] += shape * c[k][a];
                        jac[a][0] += dxi * c[k][a];
                        jac[a][1] += deta * c[k][a];
                    }
                }
                (x, jac)
            }
            ElementMap::Patch { patch, lo, hi } => {
                let half = T::lit(0.5);
                let da = (hi[0] - lo[0]) * half;
                let db = (hi[1] - lo[1]) * half;
                let a = lo[0] + (xi + T::one()) * da;
                let b = lo[1] + (eta + T::one()) * db;
                let (x, d) = self.patches[*patch].eval(a, b);
                (x, [[d[0][0] * da, d[0][1] * db], [d[1][0] * da, d[1][1] * db]])
            }
        }
    }

    pub fn geometry(&self, e: usize, nodes: &[T], weights: &[T]) -> Result<ElementGeometry<T>> {
        ElementGeometry::compute(self, e, nodes, weights)
    }

    pub fn count_faces(&self, kind: FaceKind) -> usize {
        self.faces.iter().filter(|f| f.kind == kind).count()
    }

    pub fn summary(&self) -> MeshSummary {
        MeshSummary {
            elements: self.elements.len(),
            fluid_elements: self.fluid.elements.len(),
            solid_elements: self.solid.elements.len(),
            h: self.h.as_f64(),
            fluid_interior_faces: self.count_faces(FaceKind::FluidInterior),
            solid_interior_faces: self.count_faces(FaceKind::SolidInterior),
            interface_faces: self.count_faces(FaceKind::FluidSolidInterface),
            boundary_faces: self.count_faces(FaceKind::Boundary),
        }
    }

    pub fn set_material(&mut self, e: usize, material: Material<T>) -> Result<()> {
        material.validate()?;
        if material.kind() != self.elements[e].region {
            return Err(Error::InvalidArgument(format!(
                "material {material:?} does not match region of element {e}"
            )));
        }
        self.elements[e].material = material;
        Ok(())
    }

    /// Finds an element containing `p` and its reference coordinates.
    pub fn locate(&self, p: [T; 2]) -> Option<(usize, [T; 2])> {
        let tol = T::lit(1e-10);
        for e in 0..self.elements.len() {
            if let Some(r) = self.inverse_map(e, p) {
                if r[0].abs() <= T::one() + tol && r[1].abs() <= T::one() + tol {
                    return Some((e, r));
                }
            }
        }
        None
    }

    /// Newton inversion of the element map; `None` if it fails to converge.
    pub fn inverse_map(&self, e: usize, p: [T; 2]) -> Option<[T; 2]> {
        let (mut xi, mut eta) = (T::zero(), T::zero());
        let lim = T::lit(3.0);
        for _ in 0..60 {
            let (x, j) = self.map_point(e, xi, eta);
            let rx = p[0] - x[0];
            let ry = p[1] - x[1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == T::zero() {
                return None;
            }
            let dxi = (j[1][1] * rx - j[0][1] * ry) / det;
            let deta = (-j[1][0] * rx + j[0][0] * ry) / det;
            xi += dxi;
            eta += deta;
            if xi.abs() > lim || eta.abs() > lim {
                return None;
            }
            if dxi.abs() + deta.abs() < T::epsilon() * T::lit(64.0) {
                return Some([xi, eta]);
            }
        }
        let (x, _) = self.map_point(e, xi, eta);
        let scale = T::one() + p[0].abs() + p[1].abs();
        if (x[0] - p[0]).abs() + (x[1] - p[1]).abs() < T::lit(1e-10) * scale {
            Some([xi, eta])
        } else {
            None
        }
    }

    /// Moves every non-fixed node by an independent uniform offset in
    /// `[-fraction h, fraction h]` per coordinate. Only straight-sided meshes
    /// can be perturbed.
    pub fn perturb_interior_nodes(&self, fraction: T, seed: u64) -> Result<Mesh<T>> {
        if !(fraction >= T::zero() && fraction < T::lit(0.5)) {
            return Err(Error::InvalidArgument(format!(
                "perturbation fraction {fraction} outside [0, 0.5)"
            )));
        }
        if self
            .elements
            .iter()
            .any(|e| !matches!(e.map, ElementMap::Bilinear { .. }))
        {
            return Err(Error::Unsupported(
                "node perturbation needs a straight-sided mesh".into(),
            ));
        }
        let mut out = self.clone();
        if fraction == T::zero() {
            return Ok(out);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amp = (fraction * self.h).as_f64();
        for (node, &fixed) in out.nodes.iter_mut().zip(&self.node_fixed) {
            // draw for every node so the sequence does not depend on which are fixed
            let dx: f64 = rng.gen_range(-1.0..=1.0);
            let dy: f64 = rng.gen_range(-1.0..=1.0);
            if !fixed {
                node[0] += T::lit(dx * amp);
                node[1] += T::lit(dy * amp);
            }
        }
        for e in 0..out.elements.len() {
            for &(xi, eta) in &[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
                let (_, j) = out.map_point(e, T::lit(xi), T::lit(eta));
                if j[0][0] * j[1][1] - j[0][1] * j[1][0] <= T::zero() {
                    return Err(Error::Geometry(format!(
                        "element {e} inverted after node perturbation"
                    )));
                }
            }
        }
        Ok(out)
    }
}

/// Counts for golden files and logs.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshSummary {
    pub elements: usize,
    pub fluid_elements: usize,
    pub solid_elements: usize,
    pub h: f64,
    pub fluid_interior_faces: usize,
    pub solid_interior_faces: usize,
    pub interface_faces: usize,
    pub boundary_faces: usize,
}

impl fmt::Display for MeshSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[mesh]")?;
        writeln!(f, "elements = {}", self.elements)?;
        writeln!(f, "fluid_elements = {}", self.fluid_elements)?;
        writeln!(f, "solid_elements = {}", self.solid_elements)?;
        writeln!(f, "h = {}", self.h)?;
        writeln!(f, "fluid_interior_faces = {}", self.fluid_interior_faces)?;
        writeln!(f, "solid_interior_faces = {}", self.solid_interior_faces)?;
        writeln!(f, "interface_faces = {}", self.interface_faces)?;
        write!(f, "boundary_faces = {}", self.boundary_faces)
    }
}
