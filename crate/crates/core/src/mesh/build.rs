use super::{
    ElementFace, ElementMap, Element, FaceKind, FaceRecord, Material, Mesh, MeshRegion, PatchMap,
    RadialProfile, Curve, BoundaryTag, RegionKind, face_reference_point,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Axis-aligned box `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect<T> {
    pub x0: T,
    pub x1: T,
    pub y0: T,
    pub y1: T,
}

impl<T: Real> Rect<T> {
    pub fn new(x0: T, x1: T, y0: T, y1: T) -> Self {
        Self { x0, x1, y0, y1 }
    }
}

/// Boundary tags of one region's outer sides. `far` is the side opposite
/// the interface; for annular regions `left`/`right` are unused.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxBoundary {
    pub left: BoundaryTag,
    pub right: BoundaryTag,
    pub far: BoundaryTag,
}

impl BoxBoundary {
    pub fn uniform(tag: BoundaryTag) -> Self {
        Self { left: tag, right: tag, far: tag }
    }
}

/// Materials and boundary tags shared by the mesh builders.
#[derive(Clone, Debug, PartialEq)]
pub struct CoupledSetup<T> {
    pub fluid: Material<T>,
    pub solid: Material<T>,
    pub fluid_boundary: BoxBoundary,
    pub solid_boundary: BoxBoundary,
}

impl<T: Real> Default for CoupledSetup<T> {
    fn default() -> Self {
        Self {
            fluid: Material::fluid(T::one()),
            solid: Material::solid(T::one(), T::one(), T::one()),
            fluid_boundary: BoxBoundary::uniform(BoundaryTag::Dirichlet),
            solid_boundary: BoxBoundary::uniform(BoundaryTag::Dirichlet),
        }
    }
}

/// Logical `ni x nj` block of elements; element `(i, j)` has id
/// `offset + i + ni j`.
struct Block {
    region: RegionKind,
    ni: usize,
    nj: usize,
    periodic_j: bool,
    offset: usize,
    /// Tag per local side (0..4); `None` for sides glued elsewhere.
    sides: [Option<BoundaryTag>; 4],
}

impl Block {
    fn id(&self, i: usize, j: usize) -> usize {
        self.offset + i + self.ni * j
    }

    /// Elements along a side, in increasing face-parameter order.
    fn side_elements(&self, side: usize) -> Vec<usize> {
        match side {
            0 => (0..self.ni).map(|i| self.id(i, 0)).collect(),
            2 => (0..self.ni).map(|i| self.id(i, self.nj - 1)).collect(),
            1 => (0..self.nj).map(|j| self.id(self.ni - 1, j)).collect(),
            3 => (0..self.nj).map(|j| self.id(0, j)).collect(),
            _ => unreachable!(),
        }
    }

    fn push_faces(&self, faces: &mut Vec<FaceRecord>) {
        let interior = match self.region {
            RegionKind::Fluid => FaceKind::FluidInterior,
            RegionKind::Solid => FaceKind::SolidInterior,
        };
        for j in 0..self.nj {
            for i in 0..self.ni {
                let e = self.id(i, j);
                let mut boundary = |face: usize| {
                    if let Some(tag) = self.sides[face] {
                        faces.push(FaceRecord {
                            kind: FaceKind::Boundary,
                            owner: ElementFace { element: e, face },
                            neighbor: None,
                            reversed: false,
                            boundary: Some(tag),
                        });
                    }
                };
                if j == 0 && !self.periodic_j {
                    boundary(0);
                }
                if i == self.ni - 1 {
                    boundary(1);
                }
                if j == self.nj - 1 && !self.periodic_j {
                    boundary(2);
                }
                if i == 0 {
                    boundary(3);
                }
                if i + 1 < self.ni {
                    faces.push(interior_face(interior, e, 1, self.id(i + 1, j), 3));
                }
                if j + 1 < self.nj {
                    faces.push(interior_face(interior, e, 2, self.id(i, j + 1), 0));
                } else if self.periodic_j {
                    faces.push(interior_face(interior, e, 2, self.id(i, 0), 0));
                }
            }
        }
    }
}

fn interior_face(kind: FaceKind, a: usize, fa: usize, b: usize, fb: usize) -> FaceRecord {
    FaceRecord {
        kind,
        owner: ElementFace { element: a, face: fa },
        neighbor: Some(ElementFace { element: b, face: fb }),
        reversed: false,
        boundary: None,
    }
}

fn glue(faces: &mut Vec<FaceRecord>, fluid: &Block, fluid_side: usize, solid: &Block, solid_side: usize) {
    let f = fluid.side_elements(fluid_side);
    let s = solid.side_elements(solid_side);
    assert_eq!(f.len(), s.len(), "interface element counts differ");
    for (&a, &b) in f.iter().zip(&s) {
        faces.push(FaceRecord {
            kind: FaceKind::FluidSolidInterface,
            owner: ElementFace { element: a, face: fluid_side },
            neighbor: Some(ElementFace { element: b, face: solid_side }),
            reversed: false,
            boundary: None,
        });
    }
}

/// Sets `reversed` from physical face endpoints and rejects non-matching faces.
fn orient_faces<T: Real>(mesh: &mut Mesh<T>) -> Result<()> {
    let ends = |mesh: &Mesh<T>, ef: ElementFace| {
        let one = T::one();
        let (a0, b0) = face_reference_point(ef.face, -one);
        let (a1, b1) = face_reference_point(ef.face, one);
        (mesh.map_point(ef.element, a0, b0).0, mesh.map_point(ef.element, a1, b1).0)
    };
    let close = |p: [T; 2], q: [T; 2], scale: T| {
        (p[0] - q[0]).abs() + (p[1] - q[1]).abs() <= T::lit(1e-9) * scale
    };
    let mut faces = std::mem::take(&mut mesh.faces);
    for f in faces.iter_mut() {
        let Some(nb) = f.neighbor else { continue };
        let (o0, o1) = ends(mesh, f.owner);
        let (n0, n1) = ends(mesh, nb);
        let scale = T::one() + o0[0].abs() + o0[1].abs() + o1[0].abs() + o1[1].abs();
        if close(o0, n0, scale) && close(o1, n1, scale) {
            f.reversed = false;
        } else if close(o0, n1, scale) && close(o1, n0, scale) {
            f.reversed = true;
        } else {
            return Err(Error::Geometry(format!(
                "faces {:?} and {:?} do not coincide",
                f.owner, nb
            )));
        }
    }
    mesh.faces = faces;
    Ok(())
}

fn finish<T: Real>(mut mesh: Mesh<T>, blocks: &[Block]) -> Result<Mesh<T>> {
    for b in blocks {
        let ids: Vec<usize> = (0..b.ni * b.nj).map(|k| b.offset + k).collect();
        match b.region {
            RegionKind::Fluid => mesh.fluid.elements.extend(ids),
            RegionKind::Solid => mesh.solid.elements.extend(ids),
        }
    }
    orient_faces(&mut mesh)?;
    Ok(mesh)
}

fn check_materials<T: Real>(setup: &CoupledSetup<T>) -> Result<()> {
    setup.fluid.validate()?;
    setup.solid.validate()?;
    if setup.fluid.kind() != RegionKind::Fluid || setup.solid.kind() != RegionKind::Solid {
        return Err(Error::InvalidArgument("fluid/solid materials swapped".into()));
    }
    Ok(())
}

fn empty_mesh<T: Real>(h: T) -> Mesh<T> {
    Mesh {
        nodes: Vec::new(),
        node_fixed: Vec::new(),
        patches: Vec::new(),
        elements: Vec::new(),
        faces: Vec::new(),
        fluid: MeshRegion { kind: RegionKind::Fluid, elements: Vec::new() },
        solid: MeshRegion { kind: RegionKind::Solid, elements: Vec::new() },
        h,
    }
}

/// Which box lies on top, and the interface height.
fn stacking<T: Real>(fluid: &Rect<T>, solid: &Rect<T>) -> Result<bool> {
    let tol = T::lit(1e-12) * (T::one() + fluid.x1.abs() + fluid.x0.abs());
    if (fluid.x0 - solid.x0).abs() > tol || (fluid.x1 - solid.x1).abs() > tol {
        return Err(Error::Geometry("boxes must span the same x1 range".into()));
    }
    if !(fluid.x1 > fluid.x0 && fluid.y1 > fluid.y0 && solid.y1 > solid.y0) {
        return Err(Error::Geometry("degenerate box".into()));
    }
    if (fluid.y0 - solid.y1).abs() <= tol {
        Ok(true)
    } else if (fluid.y1 - solid.y0).abs() <= tol {
        Ok(false)
    } else {
        Err(Error::Geometry("fluid and solid boxes do not share an edge".into()))
    }
}

/// Side tags for a box block; the interface side is left unset.
fn box_sides(bc: BoxBoundary, interface_at_bottom: bool) -> [Option<BoundaryTag>; 4] {
    if interface_at_bottom {
        [None, Some(bc.right), Some(bc.far), Some(bc.left)]
    } else {
        [Some(bc.far), Some(bc.right), None, Some(bc.left)]
    }
}

/// Uniform `n x n` Cartesian grids in two stacked boxes.
pub fn build_cartesian_coupled<T: Real>(
    n: usize,
    fluid: Rect<T>,
    solid: Rect<T>,
    setup: &CoupledSetup<T>,
) -> Result<Mesh<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one element per side".into()));
    }
    check_materials(setup)?;
    let fluid_on_top = stacking(&fluid, &solid)?;
    let h = (fluid.x1 - fluid.x0) / T::from_usize_lossy(n);
    let mut mesh = empty_mesh(h);
    let mut blocks = Vec::new();
    for (region, rect) in [(RegionKind::Fluid, fluid), (RegionKind::Solid, solid)] {
        let (material, bc, iface_bottom) = match region {
            RegionKind::Fluid => (setup.fluid, setup.fluid_boundary, fluid_on_top),
            RegionKind::Solid => (setup.solid, setup.solid_boundary, !fluid_on_top),
        };
        let node0 = mesh.nodes.len();
        for j in 0..=n {
            for i in 0..=n {
                let x = rect.x0 + (rect.x1 - rect.x0) * T::from_usize_lossy(i) / T::from_usize_lossy(n);
                let y = rect.y0 + (rect.y1 - rect.y0) * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                mesh.nodes.push([x, y]);
                mesh.node_fixed.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let offset = mesh.elements.len();
        for j in 0..n {
            for i in 0..n {
                let c = node0 + i + (n + 1) * j;
                mesh.elements.push(Element {
                    region,
                    map: ElementMap::Bilinear { nodes: [c, c + 1, c + n + 2, c + n + 1] },
                    material,
                });
            }
        }
        blocks.push(Block {
            region,
            ni: n,
            nj: n,
            periodic_j: false,
            offset,
            sides: box_sides(bc, iface_bottom),
        });
    }
    for b in &blocks {
        b.push_faces(&mut mesh.faces);
    }
    let (fs, ss) = if fluid_on_top { (0, 2) } else { (2, 0) };
    glue(&mut mesh.faces, &blocks[0], fs, &blocks[1], ss);
    finish(mesh, &blocks)
}

/// Stacked boxes whose shared edge is `y = y_i + amplitude sin(n_wave pi x1)`;
/// each region blends linearly from the curve to its straight far side.
pub fn build_sinusoidal_interface<T: Real>(
    n_wave: usize,
    amplitude: T,
    fluid: Rect<T>,
    solid: Rect<T>,
    n: usize,
    setup: &CoupledSetup<T>,
) -> Result<Mesh<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one element per side".into()));
    }
    check_materials(setup)?;
    let fluid_on_top = stacking(&fluid, &solid)?;
    let yi = if fluid_on_top { fluid.y0 } else { fluid.y1 };
    let curve = Curve::Sine { base: yi, amplitude, n_wave };
    // top must stay above bottom everywhere
    for rect in [fluid, solid] {
        let clearance = (rect.y1 - rect.y0) - amplitude.abs();
        if !(clearance > T::zero()) {
            return Err(Error::Geometry(format!(
                "interface amplitude {amplitude} folds the mesh"
            )));
        }
    }
    let h = (fluid.x1 - fluid.x0) / T::from_usize_lossy(n);
    let mut mesh = empty_mesh(h);
    let mut blocks = Vec::new();
    for (region, rect) in [(RegionKind::Fluid, fluid), (RegionKind::Solid, solid)] {
        let iface_bottom = (region == RegionKind::Fluid) == fluid_on_top;
        let (bottom, top) = if iface_bottom {
            (curve.clone(), Curve::Flat(rect.y1))
        } else {
            (Curve::Flat(rect.y0), curve.clone())
        };
        let patch = mesh.patches.len();
        mesh.patches.push(PatchMap::Vertical { bottom, top });
        let (material, bc) = match region {
            RegionKind::Fluid => (setup.fluid, setup.fluid_boundary),
            RegionKind::Solid => (setup.solid, setup.solid_boundary),
        };
        let offset = mesh.elements.len();
        let nf = T::from_usize_lossy(n);
        for j in 0..n {
            for i in 0..n {
                let xa = rect.x0 + (rect.x1 - rect.x0) * T::from_usize_lossy(i) / nf;
                let xb = rect.x0 + (rect.x1 - rect.x0) * T::from_usize_lossy(i + 1) / nf;
                let sa = T::from_usize_lossy(j) / nf;
                let sb = T::from_usize_lossy(j + 1) / nf;
                mesh.elements.push(Element {
                    region,
                    map: ElementMap::Patch { patch, lo: [xa, sa], hi: [xb, sb] },
                    material,
                });
            }
        }
        blocks.push(Block {
            region,
            ni: n,
            nj: n,
            periodic_j: false,
            offset,
            sides: box_sides(bc, iface_bottom),
        });
    }
    for b in &blocks {
        b.push_faces(&mut mesh.faces);
    }
    let (fs, ss) = if fluid_on_top { (0, 2) } else { (2, 0) };
    glue(&mut mesh.faces, &blocks[0], fs, &blocks[1], ss);
    finish(mesh, &blocks)
}

/// Two concentric rings meeting at `interface`: solid between `inner` and the
/// interface, fluid between the interface and `outer`. `xi` runs radially.
fn build_rings<T: Real>(
    inner: RadialProfile<T>,
    interface: RadialProfile<T>,
    outer: RadialProfile<T>,
    n_r_solid: usize,
    n_r_fluid: usize,
    n_theta: usize,
    setup: &CoupledSetup<T>,
) -> Result<Mesh<T>> {
    if n_r_solid == 0 || n_r_fluid == 0 || n_theta < 2 {
        return Err(Error::InvalidArgument("annulus needs n_r >= 1 and n_theta >= 2".into()));
    }
    check_materials(setup)?;
    let mut mesh = empty_mesh(T::zero());
    mesh.patches.push(PatchMap::Radial { inner, outer: interface.clone() });
    mesh.patches.push(PatchMap::Radial { inner: interface, outer });
    let two_pi = T::PI() + T::PI();
    let mut blocks = Vec::new();
    for (patch, region, nr) in [(0usize, RegionKind::Solid, n_r_solid), (1, RegionKind::Fluid, n_r_fluid)] {
        let (material, bc) = match region {
            RegionKind::Fluid => (setup.fluid, setup.fluid_boundary),
            RegionKind::Solid => (setup.solid, setup.solid_boundary),
        };
        let offset = mesh.elements.len();
        for j in 0..n_theta {
            for i in 0..nr {
                let sa = T::from_usize_lossy(i) / T::from_usize_lossy(nr);
                let sb = T::from_usize_lossy(i + 1) / T::from_usize_lossy(nr);
                let ta = two_pi * T::from_usize_lossy(j) / T::from_usize_lossy(n_theta);
                let tb = two_pi * T::from_usize_lossy(j + 1) / T::from_usize_lossy(n_theta);
                mesh.elements.push(Element {
                    region,
                    map: ElementMap::Patch { patch, lo: [sa, ta], hi: [sb, tb] },
                    material,
                });
            }
        }
        let sides = match region {
            RegionKind::Solid => [None, None, None, Some(bc.far)],
            RegionKind::Fluid => [None, Some(bc.far), None, None],
        };
        blocks.push(Block { region, ni: nr, nj: n_theta, periodic_j: true, offset, sides });
    }
    for b in &blocks {
        b.push_faces(&mut mesh.faces);
    }
    glue(&mut mesh.faces, &blocks[1], 3, &blocks[0], 1);
    // fluid elements first in region listing order does not matter
    let mut mesh = finish(mesh, &blocks)?;
    mesh.h = min_face_length(&mesh);
    Ok(mesh)
}

fn min_face_length<T: Real>(mesh: &Mesh<T>) -> T {
    let rule = crate::basis::gauss_rule::<T>(4).expect("rule");
    let mut h = T::infinity();
    for e in 0..mesh.elements.len() {
        if let Ok(g) = mesh.geometry(e, &rule.nodes, &rule.weights) {
            for f in 0..4 {
                h = h.min(g.face_length(f));
            }
        }
    }
    h
}

/// Solid ring `r0 <= r <= r1` inside a fluid ring `r1 <= r <= r2`, with exact
/// circular faces.
pub fn build_annulus_coupled<T: Real>(
    r0: T,
    r1: T,
    r2: T,
    n_r: usize,
    n_theta: usize,
    setup: &CoupledSetup<T>,
) -> Result<Mesh<T>> {
    if !(T::zero() < r0 && r0 < r1 && r1 < r2) {
        return Err(Error::Geometry(format!("radii {r0}, {r1}, {r2} out of order")));
    }
    build_rings(
        RadialProfile::Circle(r0),
        RadialProfile::Circle(r1),
        RadialProfile::Circle(r2),
        n_r,
        n_r,
        n_theta,
        setup,
    )
}

/// Ring pair whose interface is `r = 1 + sum_k A_k sin((k + 1) theta)`,
/// `k = 1..`, with the solid between `r_inner` and the interface and the fluid
/// out to `r_outer`.
#[allow(clippy::too_many_arguments)]
pub fn build_radial_interface<T: Real>(
    coefficients: &[T],
    r_inner: T,
    r_outer: T,
    n_r_solid: usize,
    n_r_fluid: usize,
    n_theta: usize,
    setup: &CoupledSetup<T>,
) -> Result<Mesh<T>> {
    let profile = RadialProfile::SineSeries { base: T::one(), coeffs: coefficients.to_vec() };
    if !(T::zero() < r_inner && r_inner < T::one() && T::one() < r_outer) {
        return Err(Error::Geometry("need 0 < r_inner < 1 < r_outer".into()));
    }
    // the radius must stay strictly between the two fixed circles
    let samples = 4096;
    let two_pi = T::PI() + T::PI();
    for k in 0..samples {
        let theta = two_pi * T::from_usize_lossy(k) / T::from_usize_lossy(samples);
        let (r, _) = profile.radius(theta);
        if !(r > r_inner && r < r_outer) {
            return Err(Error::Geometry(format!(
                "interface radius {r} at theta = {theta} crosses a fixed boundary"
            )));
        }
    }
    build_rings(
        RadialProfile::Circle(r_inner),
        profile,
        RadialProfile::Circle(r_outer),
        n_r_solid,
        n_r_fluid,
        n_theta,
        setup,
    )
}
