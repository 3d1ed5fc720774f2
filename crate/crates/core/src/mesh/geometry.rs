use super::{face_reference_point, Mesh};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Geometric factors of one element at tensor Gauss points.
///
/// Volume points are ordered `a + nq b` with `a` along `xi`; face points are
/// ordered `face * nq + k`.
#[derive(Clone, Debug)]
pub struct ElementGeometry<T> {
    pub nq: usize,
    pub vol_x: Vec<[T; 2]>,
    pub vol_det: Vec<T>,
    /// Quadrature weight times Jacobian determinant.
    pub vol_jw: Vec<T>,
    /// `[xi_x1, xi_x2, eta_x1, eta_x2]`
    pub metrics: Vec<[T; 4]>,
    pub face_x: Vec<[T; 2]>,
    pub face_metrics: Vec<[T; 4]>,
    pub normals: Vec<[T; 2]>,
    /// Unit tangent `m = (-n2, n1)`.
    pub tangents: Vec<[T; 2]>,
    pub surface_jac: Vec<T>,
    /// Quadrature weight times surface Jacobian.
    pub face_w: Vec<T>,
}

impl<T: Real> ElementGeometry<T> {
    pub fn compute(mesh: &Mesh<T>, e: usize, nodes: &[T], weights: &[T]) -> Result<Self> {
        let nq = nodes.len();
        let mut g = ElementGeometry {
            nq,
            vol_x: Vec::with_capacity(nq * nq),
            vol_det: Vec::with_capacity(nq * nq),
            vol_jw: Vec::with_capacity(nq * nq),
            metrics: Vec::with_capacity(nq * nq),
            face_x: Vec::with_capacity(4 * nq),
            face_metrics: Vec::with_capacity(4 * nq),
            normals: Vec::with_capacity(4 * nq),
            tangents: Vec::with_capacity(4 * nq),
            surface_jac: Vec::with_capacity(4 * nq),
            face_w: Vec::with_capacity(4 * nq),
        };
        for b in 0..nq {
            for a in 0..nq {
                let (x, j) = mesh.map_point(e, nodes[a], nodes[b]);
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if !(det > T::zero()) {
                    return Err(Error::Geometry(format!(
                        "non-positive Jacobian {det} in element {e}"
                    )));
                }
                g.vol_x.push(x);
                g.vol_det.push(det);
                g.vol_jw.push(det * weights[a] * weights[b]);
                g.metrics.push([j[1][1] / det, -j[0][1] / det, -j[1][0] / det, j[0][0] / det]);
            }
        }
        for face in 0..4 {
            let sign = if face < 2 { T::one() } else { -T::one() };
            for k in 0..nq {
                let (xi, eta) = face_reference_point(face, nodes[k]);
                let (x, j) = mesh.map_point(e, xi, eta);
                let tan = if face % 2 == 0 {
                    [j[0][0], j[1][0]]
                } else {
                    [j[0][1], j[1][1]]
                };
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if !(det > T::zero()) {
                    return Err(Error::Geometry(format!(
                        "non-positive Jacobian {det} on face {face} of element {e}"
                    )));
                }
                g.face_metrics
                    .push([j[1][1] / det, -j[0][1] / det, -j[1][0] / det, j[0][0] / det]);
                let len = (tan[0] * tan[0] + tan[1] * tan[1]).sqrt();
                let n = [sign * tan[1] / len, -sign * tan[0] / len];
                g.face_x.push(x);
                g.normals.push(n);
                g.tangents.push([-n[1], n[0]]);
                g.surface_jac.push(len);
                g.face_w.push(len * weights[k]);
            }
        }
        Ok(g)
    }

    pub fn area(&self) -> T {
        self.vol_jw.iter().copied().sum()
    }

    pub fn face_length(&self, face: usize) -> T {
        self.face_w[face * self.nq..(face + 1) * self.nq].iter().copied().sum()
    }
}
