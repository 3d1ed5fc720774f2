//! Tensor Legendre modes tabulated at an element's quadrature points.

use crate::basis::tensor_eval;
use crate::mesh::{face_reference_point, ElementGeometry};
use crate::scalar::Real;

/// Row-major tables: entry `[pt * n + k]` belongs to mode `k` at point `pt`.
#[derive(Clone, Debug)]
pub struct ModalTables<T> {
    pub n: usize,
    pub vol_phi: Vec<T>,
    pub vol_grad: Vec<[T; 2]>,
    pub face_phi: Vec<T>,
    pub face_grad: Vec<[T; 2]>,
}

fn physical<T2>(dxi: T2, deta: T2, m: [T2; 4]) -> [T2; 2]
where
    T2: Real,
{
    [dxi * m[0] + deta * m[2], dxi * m[1] + deta * m[3]]
}

impl<T: Real> ModalTables<T> {
    pub fn new(degree: usize, geom: &ElementGeometry<T>, nodes: &[T]) -> Self {
        let nq = nodes.len();
        let n = (degree + 1) * (degree + 1);
        let mut t = ModalTables {
            n,
            vol_phi: Vec::with_capacity(nq * nq * n),
            vol_grad: Vec::with_capacity(nq * nq * n),
            face_phi: Vec::with_capacity(4 * nq * n),
            face_grad: Vec::with_capacity(4 * nq * n),
        };
        for b in 0..nq {
            for a in 0..nq {
                let (phi, dxi, deta) = tensor_eval(degree, nodes[a], nodes[b]);
                let m = geom.metrics[a + nq * b];
                t.vol_phi.extend_from_slice(&phi);
                t.vol_grad
                    .extend(dxi.iter().zip(&deta).map(|(&x, &y)| physical(x, y, m)));
            }
        }
        for face in 0..4 {
            for k in 0..nq {
                let (xi, eta) = face_reference_point(face, nodes[k]);
                let (phi, dxi, deta) = tensor_eval(degree, xi, eta);
                let m = geom.face_metrics[face * nq + k];
                t.face_phi.extend_from_slice(&phi);
                t.face_grad
                    .extend(dxi.iter().zip(&deta).map(|(&x, &y)| physical(x, y, m)));
            }
        }
        t
    }

    #[inline]
    pub fn num_vol(&self) -> usize {
        self.vol_phi.len() / self.n
    }

    #[inline]
    pub fn num_face(&self) -> usize {
        self.face_phi.len() / self.n
    }

    pub fn vol_phi_row(&self, pt: usize) -> &[T] {
        &self.vol_phi[pt * self.n..(pt + 1) * self.n]
    }

    pub fn vol_grad_row(&self, pt: usize) -> &[[T; 2]] {
        &self.vol_grad[pt * self.n..(pt + 1) * self.n]
    }

    pub fn face_phi_row(&self, pt: usize) -> &[T] {
        &self.face_phi[pt * self.n..(pt + 1) * self.n]
    }

    pub fn face_grad_row(&self, pt: usize) -> &[[T; 2]] {
        &self.face_grad[pt * self.n..(pt + 1) * self.n]
    }
}
