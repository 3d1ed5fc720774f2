//! Fluid element operators for the potential `psi` and its rate `p`.
//!
//! The potential equation tests against gradients,
//! `(grad phi, grad psi_t) = (grad phi, grad p) + <grad phi . n, p* - p>`,
//! with the constant-mode row replaced by `(1, psi_t) = (1, p)`. The rate
//! equation is `(phi, p_t / c^2) = -(grad phi, grad psi) + <phi, g*>`.
//! Face data lives at the `4 nq` face quadrature points of the element.

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::mesh::ElementGeometry;
use crate::modal::ModalTables;
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct AcousticElementOps<T> {
    pub n_psi: usize,
    pub n_p: usize,
    pub n_face: usize,
    pub c: T,
    /// `(grad phi_i, grad phi_j)` on the potential space.
    pub stiffness: Matrix<T>,
    /// Stiffness with the constant row replaced by the mean moment.
    pub augmented: Matrix<T>,
    /// `(phi_i, phi_j) / c^2` on the rate space.
    pub mass_p: Matrix<T>,
    pub a_psi_p: Matrix<T>,
    pub lift_psi: Matrix<T>,
    pub a_p_psi: Matrix<T>,
    pub lift_p: Matrix<T>,
    /// Rate values at face points.
    pub trace_p: Matrix<T>,
    /// Outward normal derivative of the potential at face points.
    pub trace_g: Matrix<T>,
}

impl<T: Real> AcousticElementOps<T> {
    /// `element` only labels errors.
    pub fn new(
        element: usize,
        geom: &ElementGeometry<T>,
        psi: &ModalTables<T>,
        p: &ModalTables<T>,
        c: T,
    ) -> Result<Self> {
        let (n_psi, n_p) = (psi.n, p.n);
        let nv = psi.num_vol();
        let nf = psi.num_face();
        let mut stiffness = Matrix::zeros(n_psi, n_psi);
        let mut s_psi_p = Matrix::zeros(n_psi, n_p);
        let mut mass_p = Matrix::zeros(n_p, n_p);
        let mut mean_psi = vec![T::zero(); n_psi];
        let mut mean_p = vec![T::zero(); n_p];
        let inv_c2 = T::one() / (c * c);
        for pt in 0..nv {
            let w = geom.vol_jw[pt];
            let gpsi = psi.vol_grad_row(pt);
            let gp = p.vol_grad_row(pt);
            let fpsi = psi.vol_phi_row(pt);
            let fp = p.vol_phi_row(pt);
            for i in 0..n_psi {
                let gi = gpsi[i];
                mean_psi[i] += w * fpsi[i];
                for j in 0..n_psi {
                    stiffness[(i, j)] += w * (gi[0] * gpsi[j][0] + gi[1] * gpsi[j][1]);
                }
                for j in 0..n_p {
                    s_psi_p[(i, j)] += w * (gi[0] * gp[j][0] + gi[1] * gp[j][1]);
                }
            }
            for i in 0..n_p {
                mean_p[i] += w * fp[i];
                for j in 0..n_p {
                    mass_p[(i, j)] += w * inv_c2 * fp[i] * fp[j];
                }
            }
        }
        let mut trace_p = Matrix::zeros(nf, n_p);
        let mut trace_g = Matrix::zeros(nf, n_psi);
        for pt in 0..nf {
            let n = geom.normals[pt];
            let g = psi.face_grad_row(pt);
            for j in 0..n_psi {
                trace_g[(pt, j)] = g[j][0] * n[0] + g[j][1] * n[1];
            }
            trace_p.row_mut(pt).copy_from_slice(p.face_phi_row(pt));
        }
        // face lifting of (p* - p) against grad(phi) . n
        let mut lift = Matrix::from_fn(n_psi, nf, |i, pt| trace_g[(pt, i)] * geom.face_w[pt]);
        let mut rhs = s_psi_p.clone();
        rhs.sub_assign(&lift.matmul(&trace_p));
        let mut augmented = stiffness.clone();
        augmented.row_mut(0).copy_from_slice(&mean_psi);
        rhs.row_mut(0).copy_from_slice(&mean_p);
        lift.row_mut(0).iter_mut().for_each(|x| *x = T::zero());
        let lu = Lu::factor(&augmented).map_err(|s| Error::Assembly {
            element,
            reason: format!("augmented potential stiffness singular at column {}", s.column),
        })?;
        let a_psi_p = lu.solve_matrix(&rhs);
        let lift_psi = lu.solve_matrix(&lift);

        let lu_m = Lu::factor(&mass_p).map_err(|s| Error::Assembly {
            element,
            reason: format!("rate mass matrix singular at column {}", s.column),
        })?;
        let mut s_p_psi = s_psi_p.transpose();
        s_p_psi.scale(-T::one());
        let a_p_psi = lu_m.solve_matrix(&s_p_psi);
        let f_p = Matrix::from_fn(n_p, nf, |i, pt| trace_p[(pt, i)] * geom.face_w[pt]);
        let lift_p = lu_m.solve_matrix(&f_p);
        Ok(Self {
            n_psi,
            n_p,
            n_face: nf,
            c,
            stiffness,
            augmented,
            mass_p,
            a_psi_p,
            lift_psi,
            a_p_psi,
            lift_p,
            trace_p,
            trace_g,
        })
    }

    /// Own traces `p` and `g` at the face points.
    pub fn traces(&self, psi: &[T], p: &[T], p_tr: &mut [T], g_tr: &mut [T]) {
        self.trace_p.matvec(p, p_tr);
        self.trace_g.matvec(psi, g_tr);
    }

    /// Acoustic energy `1/2 psi^T S psi + 1/2 p^T M p`.
    pub fn energy(&self, psi: &[T], p: &[T]) -> T {
        let half = T::lit(0.5);
        half * (quad_form(&self.stiffness, psi) + quad_form(&self.mass_p, p))
    }
}

pub(crate) fn quad_form<T: Real>(a: &Matrix<T>, x: &[T]) -> T {
    let mut s = T::zero();
    for i in 0..a.rows() {
        s += x[i] * crate::linalg::dot(a.row(i), x);
    }
    s
}

/// Time derivatives of one fluid element given star values at its face points.
pub fn acoustic_rhs<T: Real>(
    ops: &AcousticElementOps<T>,
    psi: &[T],
    p: &[T],
    p_star: &[T],
    g_star: &[T],
    dpsi: &mut [T],
    dp: &mut [T],
) {
    ops.a_psi_p.matvec(p, dpsi);
    ops.lift_psi.matvec_add(p_star, dpsi);
    ops.a_p_psi.matvec(psi, dp);
    ops.lift_p.matvec_add(g_star, dp);
}
