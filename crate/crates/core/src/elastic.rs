//! Solid element operators for displacement `u` and velocity `v`.
//!
//! The displacement equation tests against the stress of the test function,
//! `a(w, u_t) = a(w, v) + <sigma(w) n, v* - v>`, where
//! `a(w, u) = (lambda div w, div u) + (mu grad w, grad u + grad u^T)`.
//! Rows belonging to rigid motions are replaced by moment conditions: the
//! two constant modes by `(1, u_t - v) = 0` and one linear mode of `u1` by
//! the curl moment `(1, curl u_t - curl v) = 0`. The velocity equation is
//! `(phi, rho v_t) = -a(u, phi e) + <phi, (sigma n)*>`.
//!
//! Coefficient vectors are `[u1; u2]`; face vectors are component-major,
//! `[x1 components at all points; x2 components at all points]`.

use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::mesh::ElementGeometry;
use crate::modal::ModalTables;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticMaterial<T> {
    pub rho: T,
    pub lambda: T,
    pub mu: T,
}

impl<T: Real> ElasticMaterial<T> {
    pub fn cp(&self) -> T {
        ((self.lambda + self.mu + self.mu) / self.rho).sqrt()
    }

    pub fn cs(&self) -> T {
        (self.mu / self.rho).sqrt()
    }

    pub fn impedance(&self) -> T {
        self.rho * self.cp()
    }
}

#[derive(Clone, Debug)]
pub struct ElasticElementOps<T> {
    pub n_u: usize,
    pub n_v: usize,
    pub n_face: usize,
    pub material: ElasticMaterial<T>,
    /// Index of the linear `u1` mode whose row carries the curl moment, or 0
    /// when no row is replaced.
    pub curl_row: usize,
    /// `a(phi_i e_a, phi_j e_b)` on the displacement space.
    pub stiffness: Matrix<T>,
    pub augmented: Matrix<T>,
    pub mass_v: Matrix<T>,
    pub a_u_v: Matrix<T>,
    pub lift_u: Matrix<T>,
    pub a_v_u: Matrix<T>,
    pub lift_v: Matrix<T>,
    pub trace_v: Matrix<T>,
    /// Outward traction `sigma(u) n` at face points.
    pub trace_s: Matrix<T>,
}

/// Chooses which linear `u1` row carries the curl moment from the metric
/// `[xi_x1, xi_x2, eta_x1, eta_x2]` at the element centre: the `P1(xi)` row
/// when `|eta_x1| > |xi_x1|`, otherwise the `P1(eta)` row.
pub fn curl_replacement_row<T: Real>(degree: usize, metrics: [T; 4]) -> usize {
    if degree == 0 {
        return 0;
    }
    if metrics[2].abs() > metrics[0].abs() {
        1
    } else {
        degree + 1
    }
}

/// `a(trial_j e_b, test_i e_a)` as a `2 n_test x 2 n_trial` matrix.
fn bilinear<T: Real>(
    geom: &ElementGeometry<T>,
    test: &ModalTables<T>,
    trial: &ModalTables<T>,
    lambda: T,
    mu: T,
) -> Matrix<T> {
    let (nt, ns) = (test.n, trial.n);
    let mut a = Matrix::zeros(2 * nt, 2 * ns);
    for pt in 0..test.num_vol() {
        let w = geom.vol_jw[pt];
        let gt = test.vol_grad_row(pt);
        let gs = trial.vol_grad_row(pt);
        for i in 0..nt {
            let ti = gt[i];
            for j in 0..ns {
                let sj = gs[j];
                let dotg = ti[0] * sj[0] + ti[1] * sj[1];
                for ca in 0..2 {
                    for cb in 0..2 {
                        let mut v = lambda * ti[ca] * sj[cb] + mu * ti[cb] * sj[ca];
                        if ca == cb {
                            v += mu * dotg;
                        }
                        a[(ca * nt + i, cb * ns + j)] += w * v;
                    }
                }
            }
        }
    }
    a
}

impl<T: Real> ElasticElementOps<T> {
    pub fn new(
        element: usize,
        geom: &ElementGeometry<T>,
        u: &ModalTables<T>,
        v: &ModalTables<T>,
        material: ElasticMaterial<T>,
        curl_row: usize,
    ) -> Result<Self> {
        let ElasticMaterial { rho, lambda, mu } = material;
        let (n_u, n_v) = (u.n, v.n);
        let nf = u.num_face();
        let stiffness = bilinear(geom, u, u, lambda, mu);
        let g_uv = bilinear(geom, u, v, lambda, mu);
        let g_vu = bilinear(geom, v, u, lambda, mu);

        let mut mass_v = Matrix::zeros(2 * n_v, 2 * n_v);
        let mut mean_u = vec![T::zero(); n_u];
        let mut mean_v = vec![T::zero(); n_v];
        let mut curl_u = [vec![T::zero(); n_u], vec![T::zero(); n_u]];
        let mut curl_v = [vec![T::zero(); n_v], vec![T::zero(); n_v]];
        for pt in 0..u.num_vol() {
            let w = geom.vol_jw[pt];
            let (fu, gu) = (u.vol_phi_row(pt), u.vol_grad_row(pt));
            let (fv, gv) = (v.vol_phi_row(pt), v.vol_grad_row(pt));
            for j in 0..n_u {
                mean_u[j] += w * fu[j];
                curl_u[0][j] += w * gu[j][1];
                curl_u[1][j] -= w * gu[j][0];
            }
            for i in 0..n_v {
                mean_v[i] += w * fv[i];
                curl_v[0][i] += w * gv[i][1];
                curl_v[1][i] -= w * gv[i][0];
                for j in 0..n_v {
                    let m = w * rho * fv[i] * fv[j];
                    mass_v[(i, j)] += m;
                    mass_v[(n_v + i, n_v + j)] += m;
                }
            }
        }

        let mut trace_v = Matrix::zeros(2 * nf, 2 * n_v);
        let mut trace_s = Matrix::zeros(2 * nf, 2 * n_u);
        for pt in 0..nf {
            let n = geom.normals[pt];
            let fv = v.face_phi_row(pt);
            for j in 0..n_v {
                trace_v[(pt, j)] = fv[j];
                trace_v[(nf + pt, n_v + j)] = fv[j];
            }
            let g = u.face_grad_row(pt);
            for j in 0..n_u {
                let gj = g[j];
                let gn = gj[0] * n[0] + gj[1] * n[1];
                for ca in 0..2 {
                    for cb in 0..2 {
                        let mut s = lambda * gj[cb] * n[ca] + mu * gj[ca] * n[cb];
                        if ca == cb {
                            s += mu * gn;
                        }
                        trace_s[(ca * nf + pt, cb * n_u + j)] = s;
                    }
                }
            }
        }

        let mut lift = Matrix::from_fn(2 * n_u, 2 * nf, |r, c| trace_s[(c, r)] * geom.face_w[c % nf]);
        let mut rhs = g_uv;
        rhs.sub_assign(&lift.matmul(&trace_v));
        let mut augmented = stiffness.clone();
        let zero = T::zero();
        for comp in 0..2 {
            let r = comp * n_u;
            augmented.row_mut(r).iter_mut().for_each(|x| *x = zero);
            augmented.row_mut(r)[r..r + n_u].copy_from_slice(&mean_u);
            rhs.row_mut(r).iter_mut().for_each(|x| *x = zero);
            rhs.row_mut(r)[comp * n_v..(comp + 1) * n_v].copy_from_slice(&mean_v);
            lift.row_mut(r).iter_mut().for_each(|x| *x = zero);
        }
        if curl_row != 0 {
            let row = augmented.row_mut(curl_row);
            row[..n_u].copy_from_slice(&curl_u[0]);
            row[n_u..].copy_from_slice(&curl_u[1]);
            let row = rhs.row_mut(curl_row);
            row[..n_v].copy_from_slice(&curl_v[0]);
            row[n_v..].copy_from_slice(&curl_v[1]);
            lift.row_mut(curl_row).iter_mut().for_each(|x| *x = zero);
        }
        let lu = Lu::factor(&augmented).map_err(|s| Error::Assembly {
            element,
            reason: format!(
                "augmented elastic stiffness singular at column {} (curl row {curl_row})",
                s.column
            ),
        })?;
        let a_u_v = lu.solve_matrix(&rhs);
        let lift_u = lu.solve_matrix(&lift);

        let lu_m = Lu::factor(&mass_v).map_err(|s| Error::Assembly {
            element,
            reason: format!("velocity mass matrix singular at column {}", s.column),
        })?;
        let mut neg = g_vu;
        neg.scale(-T::one());
        let a_v_u = lu_m.solve_matrix(&neg);
        let f_v = Matrix::from_fn(2 * n_v, 2 * nf, |r, c| trace_v[(c, r)] * geom.face_w[c % nf]);
        let lift_v = lu_m.solve_matrix(&f_v);
        Ok(Self {
            n_u,
            n_v,
            n_face: nf,
            material,
            curl_row,
            stiffness,
            augmented,
            mass_v,
            a_u_v,
            lift_u,
            a_v_u,
            lift_v,
            trace_v,
            trace_s,
        })
    }

    pub fn traces(&self, u: &[T], v: &[T], v_tr: &mut [T], s_tr: &mut [T]) {
        self.trace_v.matvec(v, v_tr);
        self.trace_s.matvec(u, s_tr);
    }

    /// Elastic energy `1/2 V^T M V + 1/2 a(u, u)`.
    pub fn energy(&self, u: &[T], v: &[T]) -> T {
        let half = T::lit(0.5);
        half * (crate::acoustic::quad_form(&self.mass_v, v)
            + crate::acoustic::quad_form(&self.stiffness, u))
    }
}

/// Time derivatives of one solid element; `s_star` is the outward traction.
pub fn elastic_rhs<T: Real>(
    ops: &ElasticElementOps<T>,
    u: &[T],
    v: &[T],
    v_star: &[T],
    s_star: &[T],
    du: &mut [T],
    dv: &mut [T],
) {
    ops.a_u_v.matvec(v, du);
    ops.lift_u.matvec_add(v_star, du);
    ops.a_v_u.matvec(u, dv);
    ops.lift_v.matvec_add(s_star, dv);
}
