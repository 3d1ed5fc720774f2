//! Exact solutions, point sources and receivers.
//!
//! Every exact solution reports first derivatives (used for initial and
//! boundary data) and the analytic residuals of both wave equations, so it
//! can be audited before it is trusted as a reference.

mod annulus;
mod bessel;
mod scholte;
mod snell;
mod source;
mod standing;

pub use annulus::AnnulusSpec;
pub use bessel::{bessel_j0, bessel_j01, bessel_j1};
pub use scholte::ScholteSpec;
pub use snell::SnellSpec;
pub use source::{PointSource, Receiver, ReceiverField, ReceiverTrace};
pub use standing::StandingWaveSpec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elastic::ElasticMaterial;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FluidFields<T> {
    pub psi: T,
    pub p: T,
    pub grad_psi: [T; 2],
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolidFields<T> {
    pub u: [T; 2],
    pub v: [T; 2],
    /// `grad_u[a][b] = d u_a / d x_b`
    pub grad_u: [[T; 2]; 2],
}

/// Cauchy stress of an isotropic material.
pub fn stress<T: Real>(grad_u: [[T; 2]; 2], m: &ElasticMaterial<T>) -> [[T; 2]; 2] {
    let div = grad_u[0][0] + grad_u[1][1];
    let mut s = [[T::zero(); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            s[a][b] = m.mu * (grad_u[a][b] + grad_u[b][a]);
        }
        s[a][a] += m.lambda * div;
    }
    s
}

pub fn traction<T: Real>(sigma: [[T; 2]; 2], n: [T; 2]) -> [T; 2] {
    [
        sigma[0][0] * n[0] + sigma[0][1] * n[1],
        sigma[1][0] * n[0] + sigma[1][1] * n[1],
    ]
}

/// A coupled exact solution.
pub trait ExactSolution<T: Real>: Send + Sync {
    fn fluid_speed(&self) -> T;
    fn solid_material(&self) -> ElasticMaterial<T>;
    fn fluid(&self, x: [T; 2], t: T) -> FluidFields<T>;
    fn solid(&self, x: [T; 2], t: T) -> SolidFields<T>;
    /// `psi_tt - c^2 lap(psi)` from analytic second derivatives, together
    /// with the magnitude of the larger term.
    fn fluid_residual(&self, x: [T; 2], t: T) -> (T, T);
    /// `rho u_tt - div(sigma)` and the magnitude of the larger term.
    fn solid_residual(&self, x: [T; 2], t: T) -> ([T; 2], T);
    /// Point and fluid normal on the interface for `s` in [0, 1].
    fn interface_point(&self, s: T) -> ([T; 2], [T; 2]);
    /// Interior fluid point for `(a, b)` in [0, 1]^2.
    fn fluid_point(&self, a: T, b: T) -> [T; 2];
    fn solid_point(&self, a: T, b: T) -> [T; 2];
}

/// Maximum residuals found by [`audit`], each relative to the largest term
/// of its equation over all samples.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub fluid_pde: f64,
    pub solid_pde: f64,
    pub interface_velocity: f64,
    pub interface_normal_stress: f64,
    pub interface_shear: f64,
    /// Finite-difference check that reported derivatives match the fields.
    pub derivative_consistency: f64,
}

impl AuditReport {
    pub fn max_residual(&self) -> f64 {
        self.fluid_pde
            .max(self.solid_pde)
            .max(self.interface_velocity)
            .max(self.interface_normal_stress)
            .max(self.interface_shear)
    }

    pub fn passes(&self, tol: f64, fd_tol: f64) -> bool {
        self.max_residual() < tol && self.derivative_consistency < fd_tol
    }
}

/// Evaluates PDE and interface residuals at `samples` random points and
/// times in `[0, t_max]`.
pub fn audit<S: ExactSolution<f64> + ?Sized>(sol: &S, samples: usize, t_max: f64, seed: u64) -> AuditReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mat = sol.solid_material();
    let c = sol.fluid_speed();
    let mut r = AuditReport::default();
    let (mut fl, mut fl_s, mut so, mut so_s) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut iv, mut iv_s, mut isn, mut is_s, mut ish) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut fd = 0.0f64;
    for _ in 0..samples {
        let t = rng.gen_range(0.0..=t_max);
        let xf = sol.fluid_point(rng.gen(), rng.gen());
        let (res, scale) = sol.fluid_residual(xf, t);
        fl = fl.max(res.abs());
        fl_s = fl_s.max(scale);
        let xs = sol.solid_point(rng.gen(), rng.gen());
        let (res, scale) = sol.solid_residual(xs, t);
        so = so.max(res[0].abs().max(res[1].abs()));
        so_s = so_s.max(scale);

        let (xi, n) = sol.interface_point(rng.gen());
        let f = sol.fluid(xi, t);
        let s = sol.solid(xi, t);
        let g = f.grad_psi[0] * n[0] + f.grad_psi[1] * n[1];
        let vn = s.v[0] * n[0] + s.v[1] * n[1];
        iv = iv.max((g - vn).abs());
        iv_s = iv_s.max(g.abs()).max(vn.abs());
        let tr = traction(stress(s.grad_u, &mat), n);
        let m = [-n[1], n[0]];
        let sn = tr[0] * n[0] + tr[1] * n[1];
        let sm = tr[0] * m[0] + tr[1] * m[1];
        isn = isn.max((sn - f.p).abs());
        is_s = is_s.max(sn.abs()).max(f.p.abs());
        ish = ish.max(sm.abs());

        fd = fd.max(consistency(sol, xf, xs, t, c));
    }
    let rel = |a: f64, s: f64| if s > 0.0 { a / s } else { a };
    r.fluid_pde = rel(fl, fl_s);
    r.solid_pde = rel(so, so_s);
    r.interface_velocity = rel(iv, iv_s);
    r.interface_normal_stress = rel(isn, is_s);
    r.interface_shear = rel(ish, is_s);
    r.derivative_consistency = fd;
    r
}

/// Relative mismatch between reported derivatives and fourth-order central
/// differences of the fields.
fn consistency<S: ExactSolution<f64> + ?Sized>(sol: &S, xf: [f64; 2], xs: [f64; 2], t: f64, _c: f64) -> f64 {
    let h = 1e-3;
    let d = |f: &dyn Fn(f64) -> f64| (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h);
    let ff = sol.fluid(xf, t);
    let dt_psi = d(&|e| sol.fluid(xf, t + e).psi);
    let d1 = d(&|e| sol.fluid([xf[0] + e, xf[1]], t).psi);
    let d2 = d(&|e| sol.fluid([xf[0], xf[1] + e], t).psi);
    let sf = ff.p.abs().max(ff.grad_psi[0].abs()).max(ff.grad_psi[1].abs()).max(1e-300);
    let mut worst = ((dt_psi - ff.p).abs() + (d1 - ff.grad_psi[0]).abs() + (d2 - ff.grad_psi[1]).abs()) / sf;
    let ss = sol.solid(xs, t);
    let mut scale = 1e-300f64;
    let mut err = 0.0;
    for a in 0..2 {
        let dt = d(&|e| sol.solid(xs, t + e).u[a]);
        let dx = d(&|e| sol.solid([xs[0] + e, xs[1]], t).u[a]);
        let dy = d(&|e| sol.solid([xs[0], xs[1] + e], t).u[a]);
        err += (dt - ss.v[a]).abs() + (dx - ss.grad_u[a][0]).abs() + (dy - ss.grad_u[a][1]).abs();
        scale = scale.max(ss.v[a].abs()).max(ss.grad_u[a][0].abs()).max(ss.grad_u[a][1].abs());
    }
    worst = worst.max(err / scale);
    worst
}

/// Exact solution that is identically zero, for homogeneous runs.
#[derive(Clone, Copy, Debug)]
pub struct ZeroSolution<T> {
    pub c: T,
    pub material: ElasticMaterial<T>,
}

impl<T: Real> ExactSolution<T> for ZeroSolution<T> {
    fn fluid_speed(&self) -> T {
        self.c
    }
    fn solid_material(&self) -> ElasticMaterial<T> {
        self.material
    }
    fn fluid(&self, _x: [T; 2], _t: T) -> FluidFields<T> {
        FluidFields::default()
    }
    fn solid(&self, _x: [T; 2], _t: T) -> SolidFields<T> {
        SolidFields::default()
    }
    fn fluid_residual(&self, _x: [T; 2], _t: T) -> (T, T) {
        (T::zero(), T::zero())
    }
    fn solid_residual(&self, _x: [T; 2], _t: T) -> ([T; 2], T) {
        ([T::zero(); 2], T::zero())
    }
    fn interface_point(&self, s: T) -> ([T; 2], [T; 2]) {
        ([s, T::zero()], [T::zero(), -T::one()])
    }
    fn fluid_point(&self, a: T, b: T) -> [T; 2] {
        [a, b]
    }
    fn solid_point(&self, a: T, b: T) -> [T; 2] {
        [a, -b]
    }
}
