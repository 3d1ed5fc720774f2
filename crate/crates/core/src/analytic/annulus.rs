use super::{bessel_j01, ExactSolution, FluidFields, SolidFields};
use crate::elastic::ElasticMaterial;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Radially symmetric mode of a solid ring `r0 <= r <= r1` inside a fluid
/// ring `r1 <= r <= r2`: `u_r = J1(r) cos t` and `psi = J0(r) sin t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnulusSpec<T> {
    pub r0: T,
    pub r1: T,
    pub r2: T,
    pub material: ElasticMaterial<T>,
}

impl<T: Real> AnnulusSpec<T> {
    pub fn new(r0: T, r1: T, r2: T, material: ElasticMaterial<T>) -> Result<Self> {
        if !(T::zero() < r0 && r0 < r1 && r1 < r2) {
            return Err(Error::Geometry(format!("radii {r0}, {r1}, {r2} out of order")));
        }
        Ok(Self { r0, r1, r2, material })
    }

    /// Radii at zeros of `J1`, `J1` and `J0`; `rho = 1`, `lambda = 1/2`,
    /// `mu = 1/4`.
    pub fn reference() -> Self {
        Self {
            r0: T::lit(3.83170597020751),
            r1: T::lit(7.01558666981561),
            r2: T::lit(8.65372791291101),
            material: ElasticMaterial { rho: T::one(), lambda: T::lit(0.5), mu: T::lit(0.25) },
        }
    }

    /// `(u_r, v_r)` in the solid.
    pub fn radial_solid(&self, r: T, t: T) -> (T, T) {
        let j1 = bessel_j01(r).1;
        (j1 * t.cos(), -j1 * t.sin())
    }

    /// `(psi, p)` in the fluid.
    pub fn radial_fluid(&self, r: T, t: T) -> (T, T) {
        let j0 = bessel_j01(r).0;
        (j0 * t.sin(), j0 * t.cos())
    }

    /// Left side of the interface solvability condition at `r1`.
    pub fn solvability_residual(&self) -> T {
        let r = self.r1;
        let (j0, j1) = bessel_j01(r);
        let dj0 = -j1;
        let dj1 = j0 - j1 / r;
        let ElasticMaterial { lambda, mu, .. } = self.material;
        (mu + mu + lambda) * dj1 * dj0 + lambda / r * j1 * dj0 + lambda / r * j1 * j0
    }
}

impl<T: Real> ExactSolution<T> for AnnulusSpec<T> {
    fn fluid_speed(&self) -> T {
        T::one()
    }

    fn solid_material(&self) -> ElasticMaterial<T> {
        self.material
    }

    fn fluid(&self, x: [T; 2], t: T) -> FluidFields<T> {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (j0, j1) = bessel_j01(r);
        let (st, ct) = t.sin_cos();
        FluidFields {
            psi: j0 * st,
            p: j0 * ct,
            grad_psi: [-j1 * st * x[0] / r, -j1 * st * x[1] / r],
        }
    }

    fn solid(&self, x: [T; 2], t: T) -> SolidFields<T> {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (j0, j1) = bessel_j01(r);
        let (st, ct) = t.sin_cos();
        // u = f(r) x with f = J1 / r, so du_a/dx_b = f delta_ab + f'(r) x_a x_b / r
        let f = j1 / r;
        let df = (j0 - j1 / r) / r - j1 / (r * r);
        let mut g = [[T::zero(); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                g[a][b] = df * x[a] * x[b] / r * ct;
            }
            g[a][a] += f * ct;
        }
        SolidFields {
            u: [f * x[0] * ct, f * x[1] * ct],
            v: [-f * x[0] * st, -f * x[1] * st],
            grad_u: g,
        }
    }

    fn fluid_residual(&self, x: [T; 2], t: T) -> (T, T) {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (j0, j1) = bessel_j01(r);
        let st = t.sin();
        // psi'' + psi'/r with J0' = -J1 and J1' = J0 - J1/r
        let lap = (-(j0 - j1 / r) - j1 / r) * st;
        let tt = -j0 * st;
        (tt - lap, tt.abs().max(lap.abs()))
    }

    fn solid_residual(&self, x: [T; 2], t: T) -> ([T; 2], T) {
        let m = self.material;
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let (j0, j1) = bessel_j01(r);
        let ct = t.cos();
        // u = f(r) x: div(sigma) = (lambda + 2 mu) (f'' + 3 f' / r) x
        let dj1 = j0 - j1 / r;
        let ddj1 = -dj1 / r - (T::one() - T::one() / (r * r)) * j1;
        let df = dj1 / r - j1 / (r * r);
        let ddf = ddj1 / r - T::lit(2.0) * dj1 / (r * r) + T::lit(2.0) * j1 / (r * r * r);
        let coef = (m.lambda + m.mu + m.mu) * (ddf + T::lit(3.0) * df / r) * ct;
        let div = [coef * x[0], coef * x[1]];
        let e = [x[0] / r, x[1] / r];
        let acc = [-m.rho * j1 * ct * e[0], -m.rho * j1 * ct * e[1]];
        let scale = acc[0].abs().max(acc[1].abs()).max(div[0].abs()).max(div[1].abs());
        ([acc[0] - div[0], acc[1] - div[1]], scale)
    }

    fn interface_point(&self, s: T) -> ([T; 2], [T; 2]) {
        let th = (T::PI() + T::PI()) * s;
        let (sn, cs) = th.sin_cos();
        ([self.r1 * cs, self.r1 * sn], [-cs, -sn])
    }

    fn fluid_point(&self, a: T, b: T) -> [T; 2] {
        let r = self.r1 + (self.r2 - self.r1) * a;
        let (sn, cs) = ((T::PI() + T::PI()) * b).sin_cos();
        [r * cs, r * sn]
    }

    fn solid_point(&self, a: T, b: T) -> [T; 2] {
        let r = self.r0 + (self.r1 - self.r0) * a;
        let (sn, cs) = ((T::PI() + T::PI()) * b).sin_cos();
        [r * cs, r * sn]
    }
}
