use super::{ExactSolution, FluidFields, SolidFields};
use crate::elastic::ElasticMaterial;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Plane pressure wave hitting a flat fluid-solid interface `x2 = 0`, with
/// reflected pressure and transmitted pressure and shear waves. The fluid
/// density is one; `rho_s` is the solid density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnellSpec<T> {
    pub c: T,
    pub cp: T,
    pub cs: T,
    pub rho_s: T,
    pub omega: T,
    pub alpha_i: T,
    pub a_i: T,
    pub k: T,
    pub kp: T,
    pub ks: T,
    pub alpha_r: T,
    pub alpha_p: T,
    pub alpha_s: T,
    pub z: T,
    pub zp: T,
    pub zs: T,
    pub a_r: T,
    pub a_p: T,
    pub a_s: T,
    /// Fluid occupies `x2 > 0` when true.
    pub fluid_above: bool,
}

impl<T: Real> SnellSpec<T> {
    pub fn new(c: T, cp: T, cs: T, rho_s: T, omega: T, alpha_i: T, a_i: T) -> Result<Self> {
        if !(c > T::zero() && cp > T::zero() && cs > T::zero() && rho_s > T::zero()) {
            return Err(Error::InvalidArgument("wave speeds and density must be positive".into()));
        }
        let ray = alpha_i.sin() / c;
        let (sp, ss) = (ray * cp, ray * cs);
        if sp.abs() >= T::one() || ss.abs() >= T::one() {
            return Err(Error::Unsupported(format!(
                "incidence angle {alpha_i} is beyond a critical angle"
            )));
        }
        let (alpha_p, alpha_s) = (sp.asin(), ss.asin());
        let z = c / alpha_i.cos();
        let zp = rho_s * cp / alpha_p.cos();
        let zs = rho_s * cs / alpha_s.cos();
        let two = T::lit(2.0);
        let (s2, c2) = (two * alpha_s).sin_cos();
        let d = zp * c2 * c2 + zs * s2 * s2 + z;
        Ok(Self {
            c,
            cp,
            cs,
            rho_s,
            omega,
            alpha_i,
            a_i,
            k: omega / c,
            kp: omega / cp,
            ks: omega / cs,
            alpha_r: alpha_i,
            alpha_p,
            alpha_s,
            z,
            zp,
            zs,
            a_r: a_i * (zp * c2 * c2 + zs * s2 * s2 - z) / d,
            a_p: a_i * (c / cp) * two * zp * c2 / (rho_s * d),
            a_s: a_i * (c / cs) * two * zs * s2 / (rho_s * d),
            fluid_above: true,
        })
    }

    /// Unit densities, `c = 1`, `c_p = 3`, `c_s = 2`, `omega = 2 pi`,
    /// incidence angle 0.2.
    pub fn reference() -> Self {
        Self::new(T::one(), T::lit(3.0), T::lit(2.0), T::one(), T::lit(2.0) * T::PI(), T::lit(0.2), T::one())
            .expect("reference configuration is sub-critical")
    }

    /// Water over aluminium in units scaled by 1000.
    pub fn water_aluminum() -> Self {
        Self::new(T::lit(1.5), T::lit(6.42), T::lit(3.04), T::lit(2.7), T::lit(2.0) * T::PI(), T::lit(0.2), T::one())
            .expect("contrast configuration is sub-critical")
    }

    fn fluid_waves(&self) -> [(T, [T; 2]); 2] {
        let (s, c) = self.alpha_i.sin_cos();
        let (sr, cr) = self.alpha_r.sin_cos();
        [
            (-self.a_i * self.omega / self.k, [self.k * s, self.k * c]),
            (-self.a_r * self.omega / self.k, [self.k * sr, -self.k * cr]),
        ]
    }

    /// `(amplitude, polarization, wave vector)` of the two solid waves.
    fn solid_waves(&self) -> [(T, [T; 2], [T; 2]); 2] {
        let (sp, cp) = self.alpha_p.sin_cos();
        let (ss, cs) = self.alpha_s.sin_cos();
        [
            (self.a_p, [sp, cp], [self.kp * sp, self.kp * cp]),
            (self.a_s, [-cs, ss], [self.ks * ss, self.ks * cs]),
        ]
    }

    fn side(&self) -> T {
        if self.fluid_above {
            T::one()
        } else {
            -T::one()
        }
    }
}

impl<T: Real> ExactSolution<T> for SnellSpec<T> {
    fn fluid_speed(&self) -> T {
        self.c
    }

    fn solid_material(&self) -> ElasticMaterial<T> {
        let mu = self.rho_s * self.cs * self.cs;
        let lambda = self.rho_s * self.cp * self.cp - mu - mu;
        ElasticMaterial { rho: self.rho_s, lambda, mu }
    }

    fn fluid(&self, x: [T; 2], t: T) -> FluidFields<T> {
        let mut f = FluidFields::default();
        for (amp, kv) in self.fluid_waves() {
            let (s, c) = (kv[0] * x[0] + kv[1] * x[1] - self.omega * t).sin_cos();
            f.psi += amp * c;
            f.p += amp * self.omega * s;
            f.grad_psi[0] -= amp * s * kv[0];
            f.grad_psi[1] -= amp * s * kv[1];
        }
        f
    }

    fn solid(&self, x: [T; 2], t: T) -> SolidFields<T> {
        let mut f = SolidFields::default();
        for (amp, d, kv) in self.solid_waves() {
            let (s, c) = (kv[0] * x[0] + kv[1] * x[1] - self.omega * t).sin_cos();
            for a in 0..2 {
                f.u[a] += amp * d[a] * c;
                f.v[a] += amp * d[a] * self.omega * s;
                for b in 0..2 {
                    f.grad_u[a][b] -= amp * d[a] * kv[b] * s;
                }
            }
        }
        f
    }

    fn fluid_residual(&self, x: [T; 2], t: T) -> (T, T) {
        let (mut tt, mut lap) = (T::zero(), T::zero());
        for (amp, kv) in self.fluid_waves() {
            let c = (kv[0] * x[0] + kv[1] * x[1] - self.omega * t).cos();
            tt -= self.omega * self.omega * amp * c;
            lap -= (kv[0] * kv[0] + kv[1] * kv[1]) * amp * c;
        }
        let c2 = self.c * self.c;
        (tt - c2 * lap, tt.abs().max((c2 * lap).abs()))
    }

    fn solid_residual(&self, x: [T; 2], t: T) -> ([T; 2], T) {
        let m = self.solid_material();
        let mut acc = [T::zero(); 2];
        let mut div = [T::zero(); 2];
        for (amp, d, kv) in self.solid_waves() {
            let c = (kv[0] * x[0] + kv[1] * x[1] - self.omega * t).cos();
            let kd = kv[0] * d[0] + kv[1] * d[1];
            let kk = kv[0] * kv[0] + kv[1] * kv[1];
            for a in 0..2 {
                acc[a] -= m.rho * self.omega * self.omega * amp * d[a] * c;
                div[a] -= amp * c * ((m.lambda + m.mu) * kv[a] * kd + m.mu * kk * d[a]);
            }
        }
        let scale = acc[0].abs().max(acc[1].abs()).max(div[0].abs()).max(div[1].abs());
        ([acc[0] - div[0], acc[1] - div[1]], scale)
    }

    fn interface_point(&self, s: T) -> ([T; 2], [T; 2]) {
        ([T::lit(2.0) * s, T::zero()], [T::zero(), -self.side()])
    }

    fn fluid_point(&self, a: T, b: T) -> [T; 2] {
        [T::lit(2.0) * a, self.side() * T::lit(2.0) * b]
    }

    fn solid_point(&self, a: T, b: T) -> [T; 2] {
        [T::lit(2.0) * a, -self.side() * T::lit(2.0) * b]
    }
}
