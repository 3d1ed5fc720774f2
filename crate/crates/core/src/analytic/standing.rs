use super::{ExactSolution, FluidFields, SolidFields};
use crate::elastic::ElasticMaterial;
use crate::scalar::Real;

/// Separable standing wave on `[0, 2]^2` (fluid) over `[0, 2] x [-2, 0]`
/// (solid) with unit material constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StandingWaveSpec<T> {
    pub k: T,
    pub a: T,
    pub b: T,
    pub phase: T,
}

impl<T: Real> StandingWaveSpec<T> {
    /// `k = pi`, `a = b = phase = -pi/4`.
    pub fn reference() -> Self {
        let q = -T::FRAC_PI_4();
        Self { k: T::PI(), a: q, b: q, phase: q }
    }

    pub fn omega(&self) -> T {
        T::SQRT_2() * self.k
    }

    /// Temporal period `2 pi / omega`.
    pub fn period(&self) -> T {
        (T::PI() + T::PI()) / self.omega()
    }

    fn trig(&self, x: [T; 2], t: T) -> (T, T, T, T, T, T) {
        let (s1, c1) = (self.k * x[0] + self.a).sin_cos();
        let (s2, c2) = (self.k * x[1] + self.b).sin_cos();
        let (st, ct) = (self.omega() * t + self.phase).sin_cos();
        (s1, c1, s2, c2, st, ct)
    }
}

impl<T: Real> ExactSolution<T> for StandingWaveSpec<T> {
    fn fluid_speed(&self) -> T {
        T::one()
    }

    fn solid_material(&self) -> ElasticMaterial<T> {
        ElasticMaterial { rho: T::one(), lambda: T::one(), mu: T::one() }
    }

    fn fluid(&self, x: [T; 2], t: T) -> FluidFields<T> {
        let (s1, c1, s2, c2, st, ct) = self.trig(x, t);
        let r2 = T::SQRT_2();
        FluidFields {
            psi: r2 * s1 * s2 * st,
            p: r2 * self.omega() * s1 * s2 * ct,
            grad_psi: [r2 * self.k * c1 * s2 * st, r2 * self.k * s1 * c2 * st],
        }
    }

    fn solid(&self, x: [T; 2], t: T) -> SolidFields<T> {
        let (s1, c1, s2, c2, st, ct) = self.trig(x, t);
        let (k, w) = (self.k, self.omega());
        SolidFields {
            u: [c1 * s2 * ct, -s1 * c2 * ct],
            v: [-w * c1 * s2 * st, w * s1 * c2 * st],
            grad_u: [
                [-k * s1 * s2 * ct, k * c1 * c2 * ct],
                [-k * c1 * c2 * ct, k * s1 * s2 * ct],
            ],
        }
    }

    fn fluid_residual(&self, x: [T; 2], t: T) -> (T, T) {
        let psi = self.fluid(x, t).psi;
        let k2 = self.k * self.k;
        let w2 = self.omega() * self.omega();
        let psi_tt = -w2 * psi;
        let lap = -(k2 + k2) * psi;
        let c2 = self.fluid_speed().powi(2);
        (psi_tt - c2 * lap, psi_tt.abs().max((c2 * lap).abs()))
    }

    fn solid_residual(&self, x: [T; 2], t: T) -> ([T; 2], T) {
        let m = self.solid_material();
        let (s1, c1, s2, c2, _, ct) = self.trig(x, t);
        let k2 = self.k * self.k;
        let u = self.solid(x, t).u;
        let w2 = self.omega() * self.omega();
        // second derivatives of u1 = C1 S2 ct and u2 = -S1 C2 ct
        let u1_11 = -k2 * c1 * s2 * ct;
        let u1_22 = -k2 * c1 * s2 * ct;
        let u1_12 = -k2 * s1 * c2 * ct;
        let u2_11 = k2 * s1 * c2 * ct;
        let u2_22 = k2 * s1 * c2 * ct;
        let u2_12 = k2 * c1 * s2 * ct;
        let (l, mu) = (m.lambda, m.mu);
        let two = T::lit(2.0);
        let div1 = (l + two * mu) * u1_11 + mu * u1_22 + (l + mu) * u2_12;
        let div2 = (l + two * mu) * u2_22 + mu * u2_11 + (l + mu) * u1_12;
        let r = [-m.rho * w2 * u[0] - div1, -m.rho * w2 * u[1] - div2];
        let scale = (m.rho * w2 * u[0]).abs().max((m.rho * w2 * u[1]).abs()).max(div1.abs()).max(div2.abs());
        (r, scale)
    }

    fn interface_point(&self, s: T) -> ([T; 2], [T; 2]) {
        ([T::lit(2.0) * s, T::zero()], [T::zero(), -T::one()])
    }

    fn fluid_point(&self, a: T, b: T) -> [T; 2] {
        [T::lit(2.0) * a, T::lit(2.0) * b]
    }

    fn solid_point(&self, a: T, b: T) -> [T; 2] {
        [T::lit(2.0) * a, -T::lit(2.0) * b]
    }
}

