use super::{ExactSolution, FluidFields, SolidFields};
use crate::elastic::ElasticMaterial;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Interface wave travelling along `x2 = 0` with the fluid above, decaying
/// exponentially into both media.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScholteSpec<T> {
    pub omega: T,
    /// Propagation speed of the interface wave.
    pub c_sch: T,
    pub amplitudes: [T; 3],
    pub c: T,
    pub material: ElasticMaterial<T>,
    pub k: T,
    pub b1: T,
    pub b2p: T,
    pub b2s: T,
}

impl<T: Real> ScholteSpec<T> {
    pub fn new(c_sch: T, amplitudes: [T; 3], omega: T, c: T, material: ElasticMaterial<T>) -> Result<Self> {
        let decay = |speed: T| {
            let r = T::one() - (c_sch * c_sch) / (speed * speed);
            if r > T::zero() {
                Ok(r.sqrt())
            } else {
                Err(Error::InvalidArgument(format!(
                    "interface speed {c_sch} is not below wave speed {speed}"
                )))
            }
        };
        Ok(Self {
            omega,
            c_sch,
            amplitudes,
            c,
            material,
            k: omega / c_sch,
            b1: decay(c)?,
            b2p: decay(material.cp())?,
            b2s: decay(material.cs())?,
        })
    }

    /// Unit materials and tabulated speed and amplitudes.
    pub fn reference() -> Self {
        let one = T::one();
        Self::new(
            T::lit(0.7110017230197),
            [T::lit(-0.3594499773037), T::lit(-0.8194642725978), one],
            T::lit(2.0) * T::PI(),
            one,
            ElasticMaterial { rho: one, lambda: one, mu: one },
        )
        .expect("reference interface wave is subsonic")
    }

    /// Solid profiles `F1, F2` and their first and second `x2` derivatives.
    fn profiles(&self, x2: T) -> ([T; 3], [T; 3]) {
        let [_, b2, b3] = self.amplitudes;
        let k = self.k;
        let ep = (k * self.b2p * x2).exp();
        let es = (k * self.b2s * x2).exp();
        let (p, s) = (self.b2p, self.b2s);
        let k2 = k * k;
        let k3 = k2 * k;
        let f1 = [
            -k * b2 * ep - k * s * b3 * es,
            -k2 * p * b2 * ep - k2 * s * s * b3 * es,
            -k3 * p * p * b2 * ep - k3 * s * s * s * b3 * es,
        ];
        let f2 = [
            -k * b2 * p * ep - k * b3 * es,
            -k2 * p * p * b2 * ep - k2 * s * b3 * es,
            -k3 * p * p * p * b2 * ep - k3 * s * s * b3 * es,
        ];
        (f1, f2)
    }
}

impl<T: Real> ExactSolution<T> for ScholteSpec<T> {
    fn fluid_speed(&self) -> T {
        self.c
    }

    fn solid_material(&self) -> ElasticMaterial<T> {
        self.material
    }

    fn fluid(&self, x: [T; 2], t: T) -> FluidFields<T> {
        let b1 = self.amplitudes[0];
        let e = (-self.k * self.b1 * x[1]).exp();
        let (s, c) = (self.k * x[0] - self.omega * t).sin_cos();
        let a = b1 * self.omega * e;
        FluidFields {
            psi: a * c,
            p: a * self.omega * s,
            grad_psi: [-a * self.k * s, -self.k * self.b1 * a * c],
        }
    }

    fn solid(&self, x: [T; 2], t: T) -> SolidFields<T> {
        let (f1, f2) = self.profiles(x[1]);
        let (s, c) = (self.k * x[0] - self.omega * t).sin_cos();
        let (k, w) = (self.k, self.omega);
        SolidFields {
            u: [f1[0] * c, f2[0] * s],
            v: [f1[0] * w * s, -f2[0] * w * c],
            grad_u: [[-k * f1[0] * s, f1[1] * c], [k * f2[0] * c, f2[1] * s]],
        }
    }

    fn fluid_residual(&self, x: [T; 2], t: T) -> (T, T) {
        let psi = self.fluid(x, t).psi;
        let k2 = self.k * self.k;
        let lap = -k2 * psi + k2 * self.b1 * self.b1 * psi;
        let tt = -self.omega * self.omega * psi;
        let c2 = self.c * self.c;
        (tt - c2 * lap, tt.abs().max((c2 * lap).abs()))
    }

    fn solid_residual(&self, x: [T; 2], t: T) -> ([T; 2], T) {
        let m = self.material;
        let (f1, f2) = self.profiles(x[1]);
        let (s, c) = (self.k * x[0] - self.omega * t).sin_cos();
        let k = self.k;
        let k2 = k * k;
        let u1_11 = -k2 * f1[0] * c;
        let u1_22 = f1[2] * c;
        let u1_12 = -k * f1[1] * s;
        let u2_11 = -k2 * f2[0] * s;
        let u2_22 = f2[2] * s;
        let u2_12 = k * f2[1] * c;
        let two = T::lit(2.0);
        let div1 = (m.lambda + two * m.mu) * u1_11 + m.mu * u1_22 + (m.lambda + m.mu) * u2_12;
        let div2 = (m.lambda + two * m.mu) * u2_22 + m.mu * u2_11 + (m.lambda + m.mu) * u1_12;
        let w2 = self.omega * self.omega;
        let acc = [-m.rho * w2 * f1[0] * c, -m.rho * w2 * f2[0] * s];
        let scale = acc[0].abs().max(acc[1].abs()).max(div1.abs()).max(div2.abs());
        ([acc[0] - div1, acc[1] - div2], scale)
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
