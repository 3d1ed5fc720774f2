use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;

/// Point load with a derivative-of-Gaussian time signature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSource<T> {
    pub location: [T; 2],
    pub t0: T,
    pub w0: T,
    /// Weights of the two momentum components when the source lies in the
    /// solid; ignored in the fluid.
    pub direction: [T; 2],
}

impl<T: Real> PointSource<T> {
    pub fn new(location: [T; 2], t0: T, w0: T) -> Self {
        Self { location, t0, w0, direction: [T::one(), T::one()] }
    }

    /// `A(t) = -2 w0^2 (t - t0) exp(-(w0 (t - t0))^2)`
    pub fn amplitude(&self, t: T) -> T {
        let s = t - self.t0;
        let a = self.w0 * s;
        -T::lit(2.0) * self.w0 * self.w0 * s * (-a * a).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReceiverField {
    Psi,
    P,
    U1,
    U2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Receiver<T> {
    pub location: [T; 2],
    pub field: ReceiverField,
}

impl<T: Real> Receiver<T> {
    pub fn potential(location: [T; 2]) -> Self {
        Self { location, field: ReceiverField::Psi }
    }
}

/// Recorded samples of one receiver.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReceiverTrace<T> {
    pub times: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> ReceiverTrace<T> {
    pub fn push(&mut self, t: T, v: T) {
        self.times.push(t);
        self.values.push(v);
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,value")?;
        for (t, v) in self.times.iter().zip(&self.values) {
            writeln!(w, "{:.17e},{:.17e}", t.as_f64(), v.as_f64())?;
        }
        Ok(())
    }
}
