//! Explicit time integration and step-size rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Step-size rule and its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum TimeStepRule {
    /// `dt = 0.5 h / q^2`
    StandingWave { h: f64, q: usize },
    /// `dt = 1.4 h / (c_m (q + 1.5)^2 rho_s)`
    Contrast { h: f64, q: usize, c_m: f64, rho_s: f64 },
    /// `dt = 0.15 h / (sqrt(2 mu + lambda) (q + 1.5))`
    InversionMaterial { h: f64, q: usize, mu: f64, lambda: f64 },
    Manual { dt: f64 },
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

pub fn select_dt(rule: TimeStepRule) -> Result<f64> {
    let dt = match rule {
        TimeStepRule::StandingWave { h, q } => {
            positive("h", h)?;
            if q == 0 {
                return Err(Error::InvalidArgument("standing-wave rule needs q >= 1".into()));
            }
            0.5 * h / (q * q) as f64
        }
        TimeStepRule::Contrast { h, q, c_m, rho_s } => {
            positive("h", h)?;
            positive("c_m", c_m)?;
            positive("rho_s", rho_s)?;
            let d = q as f64 + 1.5;
            1.4 * h / (c_m * d * d * rho_s)
        }
        TimeStepRule::InversionMaterial { h, q, mu, lambda } => {
            positive("h", h)?;
            positive("2 mu + lambda", 2.0 * mu + lambda)?;
            0.15 * h / ((2.0 * mu + lambda).sqrt() * (q as f64 + 1.5))
        }
        TimeStepRule::Manual { dt } => dt,
    };
    positive("dt", dt)?;
    Ok(dt)
}

/// Autonomous-in-structure linear or nonlinear ODE `y' = f(t, y)`.
pub trait System<T: Real> {
    fn dim(&self) -> usize;
    fn rhs(&self, t: T, y: &[T], dy: &mut [T]) -> Result<()>;
}

impl<T: Real, F> System<T> for (usize, F)
where
    F: Fn(T, &[T], &mut [T]) -> Result<()>,
{
    fn dim(&self) -> usize {
        self.0
    }

    fn rhs(&self, t: T, y: &[T], dy: &mut [T]) -> Result<()> {
        (self.1)(t, y, dy)
    }
}

/// Stage buffers for [`rk4_step`].
#[derive(Clone, Debug)]
pub struct Rk4Workspace<T> {
    k: [Vec<T>; 4],
    tmp: Vec<T>,
}

impl<T: Real> Rk4Workspace<T> {
    pub fn new(n: usize) -> Self {
        let z = vec![T::zero(); n];
        Self {
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
        }
    }
}

/// Classical four-stage Runge-Kutta step, in place.
pub fn rk4_step<T: Real, S: System<T> + ?Sized>(
    sys: &S,
    t: T,
    dt: T,
    y: &mut [T],
    ws: &mut Rk4Workspace<T>,
) -> Result<()> {
    let n = y.len();
    if ws.tmp.len() != n {
        *ws = Rk4Workspace::new(n);
    }
    let half = T::lit(0.5);
    let Rk4Workspace { k, tmp } = ws;
    let [k1, k2, k3, k4] = k;
    sys.rhs(t, y, k1)?;
    for i in 0..n {
        tmp[i] = y[i] + half * dt * k1[i];
    }
    sys.rhs(t + half * dt, tmp, k2)?;
    for i in 0..n {
        tmp[i] = y[i] + half * dt * k2[i];
    }
    sys.rhs(t + half * dt, tmp, k3)?;
    for i in 0..n {
        tmp[i] = y[i] + dt * k3[i];
    }
    sys.rhs(t + dt, tmp, k4)?;
    let sixth = dt / T::lit(6.0);
    let two = T::lit(2.0);
    let mut finite = true;
    for i in 0..n {
        y[i] += sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
        finite &= y[i].is_finite();
    }
    if !finite {
        return Err(Error::Integration {
            time: (t + dt).as_f64(),
            reason: "non-finite value in state".into(),
        });
    }
    Ok(())
}

/// Number of equal steps of size at most `dt` covering `[t0, t1]`, and the
/// adjusted step.
pub fn step_count(t0: f64, t1: f64, dt: f64) -> Result<(usize, f64)> {
    positive("dt", dt)?;
    let span = t1 - t0;
    if !(span >= 0.0) {
        return Err(Error::InvalidArgument(format!("final time {t1} before start {t0}")));
    }
    if span == 0.0 {
        return Ok((0, dt));
    }
    let n = (span / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((n, span / n as f64))
}

/// Integrates from `t0` to `t1` with steps landing exactly on `t1`. The
/// callback sees `(step, t, y)` at the start and after every step and may
/// abort the run by returning an error.
pub fn integrate<T: Real, S: System<T> + ?Sized>(
    sys: &S,
    y: &mut [T],
    t0: f64,
    t1: f64,
    dt: f64,
    mut callback: impl FnMut(usize, f64, &[T]) -> Result<()>,
) -> Result<f64> {
    let (n, h) = step_count(t0, t1, dt)?;
    let mut ws = Rk4Workspace::new(y.len());
    callback(0, t0, y)?;
    for step in 0..n {
        let t = t0 + step as f64 * h;
        rk4_step(sys, T::lit(t), T::lit(h), y, &mut ws)?;
        let tn = if step + 1 == n { t1 } else { t0 + (step + 1) as f64 * h };
        callback(step + 1, tn, y)?;
    }
    Ok(h)
}
