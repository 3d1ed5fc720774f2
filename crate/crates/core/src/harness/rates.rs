use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::FieldErrors;

/// Errors of one ladder entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderEntry {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub steps: usize,
    pub errors: FieldErrors,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub entries: Vec<LadderEntry>,
    /// Fitted rates for `psi, p, u, v`; NaN when fewer than two usable points.
    pub rates: [f64; 4],
    pub window: usize,
}

/// Slope of the least-squares line through `(log h, log e)`.
pub fn fit_rate(h: &[f64], e: &[f64]) -> Result<f64> {
    if h.len() != e.len() {
        return Err(Error::InvalidArgument("h and error lists differ in length".into()));
    }
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(e)
        .filter(|(h, e)| {
            let ok = e.is_finite() && **e > 0.0 && h.is_finite() && **h > 0.0;
            if !ok {
                log::warn!("excluding point h = {h}, error = {e} from the rate fit");
            }
            ok
        })
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument("rate fit needs at least two usable points".into()));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in &pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("rate fit needs distinct h values".into()));
    }
    Ok(sxy / sxx)
}

/// Per-field rates over the `window` finest entries.
pub fn fit_rates(entries: &[LadderEntry], window: usize) -> [f64; 4] {
    let mut sorted: Vec<&LadderEntry> = entries.iter().collect();
    sorted.sort_by(|a, b| b.h.total_cmp(&a.h));
    let start = sorted.len().saturating_sub(window);
    let used = &sorted[start..];
    let h: Vec<f64> = used.iter().map(|e| e.h).collect();
    let mut rates = [f64::NAN; 4];
    for (k, r) in rates.iter_mut().enumerate() {
        let e: Vec<f64> = used.iter().map(|x| x.errors.as_array()[k]).collect();
        *r = fit_rate(&h, &e).unwrap_or(f64::NAN);
    }
    rates
}
