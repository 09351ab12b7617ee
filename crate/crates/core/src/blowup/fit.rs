//! Power-law fits `norm ~ C (T - t)^slope`.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log(norm)`.
    pub residual: f64,
    pub slope_stderr: f64,
}

/// Least-squares fit of `log(norm)` against `log(T - t)` for samples `(t, norm)`.
pub fn fit_rate(series: &[(f64, f64)], t_blowup: f64) -> Result<RateFit> {
    if series.len() < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            found: series.len(),
        });
    }
    for (i, w) in series.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) {
            return Err(Error::param(format!("sample times must increase strictly (index {})", i + 1)));
        }
    }
    if let Some(&(t, _)) = series.last() {
        if !(t < t_blowup) {
            return Err(Error::param(format!("sample time {t} is not before T = {t_blowup}")));
        }
    }
    if let Some((index, &(_, value))) = series.iter().enumerate().find(|(_, s)| !(s.1 > 0.0)) {
        return Err(Error::NonPositiveNorm { index, value });
    }
    let pts: Vec<(f64, f64)> = series.iter().map(|&(t, v)| ((t_blowup - t).ln(), v.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (sse / m).sqrt(),
        slope_stderr: (sse / (m - 2.0) / sxx).sqrt(),
    })
}
