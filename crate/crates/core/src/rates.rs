//! Convergence-rate estimation.

use crate::{Error, Result};

/// Number of finest meshes used by [`fit_rate`].
pub const RATE_POINTS: usize = 3;

/// Least-squares slope of `log e` against `log h` over the finest three
/// points (smallest `h`).
pub fn fit_rate(h: &[f64], errors: &[f64]) -> Result<f64> {
    let pairs = checked_pairs(h, errors, RATE_POINTS)?;
    Ok(log_slope(&pairs[..RATE_POINTS]))
}

/// Least-squares slope of `log v` against `log h` over every point.
pub fn fit_slope(h: &[f64], values: &[f64]) -> Result<f64> {
    Ok(log_slope(&checked_pairs(h, values, 2)?))
}

fn checked_pairs(h: &[f64], values: &[f64], min: usize) -> Result<Vec<(f64, f64)>> {
    if h.len() != values.len() || h.len() < min {
        return Err(Error::InvalidInput(format!(
            "need at least {min} (h, value) pairs, got {} and {}",
            h.len(),
            values.len()
        )));
    }
    if let Some(bad) = h.iter().chain(values).find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput(format!("rates need positive values, found {bad}")));
    }
    let mut pairs: Vec<(f64, f64)> = h.iter().copied().zip(values.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

fn log_slope(pairs: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = pairs.iter().map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
