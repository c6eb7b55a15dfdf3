//! Log-log slope fitting for asymptotic order estimation.

use crate::Error;

/// Least-squares fit of `ln v = q ln t + ln c`.
#[derive(Clone, Copy, PartialEq, Debug, serde::Serialize)]
pub struct OrderEstimate {
    pub exponent: f64,
    /// Largest absolute residual of the fit in log space.
    pub residual: f64,
}

/// Result of a fit that may hit the floating-point floor (identical points,
/// provably-zero distances): the order is then only bounded from below.
#[derive(Clone, Copy, PartialEq, Debug, serde::Serialize)]
pub enum NumericOrder {
    Estimate(OrderEstimate),
    AtLeast(f64),
}

impl NumericOrder {
    pub fn exponent(&self) -> f64 {
        match self {
            NumericOrder::Estimate(e) => e.exponent,
            NumericOrder::AtLeast(b) => *b,
        }
    }

    pub fn is_estimate(&self) -> bool {
        matches!(self, NumericOrder::Estimate(_))
    }
}

/// Slope of `ln value` against `ln t`. Requires at least 4 samples at
/// distinct positive scales with positive values.
pub fn estimate_order(samples: &[(f64, f64)]) -> Result<OrderEstimate, Error> {
    if samples.len() < 4 {
        return Err(Error::TooFewSamples(4));
    }
    let mut xs = Vec::with_capacity(samples.len());
    let mut ys = Vec::with_capacity(samples.len());
    for &(t, v) in samples {
        if !(t > 0.0) || !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveSamples);
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::TooFewSamples(4));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0f64, f64::max);
    Ok(OrderEstimate { exponent: slope, residual })
}

/// Floor below which a distance is treated as exactly zero at sample scale.
pub const VALUE_FLOOR: f64 = 1e-250;

/// Like [`estimate_order`] but values at the floor yield a certified lower
/// bound instead of an error: `ln floor / ln t_max` bounds any exponent that
/// could have produced them.
pub fn estimate_order_or_floor(samples: &[(f64, f64)]) -> Result<NumericOrder, Error> {
    if samples.iter().any(|&(_, v)| v <= VALUE_FLOOR) {
        let t_max = samples
            .iter()
            .map(|&(t, _)| t)
            .fold(0.0f64, f64::max);
        if !(t_max > 0.0) {
            return Err(Error::NonPositiveSamples);
        }
        return Ok(NumericOrder::AtLeast(VALUE_FLOOR.ln() / t_max.ln()));
    }
    Ok(NumericOrder::Estimate(estimate_order(samples)?))
}
