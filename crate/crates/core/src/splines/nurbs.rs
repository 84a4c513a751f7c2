use super::{DerivOrder, LocalBasis, SplineError, SplineSpace};

/// Rational basis `R_A = N_A w_A / W` over a univariate spline space.
#[derive(Debug, Clone, PartialEq)]
pub struct NurbsSpace {
    spline: SplineSpace,
    weights: Vec<f64>,
}

impl NurbsSpace {
    pub fn new(spline: SplineSpace, weights: Vec<f64>) -> Result<Self, SplineError> {
        if weights.len() != spline.n_basis() {
            return Err(SplineError::WeightCount {
                expected: spline.n_basis(),
                found: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(SplineError::NonPositiveWeight(w));
        }
        Ok(Self { spline, weights })
    }

    pub fn spline(&self) -> &SplineSpace {
        &self.spline
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight function `W(ξ) = Σ N_A(ξ) w_A`.
    pub fn weight_function(&self, xi: f64) -> Result<f64, SplineError> {
        let b = self.spline.eval(xi, DerivOrder::Value)?;
        Ok(b.values
            .iter()
            .enumerate()
            .map(|(k, n)| n * self.weights[b.first + k])
            .sum())
    }

    pub fn eval(&self, xi: f64, order: DerivOrder) -> Result<LocalBasis, SplineError> {
        let b = self.spline.eval(xi, order)?;
        rationalize(b, &self.weights)
    }
}

/// Apply the quotient rule to a polynomial evaluation.
pub(crate) fn rationalize(mut b: LocalBasis, weights: &[f64]) -> Result<LocalBasis, SplineError> {
    let w = &weights[b.first..b.first + b.values.len()];
    let big_w: f64 = b.values.iter().zip(w).map(|(n, w)| n * w).sum();
    if !(big_w > 0.0) {
        return Err(SplineError::NonPositiveWeightFunction(big_w));
    }
    if !b.derivs.is_empty() {
        let dw: f64 = b.derivs.iter().zip(w).map(|(d, w)| d * w).sum();
        for k in 0..b.values.len() {
            b.derivs[k] = w[k] * (b.derivs[k] * big_w - b.values[k] * dw) / (big_w * big_w);
        }
    }
    for (v, wk) in b.values.iter_mut().zip(w) {
        *v *= wk / big_w;
    }
    Ok(b)
}
