use super::{DerivOrder, SplineError, SplineSpace};

/// Kronecker-product space on `[0, 1]²` with optional rational weights.
/// Global index `A(i, j) = n_η · i + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace2D {
    xi: SplineSpace,
    eta: SplineSpace,
    weights: Option<Vec<f64>>,
}

/// Active functions at one point of a tensor space.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBasis {
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
    /// Parametric gradients `(∂/∂ξ, ∂/∂η)`; empty for value-only requests.
    pub grads: Vec<[f64; 2]>,
}

impl TensorSpace2D {
    pub fn new(xi: SplineSpace, eta: SplineSpace) -> Self {
        Self {
            xi,
            eta,
            weights: None,
        }
    }

    pub fn rational(xi: SplineSpace, eta: SplineSpace, weights: Vec<f64>) -> Result<Self, SplineError> {
        let n = xi.n_basis() * eta.n_basis();
        if weights.len() != n {
            return Err(SplineError::WeightCount {
                expected: n,
                found: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(SplineError::NonPositiveWeight(w));
        }
        Ok(Self {
            xi,
            eta,
            weights: Some(weights),
        })
    }

    pub fn xi(&self) -> &SplineSpace {
        &self.xi
    }

    pub fn eta(&self) -> &SplineSpace {
        &self.eta
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn n_basis(&self) -> usize {
        self.xi.n_basis() * self.eta.n_basis()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        self.eta.n_basis() * i + j
    }

    /// Inverse of [`index`](Self::index).
    pub fn split_index(&self, a: usize) -> (usize, usize) {
        (a / self.eta.n_basis(), a % self.eta.n_basis())
    }

    pub fn n_elements(&self) -> usize {
        self.xi.n_elements() * self.eta.n_elements()
    }

    /// Element index from the directional element indices.
    pub fn element_index(&self, ex: usize, ey: usize) -> usize {
        self.eta.n_elements() * ex + ey
    }

    pub fn split_element(&self, e: usize) -> (usize, usize) {
        (e / self.eta.n_elements(), e % self.eta.n_elements())
    }

    /// Global indices of the functions active on element `e`, ordered as
    /// the Kronecker product (η fastest).
    pub fn element_functions(&self, e: usize) -> Vec<usize> {
        let (ex, ey) = self.split_element(e);
        let mut out = Vec::new();
        for i in self.xi.element_functions(ex) {
            for j in self.eta.element_functions(ey) {
                out.push(self.index(i, j));
            }
        }
        out
    }

    pub fn eval(&self, xi: f64, eta: f64, order: DerivOrder) -> Result<TensorBasis, SplineError> {
        let bx = self.xi.eval(xi, order)?;
        let by = self.eta.eval(eta, order)?;
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut grads = Vec::new();
        for (a, nx) in bx.values.iter().enumerate() {
            for (b, ny) in by.values.iter().enumerate() {
                indices.push(self.index(bx.first + a, by.first + b));
                values.push(nx * ny);
                if order == DerivOrder::First {
                    grads.push([bx.derivs[a] * ny, nx * by.derivs[b]]);
                }
            }
        }
        if let Some(w) = &self.weights {
            let wl: Vec<f64> = indices.iter().map(|&g| w[g]).collect();
            let big_w: f64 = values.iter().zip(&wl).map(|(n, w)| n * w).sum();
            if !(big_w > 0.0) {
                return Err(SplineError::NonPositiveWeightFunction(big_w));
            }
            if order == DerivOrder::First {
                let mut dw = [0.0; 2];
                for (g, w) in grads.iter().zip(&wl) {
                    dw[0] += g[0] * w;
                    dw[1] += g[1] * w;
                }
                for k in 0..values.len() {
                    for d in 0..2 {
                        grads[k][d] =
                            wl[k] * (grads[k][d] * big_w - values[k] * dw[d]) / (big_w * big_w);
                    }
                }
            }
            for (v, w) in values.iter_mut().zip(&wl) {
                *v *= w / big_w;
            }
        }
        Ok(TensorBasis {
            indices,
            values,
            grads,
        })
    }
}
