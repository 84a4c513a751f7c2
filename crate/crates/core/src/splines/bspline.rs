use super::{DerivOrder, SplineError};

/// Degree plus open knot vector on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotVector {
    degree: usize,
    knots: Vec<f64>,
}

impl KnotVector {
    /// Validate an open knot vector: `p+1` leading zeros, `p+1` trailing
    /// ones, nondecreasing, interior multiplicity at most `p` (at most 1
    /// for piecewise constants).
    pub fn new(degree: usize, knots: Vec<f64>) -> Result<Self, SplineError> {
        let p = degree;
        if knots.len() < 2 * (p + 1) {
            return Err(SplineError::InvalidKnots(format!(
                "degree {p} needs at least {} knots, got {}",
                2 * (p + 1),
                knots.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite()) {
            return Err(SplineError::InvalidKnots("non-finite knot".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(SplineError::InvalidKnots("knots must be nondecreasing".into()));
        }
        let m = knots.len();
        if knots[..=p].iter().any(|&k| k != 0.0) || knots[m - p - 1..].iter().any(|&k| k != 1.0) {
            return Err(SplineError::InvalidKnots(format!(
                "open knot vector needs {} copies of 0 and of 1",
                p + 1
            )));
        }
        let max_mult = p.max(1);
        let interior = &knots[p + 1..m - p - 1];
        if interior.iter().any(|&k| k <= 0.0 || k >= 1.0) {
            return Err(SplineError::InvalidKnots(
                "end knots repeated more than p+1 times".into(),
            ));
        }
        let mut i = 0;
        while i < interior.len() {
            let mut j = i;
            while j < interior.len() && interior[j] == interior[i] {
                j += 1;
            }
            if j - i > max_mult {
                return Err(SplineError::InvalidKnots(format!(
                    "interior knot {} has multiplicity {} > {max_mult}",
                    interior[i],
                    j - i
                )));
            }
            i = j;
        }
        Ok(Self { degree, knots })
    }

    /// Open knot vector with the given interior knots.
    pub fn from_interior(degree: usize, interior: &[f64]) -> Result<Self, SplineError> {
        let mut knots = vec![0.0; degree + 1];
        knots.extend_from_slice(interior);
        knots.extend(std::iter::repeat_n(1.0, degree + 1));
        Self::new(degree, knots)
    }

    /// Maximally smooth open knot vector with `n_elements` equal spans.
    pub fn uniform(degree: usize, n_elements: usize) -> Result<Self, SplineError> {
        if n_elements == 0 {
            return Err(SplineError::InvalidKnots("at least one element required".into()));
        }
        let interior: Vec<f64> = (1..n_elements)
            .map(|k| k as f64 / n_elements as f64)
            .collect();
        Self::from_interior(degree, &interior)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Basis dimension `len(Ξ) − p − 1`.
    pub fn n_basis(&self) -> usize {
        self.knots.len() - self.degree - 1
    }

    /// Interior knots with multiplicity.
    pub fn interior(&self) -> &[f64] {
        let p = self.degree;
        &self.knots[p + 1..self.knots.len() - p - 1]
    }

    /// Same interior knots at a different degree.
    pub fn with_degree(&self, degree: usize) -> Result<Self, SplineError> {
        Self::from_interior(degree, self.interior())
    }

    /// Greville abscissae, one per basis function.
    pub fn greville(&self) -> Vec<f64> {
        let p = self.degree;
        if p == 0 {
            return (0..self.n_basis())
                .map(|i| 0.5 * (self.knots[i] + self.knots[i + 1]))
                .collect();
        }
        (0..self.n_basis())
            .map(|i| self.knots[i + 1..=i + p].iter().sum::<f64>() / p as f64)
            .collect()
    }
}

/// A nonzero knot interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotSpan {
    /// Index `s` with `Ξ_s < Ξ_{s+1}`; active functions are `s−p ..= s`.
    pub span: usize,
    pub lo: f64,
    pub hi: f64,
}

impl KnotSpan {
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Global index of the first active function given the degree.
    pub fn first_function(&self, degree: usize) -> usize {
        self.span - degree
    }

    /// Map a parametric point into the element coordinate `[0, 1]`.
    pub fn local(&self, xi: f64) -> f64 {
        ((xi - self.lo) / self.length()).clamp(0.0, 1.0)
    }

    pub fn global(&self, t: f64) -> f64 {
        self.lo + t * self.length()
    }
}

/// Nonzero B-spline basis functions and (optionally) their derivatives at
/// one parametric point.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    pub element: usize,
    /// Global index of `values[0]`.
    pub first: usize,
    pub values: Vec<f64>,
    /// Empty unless first derivatives were requested.
    pub derivs: Vec<f64>,
}

/// Univariate B-spline space.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace {
    knot_vector: KnotVector,
    elements: Vec<KnotSpan>,
}

impl SplineSpace {
    pub fn new(knot_vector: KnotVector) -> Self {
        let k = knot_vector.knots();
        let elements = (0..k.len() - 1)
            .filter(|&s| k[s] < k[s + 1])
            .map(|s| KnotSpan {
                span: s,
                lo: k[s],
                hi: k[s + 1],
            })
            .collect();
        Self {
            knot_vector,
            elements,
        }
    }

    pub fn uniform(degree: usize, n_elements: usize) -> Result<Self, SplineError> {
        Ok(Self::new(KnotVector::uniform(degree, n_elements)?))
    }

    pub fn knot_vector(&self) -> &KnotVector {
        &self.knot_vector
    }

    pub fn degree(&self) -> usize {
        self.knot_vector.degree()
    }

    pub fn n_basis(&self) -> usize {
        self.knot_vector.n_basis()
    }

    pub fn elements(&self) -> &[KnotSpan] {
        &self.elements
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    /// Global indices of the functions active on element `e`.
    pub fn element_functions(&self, e: usize) -> std::ops::Range<usize> {
        let first = self.elements[e].first_function(self.degree());
        first..first + self.degree() + 1
    }

    /// Element containing `xi`: right-open spans, the last one closed.
    pub fn find_element(&self, xi: f64) -> Result<usize, SplineError> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(SplineError::OutOfDomain(xi));
        }
        let idx = self.elements.partition_point(|el| el.lo <= xi);
        Ok(idx.saturating_sub(1).min(self.elements.len() - 1))
    }

    /// Cox–de Boor evaluation of the `p+1` active functions.
    pub fn eval(&self, xi: f64, order: DerivOrder) -> Result<LocalBasis, SplineError> {
        let e = self.find_element(xi)?;
        Ok(self.eval_in_element(e, xi, order))
    }

    /// Evaluate at `xi` using the polynomial piece of element `e`
    /// (allows one-sided evaluation at element boundaries).
    pub fn eval_in_element(&self, e: usize, xi: f64, order: DerivOrder) -> LocalBasis {
        let p = self.degree();
        let span = self.elements[e].span;
        let u = self.knot_vector.knots();
        let mut ndu = vec![vec![0.0; p + 1]; p + 1];
        let mut left = vec![0.0; p + 1];
        let mut right = vec![0.0; p + 1];
        ndu[0][0] = 1.0;
        for j in 1..=p {
            left[j] = xi - u[span + 1 - j];
            right[j] = u[span + j] - xi;
            let mut saved = 0.0;
            for r in 0..j {
                // lower triangle holds knot differences
                ndu[j][r] = right[r + 1] + left[j - r];
                let temp = ndu[r][j - 1] / ndu[j][r];
                ndu[r][j] = saved + right[r + 1] * temp;
                saved = left[j - r] * temp;
            }
            ndu[j][j] = saved;
        }
        let values: Vec<f64> = (0..=p).map(|r| ndu[r][p]).collect();
        let derivs = match order {
            DerivOrder::Value => Vec::new(),
            DerivOrder::First if p == 0 => vec![0.0],
            DerivOrder::First => (0..=p)
                .map(|r| {
                    let mut d = 0.0;
                    if r >= 1 {
                        d += ndu[r - 1][p - 1] / ndu[p][r - 1];
                    }
                    if r < p {
                        d -= ndu[r][p - 1] / ndu[p][r];
                    }
                    p as f64 * d
                })
                .collect(),
        };
        LocalBasis {
            element: e,
            first: span - p,
            values,
            derivs,
        }
    }

    /// Value of a single global basis function (zero outside its support).
    pub fn eval_function(&self, a: usize, xi: f64, order: DerivOrder) -> Result<f64, SplineError> {
        let b = self.eval(xi, order)?;
        if a < b.first || a > b.first + self.degree() {
            return Ok(0.0);
        }
        Ok(match order {
            DerivOrder::Value => b.values[a - b.first],
            DerivOrder::First => b.derivs[a - b.first],
        })
    }

    /// Elements in the support of global function `a`.
    pub fn support(&self, a: usize) -> std::ops::Range<usize> {
        let p = self.degree();
        let start = self
            .elements
            .iter()
            .position(|el| el.span >= a && el.span <= a + p)
            .unwrap_or(self.elements.len());
        let end = self
            .elements
            .iter()
            .rposition(|el| el.span >= a && el.span <= a + p)
            .map_or(start, |i| i + 1);
        start..end
    }
}
