//! Knot insertion and Bézier degree elevation of control polygons.
//! Rational curves are refined in homogeneous coordinates `(w·x, w·y, w)`.

use super::{KnotVector, SplineError};

/// Boehm insertion of a single knot `u ∈ (0, 1)`.
pub fn insert_knot(
    kv: &KnotVector,
    ctrl: &[Vec<f64>],
    u: f64,
) -> Result<(KnotVector, Vec<Vec<f64>>), SplineError> {
    let p = kv.degree();
    let knots = kv.knots();
    if ctrl.len() != kv.n_basis() {
        return Err(SplineError::WeightCount {
            expected: kv.n_basis(),
            found: ctrl.len(),
        });
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(SplineError::OutOfDomain(u));
    }
    // span k with knots[k] <= u < knots[k+1]
    let k = knots.partition_point(|&t| t <= u) - 1;
    let mut out = Vec::with_capacity(ctrl.len() + 1);
    for i in 0..=ctrl.len() {
        let q = if i + p <= k {
            ctrl[i].clone()
        } else if i > k {
            ctrl[i - 1].clone()
        } else {
            let alpha = (u - knots[i]) / (knots[i + p] - knots[i]);
            ctrl[i]
                .iter()
                .zip(&ctrl[i - 1])
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect()
        };
        out.push(q);
    }
    let mut new_knots = knots.to_vec();
    new_knots.insert(k + 1, u);
    Ok((KnotVector::new(p, new_knots)?, out))
}

/// Raise a single Bézier segment by one degree.
pub fn elevate_bezier(ctrl: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let p = ctrl.len() - 1;
    let q = p + 1;
    (0..=q)
        .map(|i| {
            let a = i as f64 / q as f64;
            if i == 0 {
                ctrl[0].clone()
            } else if i == q {
                ctrl[p].clone()
            } else {
                ctrl[i - 1]
                    .iter()
                    .zip(&ctrl[i])
                    .map(|(l, r)| a * l + (1.0 - a) * r)
                    .collect()
            }
        })
        .collect()
}
