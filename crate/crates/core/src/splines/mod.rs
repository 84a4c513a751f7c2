//! Bernstein, B-spline, NURBS and tensor-product bases on `[0, 1]^d`.

mod bernstein;
mod bspline;
mod nurbs;
pub mod refine;
mod tensor;

pub use bernstein::{binomial, eval_bernstein};
pub(crate) use bernstein::{bernstein_derivatives, bernstein_values};
pub use bspline::{KnotSpan, KnotVector, LocalBasis, SplineSpace};
pub use nurbs::NurbsSpace;
pub use tensor::{TensorBasis, TensorSpace2D};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    Value,
    First,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("parametric point {0} outside [0, 1]")]
    OutOfDomain(f64),
    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),
    #[error("expected {expected} weights or control points, found {found}")]
    WeightCount { expected: usize, found: usize },
    #[error("weights must be positive and finite, found {0}")]
    NonPositiveWeight(f64),
    #[error("weight function evaluated to {0}")]
    NonPositiveWeightFunction(f64),
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn space_strategy() -> impl Strategy<Value = SplineSpace> {
        (0usize..5, prop::collection::vec(0.02f64..0.98, 0..6)).prop_map(|(p, mut interior)| {
            interior.sort_by(|a, b| a.total_cmp(b));
            interior.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            SplineSpace::new(KnotVector::from_interior(p, &interior).unwrap())
        })
    }

    proptest! {
        #[test]
        fn partition_of_unity_and_nonnegativity(space in space_strategy(), xi in 0.0f64..=1.0) {
            let b = space.eval(xi, DerivOrder::First).unwrap();
            let sum: f64 = b.values.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            prop_assert!(b.values.iter().all(|v| *v >= -1e-15));
            let dsum: f64 = b.derivs.iter().sum();
            let scale = b.derivs.iter().fold(1.0f64, |m, d| m.max(d.abs()));
            prop_assert!(dsum.abs() < 1e-12 * scale);
        }

        #[test]
        fn rational_partition_of_unity(
            space in space_strategy(),
            seed in prop::collection::vec(0.2f64..3.0, 12),
            xi in 0.0f64..=1.0,
        ) {
            let w: Vec<f64> = (0..space.n_basis()).map(|i| seed[i % seed.len()]).collect();
            let nurbs = NurbsSpace::new(space, w).unwrap();
            let r = nurbs.eval(xi, DerivOrder::First).unwrap();
            prop_assert!((r.values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(r.derivs.iter().sum::<f64>().abs() < 1e-9);
        }
    }
}
