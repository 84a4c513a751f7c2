//! Numerical inf-sup test: `β_h² = min λ ≠ 0` of `A u = λ S u`, with `S`
//! the full H¹ norm matrix of the displacement and `uᵀA u = ‖Π div u‖²`
//! for the projection `Π` the formulation applies to the volumetric
//! strain (`PᵀG⁻¹P` globally, `P̂ᵀG P̂` for the Bézier projection).

use nalgebra::DMatrix;

use super::{assemble_operators, ElasticDiscretization, ElasticProblem, Material, PressureSpace};
use crate::geometry::{Geometry2D, Side};
use crate::numerics::{gauss_rule, smallest_nonzero_gen_eig, NumericsError, TripletMatrix};
use crate::{Error, Result};

/// Eigenvalues below this fraction of the largest are treated as zero.
pub const INFSUP_ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfSupPair {
    /// Global L² projection onto degree `p − 1`.
    GlobalReduced,
    /// Bézier (dual) projection onto degree `p − 1`.
    BezierReduced,
    /// Global L² projection onto degree `p`.
    GlobalEqual,
}

impl InfSupPair {
    pub const ALL: [InfSupPair; 3] = [InfSupPair::GlobalReduced, InfSupPair::BezierReduced, InfSupPair::GlobalEqual];

    pub fn label(self) -> &'static str {
        match self {
            InfSupPair::GlobalReduced => "T-L2",
            InfSupPair::BezierReduced => "NS-TP",
            InfSupPair::GlobalEqual => "Qp/Qp",
        }
    }

    fn pressure_space(self) -> PressureSpace {
        match self {
            InfSupPair::GlobalEqual => PressureSpace::Equal,
            _ => PressureSpace::Reduced,
        }
    }
}

/// `β_h` on the quarter annulus with `n_elements` per direction and the
/// bottom edge (`y = 0`) clamped.
pub fn infsup_constant(degree: usize, n_elements: usize, pair: InfSupPair) -> Result<f64> {
    infsup_constant_on(&Geometry2D::quarter_annulus(degree, n_elements)?, pair)
}

/// `β_h` on an arbitrary patch with the `ξ = 1` side clamped.
pub fn infsup_constant_on(geometry: &Geometry2D, pair: InfSupPair) -> Result<f64> {
    let problem = ElasticProblem {
        geometry: geometry.clone(),
        material: Material::new(1.0, 0.3)?,
        dirichlet: (0..2)
            .map(|component| super::Dirichlet {
                side: Side::XiMax,
                component,
                value: 0.0,
            })
            .collect(),
        tractions: vec![],
    };
    let disc = ElasticDiscretization::new(&problem.geometry, pair.pressure_space())?;
    let ops = assemble_operators(&problem, &disc)?;
    let fixed: Vec<usize> = problem.constrained_dofs().iter().map(|(k, _)| *k).collect();
    let free: Vec<usize> = (0..disc.n_dofs()).filter(|k| !fixed.contains(k)).collect();

    let gram = ops.gram.to_dense();
    let a = match pair {
        InfSupPair::GlobalReduced | InfSupPair::GlobalEqual => {
            let chol = gram.cholesky().ok_or(Error::Numerics(NumericsError::NotPositiveDefinite))?;
            let b = ops.p.to_dense().select_columns(&free);
            b.transpose() * chol.solve(&b)
        }
        InfSupPair::BezierReduced => {
            let b = ops.p_hat.to_dense().select_columns(&free);
            b.transpose() * gram * b
        }
    };
    let s = h1_matrix(&disc)?.select_rows(&free).select_columns(&free);
    Ok(smallest_nonzero_gen_eig(&a, &s, INFSUP_ZERO_TOL)?.sqrt())
}

/// Full H¹ inner product matrix for the vector displacement.
fn h1_matrix(disc: &ElasticDiscretization) -> Result<DMatrix<f64>> {
    let nd = disc.n_dofs();
    let rule = gauss_rule(disc.n_quad)?;
    let mut t = TripletMatrix::new(nd, nd);
    for e in 0..disc.elements.len() {
        let el = &disc.elements[e];
        let nl = el.functions().len();
        let mut local = DMatrix::zeros(2 * nl, 2 * nl);
        for ([s, q], w) in rule.tensor(&rule) {
            let ep = el.eval(s, q)?;
            let dv = w * ep.det_j;
            for a in 0..nl {
                for b in 0..nl {
                    let v = dv
                        * (ep.values[a] * ep.values[b]
                            + ep.grads[a][0] * ep.grads[b][0]
                            + ep.grads[a][1] * ep.grads[b][1]);
                    local[(2 * a, 2 * b)] += v;
                    local[(2 * a + 1, 2 * b + 1)] += v;
                }
            }
        }
        let dofs = disc.element_dofs(e);
        t.add_block(&dofs, &dofs, &local);
    }
    Ok(t.to_csr().to_dense())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_by_divergence_norm() {
        // |div u| ≤ √2 |∇u|, so β_h ≤ √2
        for pair in InfSupPair::ALL {
            let b = infsup_constant(2, 2, pair).unwrap();
            assert!(b > 0.0 && b <= 2f64.sqrt() + 1e-12, "{}: {b}", pair.label());
        }
    }

    #[test]
    fn invariant_under_rotation() {
        let g = Geometry2D::quarter_annulus(3, 2).unwrap();
        for pair in InfSupPair::ALL {
            let a = infsup_constant_on(&g, pair).unwrap();
            let b = infsup_constant_on(&g.rotated(0.7), pair).unwrap();
            assert!((a - b).abs() < 1e-8, "{}: {a} vs {b}", pair.label());
        }
    }

    #[test]
    fn single_element_projections_coincide() {
        let a = infsup_constant(3, 1, InfSupPair::GlobalReduced).unwrap();
        let b = infsup_constant(3, 1, InfSupPair::BezierReduced).unwrap();
        assert!((a - b).abs() < 1e-10 * a);
    }
}
