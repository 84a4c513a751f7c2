//! Bézier projection onto univariate spline spaces and the global L²
//! projection it approximates.
//!
//! The Bézier pipeline: (1) fit each element in the Bernstein basis,
//! (2) convert the Bézier coefficients to local spline coefficients with
//! `Rᵀ`, (3) average the local contributions with the projection weights.

use nalgebra::{DMatrix, DVector};

use crate::extraction::{
    bernstein_gramian, build_dual_extraction, build_extraction, projection_quadrature_points,
    projection_weights, ElementExtraction,
};
use crate::geometry::Interval;
use crate::numerics::{gauss_rule, solve_dense, Symmetry};
use crate::splines::{bernstein_values, DerivOrder, KnotSpan, SplineSpace};
use crate::Result;

/// Gauss points per element used to measure projection errors.
pub const ERROR_QUADRATURE_POINTS: usize = 12;

/// Best L² fit of `f` (a function of the physical coordinate) in the
/// Bernstein basis of one element: `Qᵉ = (Gᵉ)⁻¹ Fᵉ`.
pub fn element_bezier_coeffs(
    f: &dyn Fn(f64) -> f64,
    p: usize,
    span: &KnotSpan,
    geometry: &Interval,
) -> Result<DVector<f64>> {
    let h = geometry.span_measure(span);
    let g = bernstein_gramian(p, h)?;
    let rule = gauss_rule(projection_quadrature_points(p))?;
    let mut rhs = DVector::zeros(p + 1);
    for (t, w) in rule.iter() {
        let x = geometry.map(span.global(t));
        let fx = f(x);
        for (i, b) in bernstein_values(p, t).into_iter().enumerate() {
            rhs[i] += w * h * b * fx;
        }
    }
    let q = solve_dense(&g, rhs.as_slice(), Symmetry::Symmetric)?;
    Ok(DVector::from_vec(q))
}

/// Bézier projection of `f` onto `space`.
pub fn bezier_project(f: &dyn Fn(f64) -> f64, space: &SplineSpace, geometry: &Interval) -> Result<Vec<f64>> {
    let ext = build_extraction(space);
    let weights = projection_weights(space, geometry)?;
    let mut out = vec![0.0; space.n_basis()];
    for ((x, span), w) in ext.iter().zip(space.elements()).zip(&weights) {
        let local = local_spline_coeffs(f, x, space.degree(), span, geometry)?;
        for ((g, pa), wa) in x.functions.iter().zip(local.iter()).zip(w) {
            out[*g] += wa * pa;
        }
    }
    Ok(out)
}

fn local_spline_coeffs(
    f: &dyn Fn(f64) -> f64,
    x: &ElementExtraction,
    p: usize,
    span: &KnotSpan,
    geometry: &Interval,
) -> Result<DVector<f64>> {
    let q = element_bezier_coeffs(f, p, span, geometry)?;
    Ok(x.r.transpose() * q)
}

/// Bézier projection through the dual basis, `P_A = ∫ N̂_A f dx`.
pub fn dual_project(f: &dyn Fn(f64) -> f64, space: &SplineSpace, geometry: &Interval) -> Result<Vec<f64>> {
    let dual = build_dual_extraction(space, geometry)?;
    let p = space.degree();
    let rule = gauss_rule(projection_quadrature_points(p))?;
    let mut out = vec![0.0; space.n_basis()];
    for (d, span) in dual.iter().zip(space.elements()) {
        let h = geometry.span_measure(span);
        for (t, w) in rule.iter() {
            let fx = f(geometry.map(span.global(t)));
            let nd = d.values(&bernstein_values(p, t));
            for (g, v) in d.functions.iter().zip(nd) {
                out[*g] += w * h * v * fx;
            }
        }
    }
    Ok(out)
}

/// Spline mass matrix on a straight geometry.
pub fn mass_matrix(space: &SplineSpace, geometry: &Interval) -> Result<DMatrix<f64>> {
    let n = space.n_basis();
    let p = space.degree();
    let rule = gauss_rule(projection_quadrature_points(p))?;
    let mut m = DMatrix::zeros(n, n);
    for (e, span) in space.elements().iter().enumerate() {
        let h = geometry.span_measure(span);
        for (t, w) in rule.iter() {
            let b = space.eval_in_element(e, span.global(t), DerivOrder::Value);
            for (i, vi) in b.values.iter().enumerate() {
                for (j, vj) in b.values.iter().enumerate() {
                    m[(b.first + i, b.first + j)] += w * h * vi * vj;
                }
            }
        }
    }
    Ok(m)
}

/// Global L² projection: solve `M c = ∫ N f`.
pub fn global_l2_project(f: &dyn Fn(f64) -> f64, space: &SplineSpace, geometry: &Interval) -> Result<Vec<f64>> {
    let p = space.degree();
    let rule = gauss_rule(projection_quadrature_points(p))?;
    let mut rhs = vec![0.0; space.n_basis()];
    for (e, span) in space.elements().iter().enumerate() {
        let h = geometry.span_measure(span);
        for (t, w) in rule.iter() {
            let xi = span.global(t);
            let fx = f(geometry.map(xi));
            let b = space.eval_in_element(e, xi, DerivOrder::Value);
            for (k, v) in b.values.iter().enumerate() {
                rhs[b.first + k] += w * h * v * fx;
            }
        }
    }
    Ok(solve_dense(&mass_matrix(space, geometry)?, &rhs, Symmetry::Symmetric)?)
}

/// Evaluate `Σ c_A N_A` at the parametric point `xi`.
pub fn eval_field(space: &SplineSpace, coeffs: &[f64], xi: f64) -> Result<f64> {
    let b = space.eval(xi, DerivOrder::Value)?;
    Ok(b.values.iter().enumerate().map(|(k, v)| v * coeffs[b.first + k]).sum())
}

/// `‖f − Σ c_A N_A‖_{L²}` over the geometry.
pub fn l2_error(f: &dyn Fn(f64) -> f64, space: &SplineSpace, geometry: &Interval, coeffs: &[f64]) -> Result<f64> {
    let rule = gauss_rule(ERROR_QUADRATURE_POINTS)?;
    let mut acc = 0.0;
    for (e, span) in space.elements().iter().enumerate() {
        let h = geometry.span_measure(span);
        for (t, w) in rule.iter() {
            let xi = span.global(t);
            let b = space.eval_in_element(e, xi, DerivOrder::Value);
            let uh: f64 = b.values.iter().enumerate().map(|(k, v)| v * coeffs[b.first + k]).sum();
            acc += w * h * (f(geometry.map(xi)) - uh).powi(2);
        }
    }
    Ok(acc.sqrt())
}

/// Planar curve used to illustrate the projection pipeline on `t ∈ [0, 3]`.
pub fn demo_curve(t: f64) -> [f64; 2] {
    [(t / 3.0).powf(1.5), 0.1 * (std::f64::consts::PI * t).sin()]
}

/// Per-component projections of [`demo_curve`].
#[derive(Debug, Clone, PartialEq)]
pub struct CurveProjection {
    pub space: SplineSpace,
    pub geometry: Interval,
    /// Per-element Bézier control points (step one of the pipeline).
    pub bezier_points: Vec<Vec<[f64; 2]>>,
    pub bezier: Vec<[f64; 2]>,
    pub global: Vec<[f64; 2]>,
}

/// Project the demo curve onto a quadratic space with `n_elements`
/// uniform elements.
pub fn project_demo_curve(degree: usize, n_elements: usize) -> Result<CurveProjection> {
    let space = SplineSpace::uniform(degree, n_elements)?;
    let geometry = Interval::new(0.0, 3.0)?;
    let fx = |t: f64| demo_curve(t)[0];
    let fy = |t: f64| demo_curve(t)[1];
    let zip = |a: Vec<f64>, b: Vec<f64>| a.into_iter().zip(b).map(|(x, y)| [x, y]).collect::<Vec<_>>();
    let mut bezier_points = Vec::new();
    for span in space.elements() {
        let qx = element_bezier_coeffs(&fx, degree, span, &geometry)?;
        let qy = element_bezier_coeffs(&fy, degree, span, &geometry)?;
        bezier_points.push(zip(qx.as_slice().to_vec(), qy.as_slice().to_vec()));
    }
    Ok(CurveProjection {
        bezier: zip(
            bezier_project(&fx, &space, &geometry)?,
            bezier_project(&fy, &space, &geometry)?,
        ),
        global: zip(
            global_l2_project(&fx, &space, &geometry)?,
            global_l2_project(&fy, &space, &geometry)?,
        ),
        bezier_points,
        space,
        geometry,
    })
}
