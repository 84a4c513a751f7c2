//! Bézier extraction operators, Bernstein Gramians, projection weights and
//! the dual (Bézier-projection) extraction operators built from them.
//!
//! Conventions: on element `e` the spline functions are `N = C·B`, the
//! reconstruction operator is `R = C⁻¹`, and the dual functions are
//! `N̂ = D̂·B` with `D̂ = diag(ω)·Rᵀ·G⁻¹`, so that `∫ N̂ Nᵀ = diag(ω)`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::geometry::{tensor_bernstein, Geometry2D, GeometryError, Interval};
use crate::numerics::{gauss_rule, NumericsError};
use crate::splines::{bernstein_values, binomial, DerivOrder, SplineSpace, TensorSpace2D};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractionError {
    #[error("element measure must be positive, found {0:e}")]
    NonPositiveMeasure(f64),
    #[error("singular matrix on element {element}")]
    Singular { element: usize },
    #[error("space and geometry disagree: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Extraction and reconstruction operators of one element.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementExtraction {
    pub element: usize,
    /// Global indices of the active functions, in local order.
    pub functions: Vec<usize>,
    pub c: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

/// Dual extraction data of one element.
#[derive(Debug, Clone, PartialEq)]
pub struct DualExtraction {
    pub element: usize,
    pub functions: Vec<usize>,
    pub gramian: DMatrix<f64>,
    pub weights: Vec<f64>,
    pub d_hat: DMatrix<f64>,
}

impl DualExtraction {
    /// Dual function values `D̂·B` from Bernstein values on this element.
    pub fn values(&self, bernstein: &[f64]) -> Vec<f64> {
        (&self.d_hat * DVector::from_column_slice(bernstein))
            .iter()
            .copied()
            .collect()
    }
}

/// Rational dual basis `R̄_A = W·N̂_A / w_A`, biorthogonal to `R_A = w_A N_A / W`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalDualBasis {
    pub dual: Vec<DualExtraction>,
    pub control_weights: Vec<f64>,
}

impl RationalDualBasis {
    /// Rational dual values on element `e` given Bernstein values and the
    /// weight function `W` at the same point.
    pub fn values(&self, e: usize, bernstein: &[f64], big_w: f64) -> Vec<f64> {
        let d = &self.dual[e];
        d.values(bernstein)
            .into_iter()
            .zip(&d.functions)
            .map(|(v, &g)| v * big_w / self.control_weights[g])
            .collect()
    }
}

/// Element extraction operators by repeated knot insertion.
pub fn build_extraction(space: &SplineSpace) -> Vec<ElementExtraction> {
    let p = space.degree();
    let nel = space.n_elements();
    let knots = space.knot_vector().knots();
    let n = space.n_basis();
    let mut cs = vec![DMatrix::<f64>::identity(p + 1, p + 1); nel];
    if p > 0 {
        let mut a = p;
        let mut b = p + 1;
        let mut nb = 0;
        let mut alphas = vec![0.0; p];
        while b < n {
            let i = b;
            while b < n && knots[b + 1] == knots[b] {
                b += 1;
            }
            let mult = b - i + 1;
            if mult < p {
                let numer = knots[b] - knots[a];
                for j in (mult + 1..=p).rev() {
                    alphas[j - mult - 1] = numer / (knots[a + j] - knots[a]);
                }
                let r = p - mult;
                for j in 1..=r {
                    let save = r - j;
                    let s = mult + j;
                    for k in (s..=p).rev() {
                        let alpha = alphas[k - s];
                        for row in 0..=p {
                            let v = alpha * cs[nb][(row, k)] + (1.0 - alpha) * cs[nb][(row, k - 1)];
                            cs[nb][(row, k)] = v;
                        }
                    }
                    if b < n {
                        for q in 0..=j {
                            let v = cs[nb][(p - j + q, p)];
                            cs[nb + 1][(save + q, save)] = v;
                        }
                    }
                }
            }
            nb += 1;
            if b < n {
                a = b;
                b += 1;
            }
        }
    }
    cs.into_iter()
        .enumerate()
        .map(|(e, c)| {
            let r = c.clone().lu().try_inverse().expect("extraction operators are invertible");
            ElementExtraction {
                element: e,
                functions: space.element_functions(e).collect(),
                c,
                r,
            }
        })
        .collect()
}

/// Tensor-product extraction `Cᵉ = C_ξ ⊗ C_η` for every element.
pub fn build_extraction_2d(space: &TensorSpace2D) -> Vec<ElementExtraction> {
    let ex = build_extraction(space.xi());
    let ey = build_extraction(space.eta());
    (0..space.n_elements())
        .map(|e| {
            let (i, j) = space.split_element(e);
            ElementExtraction {
                element: e,
                functions: space.element_functions(e),
                c: ex[i].c.kronecker(&ey[j].c),
                r: ex[i].r.kronecker(&ey[j].r),
            }
        })
        .collect()
}

/// Closed-form Bernstein Gramian on an element of the given measure.
pub fn bernstein_gramian(p: usize, measure: f64) -> Result<DMatrix<f64>, ExtractionError> {
    if !(measure > 0.0) {
        return Err(ExtractionError::NonPositiveMeasure(measure));
    }
    let denom = (2 * p + 1) as f64;
    Ok(DMatrix::from_fn(p + 1, p + 1, |i, j| {
        measure * binomial(p, i) * binomial(p, j) / (denom * binomial(2 * p, i + j))
    }))
}

/// Bernstein Gramian by `(p+1)`-point Gauss quadrature.
pub fn bernstein_gramian_quadrature(p: usize, measure: f64) -> Result<DMatrix<f64>, ExtractionError> {
    if !(measure > 0.0) {
        return Err(ExtractionError::NonPositiveMeasure(measure));
    }
    let rule = gauss_rule(p + 1)?;
    let mut g = DMatrix::zeros(p + 1, p + 1);
    for (t, w) in rule.iter() {
        let b = DVector::from_vec(bernstein_values(p, t));
        g += (&b * b.transpose()) * (w * measure);
    }
    Ok(g)
}

/// Number of Gauss points used for projection integrals of degree `p`.
pub fn projection_quadrature_points(p: usize) -> usize {
    p + 2
}

/// Bézier-projection weights `ωᵉ_a = ∫_{Ωᵉ} N_a / ∫_{supp N_A} N_A` for a
/// straight 1D geometry.
pub fn projection_weights(space: &SplineSpace, geometry: &Interval) -> Result<Vec<Vec<f64>>, ExtractionError> {
    let ext = build_extraction(space);
    let p = space.degree();
    let rule = gauss_rule(projection_quadrature_points(p))?;
    let mut local = Vec::with_capacity(ext.len());
    for (x, span) in ext.iter().zip(space.elements()) {
        let h = geometry.span_measure(span);
        if !(h > 0.0) {
            return Err(ExtractionError::NonPositiveMeasure(h));
        }
        let mut ints = vec![0.0; p + 1];
        for (t, w) in rule.iter() {
            let n = &x.c * DVector::from_vec(bernstein_values(p, t));
            for a in 0..=p {
                ints[a] += w * h * n[a];
            }
        }
        local.push(ints);
    }
    Ok(normalize_weights(&ext, local, space.n_basis()))
}

fn normalize_weights(ext: &[ElementExtraction], local: Vec<Vec<f64>>, n_basis: usize) -> Vec<Vec<f64>> {
    let mut total = vec![0.0; n_basis];
    for (x, ints) in ext.iter().zip(&local) {
        for (g, v) in x.functions.iter().zip(ints) {
            total[*g] += v;
        }
    }
    ext.iter()
        .zip(local)
        .map(|(x, ints)| x.functions.iter().zip(ints).map(|(g, v)| v / total[*g]).collect())
        .collect()
}

fn dual_from_parts(
    x: &ElementExtraction,
    gramian: DMatrix<f64>,
    weights: Vec<f64>,
) -> Result<DualExtraction, ExtractionError> {
    let g_inv = gramian
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(ExtractionError::Singular { element: x.element })?;
    let d_hat = DMatrix::from_diagonal(&DVector::from_column_slice(&weights)) * x.r.transpose() * g_inv;
    Ok(DualExtraction {
        element: x.element,
        functions: x.functions.clone(),
        gramian,
        weights,
        d_hat,
    })
}

/// Dual extraction operators of a univariate space on a straight geometry.
pub fn build_dual_extraction(space: &SplineSpace, geometry: &Interval) -> Result<Vec<DualExtraction>, ExtractionError> {
    let ext = build_extraction(space);
    let weights = projection_weights(space, geometry)?;
    ext.iter()
        .zip(weights)
        .zip(space.elements())
        .map(|((x, w), span)| {
            let g = bernstein_gramian(space.degree(), geometry.span_measure(span))?;
            dual_from_parts(x, g, w)
        })
        .collect()
}

/// Dual extraction operators of a (non-rational) tensor space defined on the
/// elements of a 2D geometry; Gramians and weights use the physical measure
/// with an `n_quad × n_quad` Gauss rule.
pub fn build_dual_extraction_2d(
    space: &TensorSpace2D,
    geometry: &Geometry2D,
    n_quad: usize,
) -> Result<Vec<DualExtraction>, ExtractionError> {
    let gs = geometry.space();
    if space.xi().knot_vector().interior() != gs.xi().knot_vector().interior()
        || space.eta().knot_vector().interior() != gs.eta().knot_vector().interior()
    {
        return Err(ExtractionError::Mismatch("element partitions differ".into()));
    }
    let ext = build_extraction_2d(space);
    let (px, py) = (space.xi().degree(), space.eta().degree());
    let rule = gauss_rule(n_quad)?;
    let points = rule.tensor(&rule);
    let nloc = (px + 1) * (py + 1);
    let mut grams = Vec::with_capacity(ext.len());
    let mut local = Vec::with_capacity(ext.len());
    for (x, gel) in ext.iter().zip(geometry.elements()) {
        let mut g = DMatrix::zeros(nloc, nloc);
        let mut ints = vec![0.0; nloc];
        for &([s, t], w) in &points {
            let dj = gel.eval(s, t)?.det_j * w;
            let b = DVector::from_vec(tensor_bernstein(px, py, s, t).0);
            g += (&b * b.transpose()) * dj;
            let n = &x.c * &b;
            for a in 0..nloc {
                ints[a] += dj * n[a];
            }
        }
        grams.push(g);
        local.push(ints);
    }
    let weights = normalize_weights(&ext, local, space.n_basis());
    ext.iter()
        .zip(grams)
        .zip(weights)
        .map(|((x, g), w)| dual_from_parts(x, g, w))
        .collect()
}

/// Assembled `∫ N̂_A N_B dΩ` over a 2D geometry. For a rational `space`
/// the primal functions are the NURBS `R_B` and the duals the rational
/// duals `W N̂_A / w_A`; otherwise plain B-splines and their duals.
pub fn dual_primal_gram_2d(
    space: &TensorSpace2D,
    geometry: &Geometry2D,
    n_quad: usize,
) -> Result<DMatrix<f64>, ExtractionError> {
    let bspline = TensorSpace2D::new(space.xi().clone(), space.eta().clone());
    let ext = build_extraction_2d(&bspline);
    let dual = rational_dualize(
        build_dual_extraction_2d(&bspline, geometry, n_quad)?,
        space
            .weights()
            .map(<[f64]>::to_vec)
            .unwrap_or_else(|| vec![1.0; bspline.n_basis()]),
    );
    let (px, py) = (bspline.xi().degree(), bspline.eta().degree());
    let rule = gauss_rule(n_quad)?;
    let n = bspline.n_basis();
    let mut m = DMatrix::zeros(n, n);
    for (e, gel) in geometry.elements().iter().enumerate() {
        let f = &ext[e].functions;
        for ([s, t], w) in rule.tensor(&rule) {
            let dj = gel.eval(s, t)?.det_j * w;
            let b = tensor_bernstein(px, py, s, t).0;
            let nb = &ext[e].c * DVector::from_column_slice(&b);
            let big_w: f64 = f.iter().zip(nb.iter()).map(|(g, v)| dual.control_weights[*g] * v).sum();
            let d = dual.values(e, &b, big_w);
            for (i, gi) in f.iter().enumerate() {
                for (j, gj) in f.iter().enumerate() {
                    m[(*gi, *gj)] += dj * d[i] * dual.control_weights[*gj] * nb[j] / big_w;
                }
            }
        }
    }
    Ok(m)
}

/// Pair a dual basis with NURBS control weights.
pub fn rational_dualize(dual: Vec<DualExtraction>, control_weights: Vec<f64>) -> RationalDualBasis {
    RationalDualBasis {
        dual,
        control_weights,
    }
}

/// Assembled matrix `M_AB = ∫ N̂_A N_B dx` on a straight 1D geometry,
/// with the primal basis evaluated by Cox–de Boor. With `control_weights`
/// the rational pair `(R̄_A, R_B)` is used instead.
pub fn dual_primal_gram(
    space: &SplineSpace,
    geometry: &Interval,
    dual: &[DualExtraction],
    control_weights: Option<&[f64]>,
) -> Result<DMatrix<f64>, ExtractionError> {
    let p = space.degree();
    let n = space.n_basis();
    let rule = gauss_rule(p + 3)?;
    let mut m = DMatrix::zeros(n, n);
    for (d, span) in dual.iter().zip(space.elements()) {
        let h = geometry.span_measure(span);
        for (t, w) in rule.iter() {
            let xi = span.global(t);
            let b = bernstein_values(p, t);
            let prim = space.eval_in_element(d.element, xi, DerivOrder::Value);
            let mut dv = d.values(&b);
            let mut pv = prim.values.clone();
            if let Some(cw) = control_weights {
                let big_w: f64 = pv.iter().enumerate().map(|(k, v)| v * cw[prim.first + k]).sum();
                for (k, v) in pv.iter_mut().enumerate() {
                    *v *= cw[prim.first + k] / big_w;
                }
                for (v, &g) in dv.iter_mut().zip(&d.functions) {
                    *v *= big_w / cw[g];
                }
            }
            for (a, &ga) in d.functions.iter().enumerate() {
                for (k, pvk) in pv.iter().enumerate() {
                    m[(ga, prim.first + k)] += w * h * dv[a] * pvk;
                }
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splines::KnotVector;
    use approx::assert_abs_diff_eq;

    fn three_element() -> SplineSpace {
        SplineSpace::uniform(2, 3).unwrap()
    }

    #[test]
    fn single_element_is_identity() {
        let ext = build_extraction(&SplineSpace::uniform(2, 1).unwrap());
        assert_eq!(ext.len(), 1);
        assert_eq!(ext[0].c, DMatrix::identity(3, 3));
    }

    #[test]
    fn middle_element_operator() {
        let ext = build_extraction(&three_element());
        let want = DMatrix::from_row_slice(3, 3, &[0.5, 0.0, 0.0, 0.5, 1.0, 0.5, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(ext[1].c, want, epsilon = 1e-15);
    }

    #[test]
    fn reconstruction_inverts_extraction() {
        let kv = KnotVector::new(3, vec![0., 0., 0., 0., 0.2, 0.5, 0.5, 0.7, 1., 1., 1., 1.]).unwrap();
        for x in build_extraction(&SplineSpace::new(kv)) {
            let prod = &x.c * &x.r;
            assert!((prod - DMatrix::identity(4, 4)).amax() < 1e-12);
        }
    }

    #[test]
    fn degree_zero() {
        let ext = build_extraction(&SplineSpace::uniform(0, 4).unwrap());
        assert_eq!(ext.len(), 4);
        assert_eq!(ext[2].functions, vec![2]);
        assert_eq!(ext[2].c[(0, 0)], 1.0);
    }

    #[test]
    fn gramian_values() {
        let g = bernstein_gramian(1, 1.0).unwrap();
        assert_abs_diff_eq!(g[(0, 0)], 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g[(0, 1)], 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bernstein_gramian(2, 1.0).unwrap()[(0, 0)], 0.2, epsilon = 1e-15);
        for p in 0..6 {
            let a = bernstein_gramian(p, 0.37).unwrap();
            let b = bernstein_gramian_quadrature(p, 0.37).unwrap();
            assert!((a - b).amax() < 1e-13);
        }
        assert!(bernstein_gramian(2, 0.0).is_err());
    }

    #[test]
    fn weights_sum_to_one() {
        let space = SplineSpace::new(KnotVector::from_interior(3, &[0.1, 0.35, 0.6, 0.8]).unwrap());
        let w = projection_weights(&space, &Interval::new(0.0, 3.0).unwrap()).unwrap();
        let ext = build_extraction(&space);
        let mut sums = vec![0.0; space.n_basis()];
        for (x, we) in ext.iter().zip(&w) {
            for (g, v) in x.functions.iter().zip(we) {
                assert!(*v > 0.0 && *v <= 1.0);
                sums[*g] += v;
            }
        }
        assert!(sums.iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert_eq!(w[0][0], 1.0);
    }

    #[test]
    fn element_dual_property() {
        let space = three_element();
        let geo = Interval::new(0.0, 3.0).unwrap();
        let dual = build_dual_extraction(&space, &geo).unwrap();
        let ext = build_extraction(&space);
        for (d, x) in dual.iter().zip(&ext) {
            let m = &d.d_hat * &d.gramian * x.c.transpose();
            let want = DMatrix::from_diagonal(&DVector::from_column_slice(&d.weights));
            assert!((m - want).amax() < 1e-12);
        }
    }

    #[test]
    fn assembled_biorthogonality() {
        let space = three_element();
        let geo = Interval::new(0.0, 3.0).unwrap();
        let dual = build_dual_extraction(&space, &geo).unwrap();
        let m = dual_primal_gram(&space, &geo, &dual, None).unwrap();
        assert!((m - DMatrix::identity(5, 5)).amax() < 1e-10);
    }
}
