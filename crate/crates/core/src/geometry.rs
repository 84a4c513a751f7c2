//! Geometry mappings: straight 1D intervals and 2D tensor-product
//! (B-spline or NURBS) patches evaluated element by element through
//! Bézier extraction.

use thiserror::Error;

use crate::extraction::{build_extraction_2d, ElementExtraction};
use crate::splines::{
    bernstein_derivatives, bernstein_values, refine, DerivOrder, KnotSpan, KnotVector, SplineError,
    SplineSpace, TensorSpace2D,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("expected {expected} control points, found {found}")]
    ControlPointCount { expected: usize, found: usize },
    #[error("non-positive Jacobian determinant {det_j:e} in element {element}")]
    InvertedElement { element: usize, det_j: f64 },
    #[error("degenerate interval [{0}, {1}]")]
    DegenerateInterval(f64, f64),
}

/// Affine map of `[0, 1]` onto `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub start: f64,
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Self, GeometryError> {
        if !(end > start) || !start.is_finite() || !end.is_finite() {
            return Err(GeometryError::DegenerateInterval(start, end));
        }
        Ok(Self { start, end })
    }

    pub fn unit() -> Self {
        Self {
            start: 0.0,
            end: 1.0,
        }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn map(&self, xi: f64) -> f64 {
        self.start + xi * self.length()
    }

    /// Physical length of a knot span.
    pub fn span_measure(&self, span: &KnotSpan) -> f64 {
        span.length() * self.length()
    }
}

/// Tensor-product Bernstein values and local derivatives at `(s, t)`,
/// η-direction index fastest.
pub fn tensor_bernstein(px: usize, py: usize, s: f64, t: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
    let bx = bernstein_values(px, s);
    let by = bernstein_values(py, t);
    let dx = bernstein_derivatives(px, s);
    let dy = bernstein_derivatives(py, t);
    let mut values = Vec::with_capacity(bx.len() * by.len());
    let mut grads = Vec::with_capacity(bx.len() * by.len());
    for i in 0..=px {
        for j in 0..=py {
            values.push(bx[i] * by[j]);
            grads.push([dx[i] * by[j], bx[i] * dy[j]]);
        }
    }
    (values, grads)
}

/// A boundary side of the parametric square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    XiMin,
    XiMax,
    EtaMin,
    EtaMax,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::XiMin, Side::XiMax, Side::EtaMin, Side::EtaMax];

    /// Local element coordinates of the point at edge parameter `t`.
    pub fn local_point(self, t: f64) -> (f64, f64) {
        match self {
            Side::XiMin => (0.0, t),
            Side::XiMax => (1.0, t),
            Side::EtaMin => (t, 0.0),
            Side::EtaMax => (t, 1.0),
        }
    }
}

/// A 2D patch: tensor space (possibly rational) plus control points.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry2D {
    space: TensorSpace2D,
    control_points: Vec<[f64; 2]>,
}

/// Basis functions of the geometry space at one point of an element, with
/// physical gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementPoint {
    pub x: [f64; 2],
    pub det_j: f64,
    /// Jacobian `∂x_i/∂ξ_j` with respect to the global parametric coordinates.
    pub jacobian: [[f64; 2]; 2],
    pub values: Vec<f64>,
    pub grads: Vec<[f64; 2]>,
}

/// Per-element data for evaluating the geometry basis through extraction.
#[derive(Debug, Clone)]
pub struct BezierElement2D {
    pub index: usize,
    pub spans: [KnotSpan; 2],
    pub degrees: [usize; 2],
    pub extraction: ElementExtraction,
    weights: Option<Vec<f64>>,
    points: Vec<[f64; 2]>,
}

impl BezierElement2D {
    pub fn functions(&self) -> &[usize] {
        &self.extraction.functions
    }

    /// Parametric area of the element.
    pub fn parametric_area(&self) -> f64 {
        self.spans[0].length() * self.spans[1].length()
    }

    /// Global parametric coordinates of the local point `(s, t)`.
    pub fn parametric(&self, s: f64, t: f64) -> [f64; 2] {
        [self.spans[0].global(s), self.spans[1].global(t)]
    }

    /// Outward unit normal and edge length element `dΓ/dt` (per unit local
    /// edge parameter) at an evaluated boundary point.
    pub fn edge_frame(&self, side: Side, point: &ElementPoint) -> ([f64; 2], f64) {
        let j = point.jacobian;
        let (tangent, h, normal) = match side {
            Side::XiMin | Side::XiMax => {
                let sign = if side == Side::XiMax { 1.0 } else { -1.0 };
                ([j[0][1], j[1][1]], self.spans[1].length(), [sign * j[1][1], -sign * j[0][1]])
            }
            Side::EtaMin | Side::EtaMax => {
                let sign = if side == Side::EtaMax { 1.0 } else { -1.0 };
                ([j[0][0], j[1][0]], self.spans[0].length(), [-sign * j[1][0], sign * j[0][0]])
            }
        };
        let len = tangent[0].hypot(tangent[1]);
        let nn = normal[0].hypot(normal[1]);
        ([normal[0] / nn, normal[1] / nn], len * h)
    }

    /// Evaluate basis, mapping and physical gradients at local `(s, t)`.
    /// `det_j` is with respect to the local `[0,1]²` coordinates.
    pub fn eval(&self, s: f64, t: f64) -> Result<ElementPoint, GeometryError> {
        let [px, py] = self.degrees;
        let (b, db) = tensor_bernstein(px, py, s, t);
        let c = &self.extraction.c;
        let nloc = c.nrows();
        let hx = self.spans[0].length();
        let hy = self.spans[1].length();
        let mut values = vec![0.0; nloc];
        let mut grads = vec![[0.0; 2]; nloc];
        for a in 0..nloc {
            for j in 0..b.len() {
                let cij = c[(a, j)];
                if cij != 0.0 {
                    values[a] += cij * b[j];
                    grads[a][0] += cij * db[j][0] / hx;
                    grads[a][1] += cij * db[j][1] / hy;
                }
            }
        }
        if let Some(w) = &self.weights {
            let big_w: f64 = values.iter().zip(w).map(|(n, w)| n * w).sum();
            let mut dw = [0.0; 2];
            for (g, wk) in grads.iter().zip(w) {
                dw[0] += g[0] * wk;
                dw[1] += g[1] * wk;
            }
            for a in 0..nloc {
                for d in 0..2 {
                    grads[a][d] = w[a] * (grads[a][d] * big_w - values[a] * dw[d]) / (big_w * big_w);
                }
                values[a] *= w[a] / big_w;
            }
        }
        let mut x = [0.0; 2];
        let mut jac = [[0.0; 2]; 2];
        for a in 0..nloc {
            let pt = self.points[a];
            for i in 0..2 {
                x[i] += values[a] * pt[i];
                for j in 0..2 {
                    jac[i][j] += grads[a][j] * pt[i];
                }
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !(det > 0.0) {
            return Err(GeometryError::InvertedElement {
                element: self.index,
                det_j: det,
            });
        }
        // physical gradient: ∇_x N = J⁻ᵀ ∇_ξ N
        let inv = [
            [jac[1][1] / det, -jac[0][1] / det],
            [-jac[1][0] / det, jac[0][0] / det],
        ];
        for g in grads.iter_mut() {
            let (gx, gy) = (g[0], g[1]);
            *g = [inv[0][0] * gx + inv[1][0] * gy, inv[0][1] * gx + inv[1][1] * gy];
        }
        Ok(ElementPoint {
            x,
            det_j: det * hx * hy,
            jacobian: jac,
            values,
            grads,
        })
    }
}

impl Geometry2D {
    pub fn new(space: TensorSpace2D, control_points: Vec<[f64; 2]>) -> Result<Self, GeometryError> {
        if control_points.len() != space.n_basis() {
            return Err(GeometryError::ControlPointCount {
                expected: space.n_basis(),
                found: control_points.len(),
            });
        }
        Ok(Self {
            space,
            control_points,
        })
    }

    /// Quarter annulus `R₁ = 1`, `R₂ = 4` from the single-element quadratic
    /// NURBS table, degree-elevated to `degree` and uniformly refined to
    /// `n_elements` per direction. ξ runs along the arc from `(0, r)` to
    /// `(r, 0)`, η runs radially outward.
    pub fn quarter_annulus(degree: usize, n_elements: usize) -> Result<Self, GeometryError> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // rows: radial index, columns: angular index
        let table_points = [
            [[0.0, 1.0], [1.0, 1.0], [1.0, 0.0]],
            [[0.0, 2.5], [2.5, 2.5], [2.5, 0.0]],
            [[0.0, 4.0], [4.0, 4.0], [4.0, 0.0]],
        ];
        let table_weights = [1.0, s, 1.0];
        // homogeneous net indexed [angular i][radial j]
        let mut net: Vec<Vec<Vec<f64>>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let w = table_weights[i];
                        let p = table_points[j][i];
                        vec![p[0] * w, p[1] * w, w]
                    })
                    .collect()
            })
            .collect();
        let kv2 = KnotVector::uniform(2, 1)?;
        Self::refine_homogeneous(&mut net, kv2.clone(), kv2, degree, n_elements)
    }

    /// Cook's membrane quadrilateral `(0,0)–(48,44)–(48,60)–(0,44)`.
    pub fn cook_membrane(degree: usize, n_elements: usize) -> Result<Self, GeometryError> {
        Self::bilinear(
            [[0.0, 0.0], [48.0, 44.0], [48.0, 60.0], [0.0, 44.0]],
            degree,
            n_elements,
            n_elements,
        )
    }

    /// Bilinear patch through corners ordered counter-clockwise from
    /// `(ξ,η) = (0,0)`; exact in any degree via Greville interpolation.
    pub fn bilinear(
        corners: [[f64; 2]; 4],
        degree: usize,
        nx: usize,
        ny: usize,
    ) -> Result<Self, GeometryError> {
        let sx = SplineSpace::uniform(degree, nx)?;
        let sy = SplineSpace::uniform(degree, ny)?;
        let gx = sx.knot_vector().greville();
        let gy = sy.knot_vector().greville();
        let [c00, c10, c11, c01] = corners;
        let mut pts = Vec::with_capacity(gx.len() * gy.len());
        for &u in &gx {
            for &v in &gy {
                let mut p = [0.0; 2];
                for d in 0..2 {
                    p[d] = (1.0 - u) * (1.0 - v) * c00[d]
                        + u * (1.0 - v) * c10[d]
                        + u * v * c11[d]
                        + (1.0 - u) * v * c01[d];
                }
                pts.push(p);
            }
        }
        Self::new(TensorSpace2D::new(sx, sy), pts)
    }

    fn refine_homogeneous(
        net: &mut Vec<Vec<Vec<f64>>>,
        mut kx: KnotVector,
        mut ky: KnotVector,
        degree: usize,
        n_elements: usize,
    ) -> Result<Self, GeometryError> {
        // degree elevation of the single Bézier patch in both directions
        while kx.degree() < degree {
            // along ξ: for each fixed j
            let nj = net[0].len();
            let cols: Vec<Vec<Vec<f64>>> = (0..nj)
                .map(|j| refine::elevate_bezier(&net.iter().map(|row| row[j].clone()).collect::<Vec<_>>()))
                .collect();
            *net = (0..cols[0].len())
                .map(|i| (0..nj).map(|j| cols[j][i].clone()).collect())
                .collect();
            kx = KnotVector::uniform(kx.degree() + 1, 1)?;
        }
        while ky.degree() < degree {
            for row in net.iter_mut() {
                *row = refine::elevate_bezier(row);
            }
            ky = KnotVector::uniform(ky.degree() + 1, 1)?;
        }
        for k in 1..n_elements {
            let u = k as f64 / n_elements as f64;
            let nj = net[0].len();
            let mut cols = Vec::with_capacity(nj);
            let mut new_kx = kx.clone();
            for j in 0..nj {
                let col: Vec<Vec<f64>> = net.iter().map(|row| row[j].clone()).collect();
                let (kv, c) = refine::insert_knot(&kx, &col, u)?;
                new_kx = kv;
                cols.push(c);
            }
            *net = (0..cols[0].len())
                .map(|i| (0..nj).map(|j| cols[j][i].clone()).collect())
                .collect();
            kx = new_kx;
            let mut new_ky = ky.clone();
            for row in net.iter_mut() {
                let (kv, r) = refine::insert_knot(&ky, row, u)?;
                *row = r;
                new_ky = kv;
            }
            ky = new_ky;
        }
        let mut pts = Vec::new();
        let mut weights = Vec::new();
        for row in net.iter() {
            for h in row {
                let w = h[2];
                pts.push([h[0] / w, h[1] / w]);
                weights.push(w);
            }
        }
        let space = TensorSpace2D::rational(SplineSpace::new(kx), SplineSpace::new(ky), weights)?;
        Self::new(space, pts)
    }

    pub fn space(&self) -> &TensorSpace2D {
        &self.space
    }

    pub fn control_points(&self) -> &[[f64; 2]] {
        &self.control_points
    }

    /// Rigid rotation of the whole patch about the origin.
    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            space: self.space.clone(),
            control_points: self
                .control_points
                .iter()
                .map(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]])
                .collect(),
        }
    }

    /// Physical point and parametric Jacobian via global (Cox–de Boor)
    /// evaluation.
    pub fn map(&self, xi: f64, eta: f64) -> Result<([f64; 2], [[f64; 2]; 2]), GeometryError> {
        let b = self.space.eval(xi, eta, DerivOrder::First)?;
        let mut x = [0.0; 2];
        let mut jac = [[0.0; 2]; 2];
        for ((g, v), d) in b.indices.iter().zip(&b.values).zip(&b.grads) {
            let p = self.control_points[*g];
            for i in 0..2 {
                x[i] += v * p[i];
                for j in 0..2 {
                    jac[i][j] += d[j] * p[i];
                }
            }
        }
        Ok((x, jac))
    }

    /// Global indices of the functions that are nonzero on `side`.
    pub fn side_functions(&self, side: Side) -> Vec<usize> {
        let (nx, ny) = (self.space.xi().n_basis(), self.space.eta().n_basis());
        match side {
            Side::XiMin => (0..ny).map(|j| self.space.index(0, j)).collect(),
            Side::XiMax => (0..ny).map(|j| self.space.index(nx - 1, j)).collect(),
            Side::EtaMin => (0..nx).map(|i| self.space.index(i, 0)).collect(),
            Side::EtaMax => (0..nx).map(|i| self.space.index(i, ny - 1)).collect(),
        }
    }

    /// Elements with an edge on `side`.
    pub fn side_elements(&self, side: Side) -> Vec<usize> {
        let (ex, ey) = (self.space.xi().n_elements(), self.space.eta().n_elements());
        match side {
            Side::XiMin => (0..ey).map(|j| self.space.element_index(0, j)).collect(),
            Side::XiMax => (0..ey).map(|j| self.space.element_index(ex - 1, j)).collect(),
            Side::EtaMin => (0..ex).map(|i| self.space.element_index(i, 0)).collect(),
            Side::EtaMax => (0..ex).map(|i| self.space.element_index(i, ey - 1)).collect(),
        }
    }

    /// Bézier elements of the geometry space.
    pub fn elements(&self) -> Vec<BezierElement2D> {
        let ext = build_extraction_2d(&self.space);
        let (px, py) = (self.space.xi().degree(), self.space.eta().degree());
        ext.into_iter()
            .map(|x| {
                let (ex, ey) = self.space.split_element(x.element);
                let weights = self
                    .space
                    .weights()
                    .map(|w| x.functions.iter().map(|&g| w[g]).collect());
                let points = x.functions.iter().map(|&g| self.control_points[g]).collect();
                BezierElement2D {
                    index: x.element,
                    spans: [self.space.xi().elements()[ex], self.space.eta().elements()[ey]],
                    degrees: [px, py],
                    extraction: x,
                    weights,
                    points,
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn annulus_table_orientation_has_positive_jacobian() {
        for p in 2..=4 {
            for n in [1, 2, 4] {
                let g = Geometry2D::quarter_annulus(p, n).unwrap();
                for el in g.elements() {
                    for &(s, t) in &[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0), (0.2, 0.9)] {
                        assert!(el.eval(s, t).unwrap().det_j > 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn annulus_boundaries_are_exact_circles() {
        let g = Geometry2D::quarter_annulus(3, 4).unwrap();
        for k in 0..=40 {
            let xi = k as f64 / 40.0;
            let (inner, _) = g.map(xi, 0.0).unwrap();
            let (outer, _) = g.map(xi, 1.0).unwrap();
            assert_abs_diff_eq!(inner[0].hypot(inner[1]), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(outer[0].hypot(outer[1]), 4.0, epsilon = 1e-12);
        }
        let (p, _) = g.map(0.0, 0.5).unwrap();
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-14);
        let (q, _) = g.map(1.0, 0.5).unwrap();
        assert_abs_diff_eq!(q[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn element_evaluation_matches_global_mapping() {
        let g = Geometry2D::quarter_annulus(2, 3).unwrap();
        for el in g.elements() {
            let (s, t) = (0.3, 0.8);
            let ep = el.eval(s, t).unwrap();
            let [xi, eta] = el.parametric(s, t);
            let (x, jac) = g.map(xi, eta).unwrap();
            assert_abs_diff_eq!(ep.x[0], x[0], epsilon = 1e-13);
            assert_abs_diff_eq!(ep.x[1], x[1], epsilon = 1e-13);
            let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
            assert_abs_diff_eq!(ep.det_j, det * el.parametric_area(), epsilon = 1e-12);
        }
    }

    #[test]
    fn cook_corners() {
        let g = Geometry2D::cook_membrane(3, 2).unwrap();
        let (tr, _) = g.map(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(tr[0], 48.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tr[1], 60.0, epsilon = 1e-12);
        let (mid, _) = g.map(0.5, 0.5).unwrap();
        // bilinear average of the four corners
        assert_abs_diff_eq!(mid[0], 24.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid[1], 37.0, epsilon = 1e-12);
    }

    #[test]
    fn interval_rejects_degenerate() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert_eq!(Interval::new(0.0, 3.0).unwrap().map(0.5), 1.5);
    }
}
