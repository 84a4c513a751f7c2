//! Plane-strain linear elasticity with a deviatoric/volumetric split.
//!
//! The spherical part uses the 3D split with `ε_zz = 0`, so the deviatoric
//! strain has an out-of-plane component `−tr(ε)/3` and the volumetric
//! modulus is `K = λ + 2μ/3`. Displacement dofs are interleaved:
//! `(u_x, u_y)` of function `A` map to `(2A, 2A+1)`.

mod exact;
mod infsup;

pub use exact::{CartesianStress, PlateWithHole, PolarStress};
pub use infsup::{infsup_constant, infsup_constant_on, InfSupPair, INFSUP_ZERO_TOL};

use nalgebra::{DMatrix, DVector};

use crate::extraction::{build_dual_extraction_2d, build_extraction_2d, DualExtraction, ElementExtraction};
use crate::geometry::{tensor_bernstein, BezierElement2D, ElementPoint, Geometry2D, Side};
use crate::numerics::{gauss_rule, solve_constrained, CsrMatrix, Symmetry, TripletMatrix};
use crate::splines::{SplineSpace, TensorSpace2D};
use crate::{Error, Formulation, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub young: f64,
    pub poisson: f64,
}

impl Material {
    pub fn new(young: f64, poisson: f64) -> Result<Self> {
        if !(young > 0.0) || !young.is_finite() {
            return Err(Error::InvalidInput(format!("Young's modulus {young} must be positive")));
        }
        if !(0.0..0.5).contains(&poisson) {
            return Err(Error::InvalidInput(format!("Poisson ratio {poisson} outside [0, 0.5)")));
        }
        Ok(Self { young, poisson })
    }

    pub fn lambda(&self) -> f64 {
        let (e, nu) = (self.young, self.poisson);
        nu * e / ((1.0 + nu) * (1.0 - 2.0 * nu))
    }

    pub fn mu(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }

    /// `λ + 2μ/3`.
    pub fn bulk(&self) -> f64 {
        self.lambda() + 2.0 * self.mu() / 3.0
    }
}

/// Degree of the pressure (projected volumetric strain) space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PressureSpace {
    /// Degree `p − 1` in both directions.
    Reduced,
    /// Degree `p`.
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Traction {
    Uniform([f64; 2]),
    /// `σ·n` of the exact plate-with-hole field.
    PlateWithHole(PlateWithHole),
}

impl Traction {
    fn eval(&self, x: [f64; 2], n: [f64; 2]) -> Result<[f64; 2]> {
        match self {
            Traction::Uniform(t) => Ok(*t),
            Traction::PlateWithHole(p) => p.traction(x, n),
        }
    }
}

/// Prescribed value of one displacement component along a side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dirichlet {
    pub side: Side,
    pub component: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ElasticProblem {
    pub geometry: Geometry2D,
    pub material: Material,
    pub dirichlet: Vec<Dirichlet>,
    pub tractions: Vec<(Side, Traction)>,
}

/// Default Cook's membrane material and edge load.
pub const COOK_YOUNG: f64 = 250.0;
pub const COOK_POISSON: f64 = 0.4999;
pub const COOK_SHEAR_LOAD: f64 = 6.25;

/// Default plate-with-hole data.
pub const PLATE_YOUNG: f64 = 1e5;
pub const PLATE_POISSON: f64 = 0.4999;
pub const PLATE: PlateWithHole = PlateWithHole {
    tension: 10.0,
    radius: 1.0,
};

/// Elements per side of the quarter-annulus mesh sequence.
pub const ANNULUS_MESHES: [usize; 5] = [1, 2, 4, 8, 16];
/// Mesh sequence for plate convergence rates; one level beyond
/// [`ANNULUS_MESHES`] to reach the asymptotic range.
pub const PLATE_RATE_MESHES: [usize; 4] = [4, 8, 16, 32];

impl ElasticProblem {
    /// Clamped at `x = 0`, uniform vertical shear on `x = 48`.
    pub fn cook(degree: usize, n_elements: usize, material: Material) -> Result<Self> {
        Ok(Self {
            geometry: Geometry2D::cook_membrane(degree, n_elements)?,
            material,
            dirichlet: vec![
                Dirichlet {
                    side: Side::XiMin,
                    component: 0,
                    value: 0.0,
                },
                Dirichlet {
                    side: Side::XiMin,
                    component: 1,
                    value: 0.0,
                },
            ],
            tractions: vec![(Side::XiMax, Traction::Uniform([0.0, COOK_SHEAR_LOAD]))],
        })
    }

    /// Quarter annulus with symmetry conditions on the straight edges and
    /// exact tractions on the outer arc.
    pub fn plate_with_hole(degree: usize, n_elements: usize, material: Material, plate: PlateWithHole) -> Result<Self> {
        Ok(Self {
            geometry: Geometry2D::quarter_annulus(degree, n_elements)?,
            material,
            dirichlet: vec![
                Dirichlet {
                    side: Side::XiMin,
                    component: 0,
                    value: 0.0,
                },
                Dirichlet {
                    side: Side::XiMax,
                    component: 1,
                    value: 0.0,
                },
            ],
            tractions: vec![(Side::EtaMax, Traction::PlateWithHole(plate))],
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.dirichlet.is_empty() {
            return Err(Error::InvalidInput("at least one Dirichlet condition is required".into()));
        }
        for d in &self.dirichlet {
            if d.component > 1 {
                return Err(Error::InvalidInput(format!("displacement component {} out of range", d.component)));
            }
            if self.tractions.iter().any(|(s, _)| *s == d.side) {
                return Err(Error::InvalidInput(format!(
                    "side {:?} carries both a traction and a Dirichlet condition",
                    d.side
                )));
            }
        }
        Ok(())
    }

    /// Constrained dofs with their values.
    pub fn constrained_dofs(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64)> = Vec::new();
        for d in &self.dirichlet {
            for a in self.geometry.side_functions(d.side) {
                let dof = 2 * a + d.component;
                if !out.iter().any(|(k, _)| *k == dof) {
                    out.push((dof, d.value));
                }
            }
        }
        out.sort_by_key(|(k, _)| *k);
        out
    }
}

/// Geometry elements together with the pressure space and its duals.
#[derive(Debug, Clone)]
pub struct ElasticDiscretization {
    pub geometry: Geometry2D,
    pub elements: Vec<BezierElement2D>,
    pub pressure: TensorSpace2D,
    pub pressure_extraction: Vec<ElementExtraction>,
    pub pressure_dual: Vec<DualExtraction>,
    pub n_quad: usize,
}

impl ElasticDiscretization {
    pub fn new(geometry: &Geometry2D, pressure: PressureSpace) -> Result<Self> {
        let gs = geometry.space();
        let p = gs.xi().degree().max(gs.eta().degree());
        let lower = |s: &SplineSpace| -> Result<SplineSpace> {
            let q = match pressure {
                PressureSpace::Reduced => s.degree().checked_sub(1).ok_or_else(|| {
                    Error::InvalidInput("reduced pressure space needs displacement degree ≥ 1".into())
                })?,
                PressureSpace::Equal => s.degree(),
            };
            Ok(SplineSpace::new(s.knot_vector().with_degree(q)?))
        };
        let pspace = TensorSpace2D::new(lower(gs.xi())?, lower(gs.eta())?);
        let n_quad = p + 2;
        let pressure_dual = build_dual_extraction_2d(&pspace, geometry, n_quad)?;
        Ok(Self {
            geometry: geometry.clone(),
            elements: geometry.elements(),
            pressure_extraction: build_extraction_2d(&pspace),
            pressure: pspace,
            pressure_dual,
            n_quad,
        })
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.geometry.space().n_basis()
    }

    pub fn n_pressure(&self) -> usize {
        self.pressure.n_basis()
    }

    fn pressure_degrees(&self) -> (usize, usize) {
        (self.pressure.xi().degree(), self.pressure.eta().degree())
    }

    /// Pressure basis and dual values at local `(s, t)` of element `e`.
    pub fn pressure_values(&self, e: usize, s: f64, t: f64) -> (Vec<f64>, Vec<f64>) {
        let (qx, qy) = self.pressure_degrees();
        let b = DVector::from_vec(tensor_bernstein(qx, qy, s, t).0);
        let n = (&self.pressure_extraction[e].c * &b).iter().copied().collect();
        let d = self.pressure_dual[e].values(b.as_slice());
        (n, d)
    }

    fn element_dofs(&self, e: usize) -> Vec<usize> {
        self.elements[e].functions().iter().flat_map(|&a| [2 * a, 2 * a + 1]).collect()
    }
}

/// Rows of the plane-strain deviatoric strain operator for one function:
/// `(ε_xx, ε_yy, ε_zz, γ_xy)` deviatoric parts per unit `u_x`, `u_y`.
fn dev_rows(g: [f64; 2]) -> [[f64; 2]; 4] {
    let (dx, dy) = (g[0], g[1]);
    [
        [2.0 / 3.0 * dx, -dy / 3.0],
        [-dx / 3.0, 2.0 / 3.0 * dy],
        [-dx / 3.0, -dy / 3.0],
        [dy, dx],
    ]
}

/// Element arrays; `k_vol`, `p`, `p_hat` and `gram` are not scaled by the
/// bulk modulus.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticElementMatrices {
    pub k_dev: DMatrix<f64>,
    pub k_vol: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub p_hat: DMatrix<f64>,
    pub gram: DMatrix<f64>,
}

pub fn element_matrices(material: &Material, disc: &ElasticDiscretization, e: usize) -> Result<ElasticElementMatrices> {
    let el = &disc.elements[e];
    let nl = el.functions().len();
    let nq = disc.pressure_extraction[e].functions.len();
    let mu = material.mu();
    let dmod = [2.0 * mu, 2.0 * mu, 2.0 * mu, mu];
    let mut out = ElasticElementMatrices {
        k_dev: DMatrix::zeros(2 * nl, 2 * nl),
        k_vol: DMatrix::zeros(2 * nl, 2 * nl),
        p: DMatrix::zeros(nq, 2 * nl),
        p_hat: DMatrix::zeros(nq, 2 * nl),
        gram: DMatrix::zeros(nq, nq),
    };
    let rule = gauss_rule(disc.n_quad)?;
    for ([s, t], w) in rule.tensor(&rule) {
        let ep = el.eval(s, t)?;
        let dv = w * ep.det_j;
        let mut bdev = vec![[0.0; 4]; 2 * nl];
        let mut bvol = vec![0.0; 2 * nl];
        for a in 0..nl {
            let rows = dev_rows(ep.grads[a]);
            for c in 0..2 {
                for r in 0..4 {
                    bdev[2 * a + c][r] = rows[r][c];
                }
                bvol[2 * a + c] = ep.grads[a][c];
            }
        }
        for i in 0..2 * nl {
            for j in 0..2 * nl {
                let mut kd = 0.0;
                for r in 0..4 {
                    kd += bdev[i][r] * dmod[r] * bdev[j][r];
                }
                out.k_dev[(i, j)] += dv * kd;
                out.k_vol[(i, j)] += dv * bvol[i] * bvol[j];
            }
        }
        let (nbar, ndual) = disc.pressure_values(e, s, t);
        for i in 0..nq {
            for j in 0..nq {
                out.gram[(i, j)] += dv * nbar[i] * nbar[j];
            }
            for j in 0..2 * nl {
                out.p[(i, j)] += dv * nbar[i] * bvol[j];
                out.p_hat[(i, j)] += dv * ndual[i] * bvol[j];
            }
        }
    }
    Ok(out)
}

/// Assembled operators shared by all formulations (before BCs).
#[derive(Debug, Clone)]
pub struct ElasticOperators {
    pub k_dev: CsrMatrix,
    /// `∫ B_volᵀ B_vol`.
    pub k_vol: CsrMatrix,
    /// `∫ N̄ B_vol`.
    pub p: CsrMatrix,
    /// `∫ N̂̄ B_vol`.
    pub p_hat: CsrMatrix,
    /// `∫ N̄ N̄ᵀ`.
    pub gram: CsrMatrix,
    pub load: Vec<f64>,
}

pub fn assemble_operators(problem: &ElasticProblem, disc: &ElasticDiscretization) -> Result<ElasticOperators> {
    problem.validate()?;
    let nd = disc.n_dofs();
    let np = disc.n_pressure();
    let mut kd = TripletMatrix::new(nd, nd);
    let mut kv = TripletMatrix::new(nd, nd);
    let mut pm = TripletMatrix::new(np, nd);
    let mut ph = TripletMatrix::new(np, nd);
    let mut gm = TripletMatrix::new(np, np);
    for e in 0..disc.elements.len() {
        let em = element_matrices(&problem.material, disc, e)?;
        let dofs = disc.element_dofs(e);
        let pf = &disc.pressure_extraction[e].functions;
        kd.add_block(&dofs, &dofs, &em.k_dev);
        kv.add_block(&dofs, &dofs, &em.k_vol);
        pm.add_block(pf, &dofs, &em.p);
        ph.add_block(pf, &dofs, &em.p_hat);
        gm.add_block(pf, pf, &em.gram);
    }
    Ok(ElasticOperators {
        k_dev: kd.to_csr(),
        k_vol: kv.to_csr(),
        p: pm.to_csr(),
        p_hat: ph.to_csr(),
        gram: gm.to_csr(),
        load: traction_load(problem, disc)?,
    })
}

/// Consistent nodal forces of the boundary tractions.
pub fn traction_load(problem: &ElasticProblem, disc: &ElasticDiscretization) -> Result<Vec<f64>> {
    let mut load = vec![0.0; disc.n_dofs()];
    let rule = gauss_rule(disc.n_quad)?;
    for (side, traction) in &problem.tractions {
        for e in problem.geometry.side_elements(*side) {
            let el = &disc.elements[e];
            for (tq, w) in rule.iter() {
                let (s, t) = side.local_point(tq);
                let ep = el.eval(s, t)?;
                let (n, dl) = el.edge_frame(*side, &ep);
                let h = traction.eval(ep.x, n)?;
                for (a, g) in el.functions().iter().enumerate() {
                    load[2 * g] += w * dl * ep.values[a] * h[0];
                    load[2 * g + 1] += w * dl * ep.values[a] * h[1];
                }
            }
        }
    }
    Ok(load)
}

/// `Gram⁻¹ P` (dense) for the global L² projector.
fn gram_inverse_times_p(ops: &ElasticOperators) -> Result<DMatrix<f64>> {
    let chol = ops
        .gram
        .to_dense()
        .cholesky()
        .ok_or(Error::Numerics(crate::numerics::NumericsError::NotPositiveDefinite))?;
    Ok(chol.solve(&ops.p.to_dense()))
}

/// Global stiffness (before BCs) for one formulation.
pub fn assemble_stiffness(material: &Material, ops: &ElasticOperators, formulation: Formulation) -> Result<CsrMatrix> {
    let k = material.bulk();
    Ok(match formulation {
        Formulation::Standard => ops.k_dev.add(&ops.k_vol.scale(k)),
        Formulation::SymmetricBezier => {
            let ph = &ops.p_hat;
            ops.k_dev.add(&ph.transpose().matmul(&ops.gram.matmul(ph)).scale(k))
        }
        Formulation::NonSymmetricBezier => ops.k_dev.add(&ops.p.transpose().matmul(&ops.p_hat).scale(k)),
        Formulation::GlobalBbar => {
            let vol = ops.p.transpose().to_dense() * gram_inverse_times_p(ops)? * k;
            ops.k_dev.add(&CsrMatrix::from_dense(&vol, 0.0))
        }
    })
}

#[derive(Debug, Clone)]
pub struct ElasticSolution {
    pub formulation: Formulation,
    /// Full displacement control vector (interleaved).
    pub displacement: Vec<f64>,
    /// Pressure coefficients (B̄ formulations); the standard method derives
    /// the pressure from the displacement.
    pub pressure: Option<Vec<f64>>,
}

/// Solve with the assembled (condensed) stiffness.
pub fn solve_condensed(
    problem: &ElasticProblem,
    ops: &ElasticOperators,
    formulation: Formulation,
) -> Result<ElasticSolution> {
    let k = assemble_stiffness(&problem.material, ops, formulation)?;
    let hint = match formulation {
        Formulation::NonSymmetricBezier => Symmetry::General,
        _ => Symmetry::Symmetric,
    };
    let u = solve_constrained(&k, &ops.load, &problem.constrained_dofs(), hint)?;
    let bulk = problem.material.bulk();
    let pressure = match formulation {
        Formulation::Standard => None,
        Formulation::SymmetricBezier | Formulation::NonSymmetricBezier => {
            Some(ops.p_hat.mul_vec(&u).into_iter().map(|v| -bulk * v).collect())
        }
        Formulation::GlobalBbar => {
            let gp = gram_inverse_times_p(ops)?;
            Some((gp * DVector::from_column_slice(&u)).iter().map(|v| -bulk * v).collect())
        }
    };
    Ok(ElasticSolution {
        formulation,
        displacement: u,
        pressure,
    })
}

/// Solve one formulation; B̄ variants are solved in saddle-point form with
/// the pressure as an extra unknown.
pub fn solve_elasticity(
    problem: &ElasticProblem,
    disc: &ElasticDiscretization,
    formulation: Formulation,
) -> Result<ElasticSolution> {
    let ops = assemble_operators(problem, disc)?;
    solve_with_operators(problem, &ops, formulation)
}

pub fn solve_with_operators(
    problem: &ElasticProblem,
    ops: &ElasticOperators,
    formulation: Formulation,
) -> Result<ElasticSolution> {
    if formulation == Formulation::Standard {
        return solve_condensed(problem, ops, formulation);
    }
    let nd = ops.k_dev.n_rows();
    let np = ops.gram.n_rows();
    let bulk = problem.material.bulk();
    let n_extra = if formulation == Formulation::SymmetricBezier { 2 * np } else { np };
    let n = nd + n_extra;
    // The pressure is the last block of unknowns, carried as `q = p/c`
    // with `c = μ` so that all blocks are of comparable size.
    let p0 = n - np;
    let c = problem.material.mu();
    let eps = c * c / bulk;
    let mut t = TripletMatrix::new(n, n);
    for (i, j, v) in ops.k_dev.iter() {
        t.push(i, j, v);
    }
    match formulation {
        Formulation::NonSymmetricBezier => {
            // K_dev u − c Pᵀ q = F,  −c P̂ u − (c²/K) q = 0
            for (i, j, v) in ops.p.iter() {
                t.push(j, p0 + i, -c * v);
            }
            for (i, j, v) in ops.p_hat.iter() {
                t.push(p0 + i, j, -c * v);
            }
            for i in 0..np {
                t.push(p0 + i, p0 + i, -eps);
            }
        }
        Formulation::GlobalBbar => {
            // K_dev u − c Pᵀ q = F,  −c P u − (c²/K) G q = 0
            for (i, j, v) in ops.p.iter() {
                t.push(j, p0 + i, -c * v);
                t.push(p0 + i, j, -c * v);
            }
            for (i, j, v) in ops.gram.iter() {
                t.push(p0 + i, p0 + j, -eps * v);
            }
        }
        Formulation::SymmetricBezier => {
            // K_dev u − c P̂ᵀ q = F,  c (P̂ u − g) = 0,  −c G g − (c²/K) q = 0
            let g0 = nd;
            for (i, j, v) in ops.p_hat.iter() {
                t.push(j, p0 + i, -c * v);
                t.push(g0 + i, j, c * v);
            }
            for i in 0..np {
                t.push(g0 + i, g0 + i, -c);
                t.push(p0 + i, p0 + i, -eps);
            }
            for (i, j, v) in ops.gram.iter() {
                t.push(p0 + i, g0 + j, -c * v);
            }
        }
        Formulation::Standard => unreachable!(),
    }
    let mut rhs = ops.load.clone();
    rhs.resize(n, 0.0);
    let x = solve_constrained(&t.to_csr(), &rhs, &problem.constrained_dofs(), Symmetry::General)?;
    // q holds dual coefficients for the symmetric variant; its primal
    // pressure coefficients are −K g.
    let pressure = match formulation {
        Formulation::SymmetricBezier => x[nd..nd + np].iter().map(|g| -bulk * g).collect(),
        _ => x[p0..].iter().map(|q| c * q).collect(),
    };
    Ok(ElasticSolution {
        formulation,
        displacement: x[..nd].to_vec(),
        pressure: Some(pressure),
    })
}

/// The non-symmetric formulation as its uncondensed mixed system.
pub fn solve_mixed(problem: &ElasticProblem, disc: &ElasticDiscretization) -> Result<ElasticSolution> {
    solve_elasticity(problem, disc, Formulation::NonSymmetricBezier)
}

/// Discrete fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointFields {
    pub x: [f64; 2],
    pub displacement: [f64; 2],
    /// `(σ_xx, σ_yy, σ_zz, σ_xy)`.
    pub stress: [f64; 4],
    pub pressure: f64,
}

/// Evaluate displacement, pressure and stress `σ = 2μ ε_dev − p I` at
/// local `(s, t)` of element `e`.
pub fn evaluate(
    material: &Material,
    disc: &ElasticDiscretization,
    sol: &ElasticSolution,
    e: usize,
    s: f64,
    t: f64,
) -> Result<PointFields> {
    let ep: ElementPoint = disc.elements[e].eval(s, t)?;
    let u = &sol.displacement;
    let mut disp = [0.0; 2];
    let (mut exx, mut eyy, mut gxy) = (0.0, 0.0, 0.0);
    for (a, g) in disc.elements[e].functions().iter().enumerate() {
        let (ux, uy) = (u[2 * g], u[2 * g + 1]);
        disp[0] += ep.values[a] * ux;
        disp[1] += ep.values[a] * uy;
        exx += ep.grads[a][0] * ux;
        eyy += ep.grads[a][1] * uy;
        gxy += ep.grads[a][1] * ux + ep.grads[a][0] * uy;
    }
    let tr = exx + eyy;
    let pressure = match &sol.pressure {
        Some(pc) => {
            let (nbar, _) = disc.pressure_values(e, s, t);
            disc.pressure_extraction[e]
                .functions
                .iter()
                .zip(nbar)
                .map(|(g, v)| v * pc[*g])
                .sum()
        }
        None => -material.bulk() * tr,
    };
    let mu = material.mu();
    Ok(PointFields {
        x: ep.x,
        displacement: disp,
        stress: [
            2.0 * mu * (exx - tr / 3.0) - pressure,
            2.0 * mu * (eyy - tr / 3.0) - pressure,
            2.0 * mu * (-tr / 3.0) - pressure,
            mu * gxy,
        ],
        pressure,
    })
}

/// Relative error norms for the plate with a hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticErrors {
    pub displacement: f64,
    pub stress: f64,
    pub energy: f64,
}

/// Exact `(σ_xx, σ_yy, σ_zz, σ_xy)` with plane-strain `σ_zz = ν(σ_xx + σ_yy)`.
pub fn exact_plate_stress(material: &Material, plate: &PlateWithHole, x: [f64; 2]) -> Result<[f64; 4]> {
    let s = plate.stress(x)?;
    Ok([s[0], s[1], material.poisson * (s[0] + s[1]), s[2]])
}

fn split(s: [f64; 4]) -> ([f64; 4], f64) {
    let p = -(s[0] + s[1] + s[2]) / 3.0;
    ([s[0] + p, s[1] + p, s[2] + p, s[3]], p)
}

fn frob2(s: [f64; 4]) -> f64 {
    s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + 2.0 * s[3] * s[3]
}

pub fn plate_errors(
    problem: &ElasticProblem,
    plate: &PlateWithHole,
    disc: &ElasticDiscretization,
    sol: &ElasticSolution,
) -> Result<ElasticErrors> {
    let mat = &problem.material;
    let (mu, bulk) = (mat.mu(), mat.bulk());
    let rule = gauss_rule(disc.n_quad)?;
    let mut num = [0.0; 3];
    let mut den = [0.0; 3];
    for e in 0..disc.elements.len() {
        for ([s, t], w) in rule.tensor(&rule) {
            let dv = w * disc.elements[e].eval(s, t)?.det_j;
            let f = evaluate(mat, disc, sol, e, s, t)?;
            let ue = plate.displacement(mat, f.x)?;
            let se = exact_plate_stress(mat, plate, f.x)?;
            let du = [ue[0] - f.displacement[0], ue[1] - f.displacement[1]];
            num[0] += dv * (du[0] * du[0] + du[1] * du[1]);
            den[0] += dv * (ue[0] * ue[0] + ue[1] * ue[1]);
            let ds: [f64; 4] = std::array::from_fn(|k| se[k] - f.stress[k]);
            num[1] += dv * frob2(ds);
            den[1] += dv * frob2(se);
            let (dev_e, p_e) = split(se);
            let (dev_h, p_h) = split(f.stress);
            let dd: [f64; 4] = std::array::from_fn(|k| dev_e[k] - dev_h[k]);
            num[2] += dv * (frob2(dd) / (2.0 * mu) + (p_e - p_h).powi(2) / bulk);
            den[2] += dv * (frob2(dev_e) / (2.0 * mu) + p_e * p_e / bulk);
        }
    }
    Ok(ElasticErrors {
        displacement: (num[0] / den[0]).sqrt(),
        stress: (num[1] / den[1]).sqrt(),
        energy: (num[2] / den[2]).sqrt(),
    })
}

/// `(max |σ_xx − σ_xxʰ|, max |σ_xx|)` over all element corners.
pub fn nodal_sigma_xx_error(
    problem: &ElasticProblem,
    plate: &PlateWithHole,
    disc: &ElasticDiscretization,
    sol: &ElasticSolution,
) -> Result<(f64, f64)> {
    let mut err = 0.0f64;
    let mut peak = 0.0f64;
    for e in 0..disc.elements.len() {
        for &(s, t) in &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let f = evaluate(&problem.material, disc, sol, e, s, t)?;
            let ex = plate.stress(f.x)?[0];
            err = err.max((ex - f.stress[0]).abs());
            peak = peak.max(ex.abs());
        }
    }
    Ok((err, peak))
}

/// Vertical displacement of the control point at `(ξ, η) = (1, 1)`, which
/// is interpolatory (the top-right corner for Cook's membrane).
pub fn corner_displacement(disc: &ElasticDiscretization, sol: &ElasticSolution) -> f64 {
    let a = disc.geometry.space().n_basis() - 1;
    sol.displacement[2 * a + 1]
}

/// Displacement vectors of the two in-plane translations and the
/// infinitesimal rotation about the origin.
pub fn rigid_modes(geometry: &Geometry2D) -> [Vec<f64>; 3] {
    let n = geometry.space().n_basis();
    let mut tx = vec![0.0; 2 * n];
    let mut ty = vec![0.0; 2 * n];
    let mut rot = vec![0.0; 2 * n];
    for (a, p) in geometry.control_points().iter().enumerate() {
        tx[2 * a] = 1.0;
        ty[2 * a + 1] = 1.0;
        rot[2 * a] = -p[1];
        rot[2 * a + 1] = p[0];
    }
    [tx, ty, rot]
}
