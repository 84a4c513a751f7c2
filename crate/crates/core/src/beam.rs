//! Timoshenko cantilever beam: clamped at `x = 0`, free at `x = L`.
//!
//! Sign conventions: `γ = w′ − φ`, `Q = −sGA·γ`, `M = −EI·φ′`, with
//! equilibrium `Q′ = f` and `M′ = −Q`. Tip loads are generalized forces
//! work-conjugate to `w(L)` and `φ(L)`.
//!
//! Dofs are interleaved per control point: `(w_A, φ_A) ↦ (2A, 2A+1)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::extraction::{build_dual_extraction, projection_quadrature_points, DualExtraction};
use crate::geometry::Interval;
use crate::numerics::{
    block_bandwidth, gauss_rule, solve, BandwidthStats, CsrMatrix, Symmetry, TripletMatrix,
};
use crate::splines::{bernstein_values, DerivOrder, SplineSpace};
use crate::{Error, Formulation, Result};

/// Distributed transverse load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamLoad {
    /// `f(x) = amplitude · sin(πx/L)`.
    Sinusoidal { amplitude: f64 },
    Uniform(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamProblem {
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    pub young: f64,
    pub poisson: f64,
    pub shear_correction: f64,
    pub load: BeamLoad,
    pub tip_force: f64,
    pub tip_moment: f64,
}

impl Default for BeamProblem {
    fn default() -> Self {
        Self {
            length: 10.0,
            width: 1.0,
            thickness: 0.01,
            young: 1e9,
            poisson: 0.3,
            shear_correction: 5.0 / 6.0,
            load: BeamLoad::Sinusoidal { amplitude: 1.0 },
            tip_force: 0.0,
            tip_moment: 0.0,
        }
    }
}

impl BeamProblem {
    /// Default beam with the thickness set from a slenderness ratio `L/t`.
    pub fn with_slenderness(ratio: f64) -> Self {
        let p = Self::default();
        Self {
            thickness: p.length / ratio,
            ..p
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.length, self.width, self.thickness, self.young];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInput("beam length, section and modulus must be positive".into()));
        }
        if !(0.0..0.5).contains(&self.poisson) {
            return Err(Error::InvalidInput(format!("Poisson ratio {} outside [0, 0.5)", self.poisson)));
        }
        if !(self.shear_correction > 0.0 && self.shear_correction <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "shear correction {} outside (0, 1]",
                self.shear_correction
            )));
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width * self.thickness
    }

    pub fn inertia(&self) -> f64 {
        self.width * self.thickness.powi(3) / 12.0
    }

    pub fn shear_modulus(&self) -> f64 {
        self.young / (2.0 * (1.0 + self.poisson))
    }

    pub fn bending_stiffness(&self) -> f64 {
        self.young * self.inertia()
    }

    pub fn shear_stiffness(&self) -> f64 {
        self.shear_correction * self.shear_modulus() * self.area()
    }

    pub fn load_at(&self, x: f64) -> f64 {
        match self.load {
            BeamLoad::Sinusoidal { amplitude } => amplitude * (PI * x / self.length).sin(),
            BeamLoad::Uniform(q) => q,
        }
    }
}

/// Closed-form fields at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamFields {
    pub w: f64,
    pub phi: f64,
    pub moment: f64,
    pub shear: f64,
}

/// Exact solution for the sinusoidal load with free tip.
pub fn analytical_solution(problem: &BeamProblem, x: f64) -> Result<BeamFields> {
    let BeamLoad::Sinusoidal { amplitude: a } = problem.load else {
        return Err(Error::InvalidInput("analytical solution needs the sinusoidal load".into()));
    };
    if problem.tip_force != 0.0 || problem.tip_moment != 0.0 {
        return Err(Error::InvalidInput("analytical solution assumes a free tip".into()));
    }
    let l = problem.length;
    let ei = problem.bending_stiffness();
    let sga = problem.shear_stiffness();
    let k = PI / l;
    let (s, c) = (k * x).sin_cos();
    let shear = -a / k * (c + 1.0);
    let moment = a * (-(l - x) / k + s / (k * k));
    let phi = a / ei * ((l * x - 0.5 * x * x) / k - (1.0 - c) / k.powi(3));
    let int_gamma = a / (k * sga) * (s / k + x);
    let int_phi = a / ei * ((0.5 * l * x * x - x.powi(3) / 6.0) / k - (x - s / k) / k.powi(3));
    Ok(BeamFields {
        w: int_gamma + int_phi,
        phi,
        moment,
        shear,
    })
}

/// Displacement space of degree `p` and projected space of degree `p − 1`
/// with the same interior knots, on `[0, L]`.
#[derive(Debug, Clone)]
pub struct BeamDiscretization {
    pub space: SplineSpace,
    pub projected: SplineSpace,
    pub geometry: Interval,
    pub projected_dual: Vec<DualExtraction>,
}

impl BeamDiscretization {
    pub fn uniform(degree: usize, n_elements: usize, length: f64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidInput("beam elements need degree ≥ 1".into()));
        }
        let space = SplineSpace::uniform(degree, n_elements)?;
        Self::new(space, Interval::new(0.0, length)?)
    }

    pub fn new(space: SplineSpace, geometry: Interval) -> Result<Self> {
        let projected = SplineSpace::new(space.knot_vector().with_degree(space.degree() - 1)?);
        let projected_dual = build_dual_extraction(&projected, &geometry)?;
        Ok(Self {
            space,
            projected,
            geometry,
            projected_dual,
        })
    }

    pub fn degree(&self) -> usize {
        self.space.degree()
    }

    pub fn n_dofs(&self) -> usize {
        2 * self.space.n_basis()
    }

    fn quadrature_points(&self) -> usize {
        projection_quadrature_points(self.degree())
    }
}

/// Assembled global operators shared by all formulations (before BCs).
#[derive(Debug, Clone)]
pub struct BeamOperators {
    /// Bending stiffness `Kᵇ`.
    pub bending: CsrMatrix,
    /// Standard shear stiffness `sGA ∫ B_γᵀ B_γ`.
    pub shear: CsrMatrix,
    /// `M̄ = sGA ∫ N̄ N̄ᵀ`.
    pub m_bar: CsrMatrix,
    /// `P = ∫ N̄ B_γ`.
    pub p: CsrMatrix,
    /// `P̂ = ∫ N̂̄ B_γ`.
    pub p_hat: CsrMatrix,
    pub load: Vec<f64>,
}

/// Element arrays on element `e`, local dofs interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamElementMatrices {
    pub bending: DMatrix<f64>,
    pub shear: DMatrix<f64>,
    pub m_bar: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub p_hat: DMatrix<f64>,
    pub load: Vec<f64>,
}

pub fn element_matrices(problem: &BeamProblem, disc: &BeamDiscretization, e: usize) -> Result<BeamElementMatrices> {
    let p = disc.degree();
    let nl = p + 1;
    let nb = p;
    let ei = problem.bending_stiffness();
    let sga = problem.shear_stiffness();
    let span = disc.space.elements()[e];
    let h = disc.geometry.span_measure(&span);
    let jac = disc.geometry.length();
    let mut out = BeamElementMatrices {
        bending: DMatrix::zeros(2 * nl, 2 * nl),
        shear: DMatrix::zeros(2 * nl, 2 * nl),
        m_bar: DMatrix::zeros(nb, nb),
        p: DMatrix::zeros(nb, 2 * nl),
        p_hat: DMatrix::zeros(nb, 2 * nl),
        load: vec![0.0; 2 * nl],
    };
    let rule = gauss_rule(disc.quadrature_points())?;
    for (t, wq) in rule.iter() {
        let xi = span.global(t);
        let dx = wq * h;
        let n = disc.space.eval_in_element(e, xi, DerivOrder::First);
        let nbar = disc.projected.eval_in_element(e, xi, DerivOrder::Value);
        let dual = disc.projected_dual[e].values(&bernstein_values(p - 1, t));
        // γ contributions of each local dof
        let mut bg = vec![0.0; 2 * nl];
        let mut bk = vec![0.0; 2 * nl];
        for a in 0..nl {
            bg[2 * a] = n.derivs[a] / jac;
            bg[2 * a + 1] = -n.values[a];
            bk[2 * a + 1] = n.derivs[a] / jac;
        }
        for i in 0..2 * nl {
            for j in 0..2 * nl {
                out.bending[(i, j)] += dx * ei * bk[i] * bk[j];
                out.shear[(i, j)] += dx * sga * bg[i] * bg[j];
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                out.m_bar[(i, j)] += dx * sga * nbar.values[i] * nbar.values[j];
            }
            for j in 0..2 * nl {
                out.p[(i, j)] += dx * nbar.values[i] * bg[j];
                out.p_hat[(i, j)] += dx * dual[i] * bg[j];
            }
        }
    }
    // the load is integrated with one extra point
    let load_rule = gauss_rule(p + 3)?;
    for (t, wq) in load_rule.iter() {
        let xi = span.global(t);
        let f = problem.load_at(disc.geometry.map(xi));
        let n = disc.space.eval_in_element(e, xi, DerivOrder::Value);
        for a in 0..nl {
            out.load[2 * a] += wq * h * f * n.values[a];
        }
    }
    Ok(out)
}

fn element_dofs(disc: &BeamDiscretization, e: usize) -> Vec<usize> {
    disc.space.element_functions(e).flat_map(|a| [2 * a, 2 * a + 1]).collect()
}

pub fn assemble_operators(problem: &BeamProblem, disc: &BeamDiscretization) -> Result<BeamOperators> {
    problem.validate()?;
    let nd = disc.n_dofs();
    let nb = disc.projected.n_basis();
    let mut kb = TripletMatrix::new(nd, nd);
    let mut ks = TripletMatrix::new(nd, nd);
    let mut mb = TripletMatrix::new(nb, nb);
    let mut pm = TripletMatrix::new(nb, nd);
    let mut ph = TripletMatrix::new(nb, nd);
    let mut load = vec![0.0; nd];
    for e in 0..disc.space.n_elements() {
        let em = element_matrices(problem, disc, e)?;
        let dofs = element_dofs(disc, e);
        let bars: Vec<usize> = disc.projected.element_functions(e).collect();
        kb.add_block(&dofs, &dofs, &em.bending);
        ks.add_block(&dofs, &dofs, &em.shear);
        mb.add_block(&bars, &bars, &em.m_bar);
        pm.add_block(&bars, &dofs, &em.p);
        ph.add_block(&bars, &dofs, &em.p_hat);
        for (d, v) in dofs.iter().zip(&em.load) {
            load[*d] += v;
        }
    }
    let tip = disc.space.n_basis() - 1;
    load[2 * tip] += problem.tip_force;
    load[2 * tip + 1] += problem.tip_moment;
    Ok(BeamOperators {
        bending: kb.to_csr(),
        shear: ks.to_csr(),
        m_bar: mb.to_csr(),
        p: pm.to_csr(),
        p_hat: ph.to_csr(),
        load,
    })
}

/// Global stiffness (before BCs) for one formulation.
pub fn assemble_stiffness(problem: &BeamProblem, ops: &BeamOperators, formulation: Formulation) -> Result<CsrMatrix> {
    let sga = problem.shear_stiffness();
    Ok(match formulation {
        Formulation::Standard => ops.bending.add(&ops.shear),
        Formulation::SymmetricBezier => {
            let ph = &ops.p_hat;
            ops.bending.add(&ph.transpose().matmul(&ops.m_bar.matmul(ph)))
        }
        Formulation::NonSymmetricBezier => ops.bending.add(&ops.p.transpose().matmul(&ops.p_hat).scale(sga)),
        Formulation::GlobalBbar => {
            let gp = gram_inverse_times_p(problem, ops)?;
            let shear = ops.p.transpose().to_dense() * gp * sga;
            ops.bending.add(&CsrMatrix::from_dense(&shear, 0.0))
        }
    })
}

/// `Gram(N̄)⁻¹ P` for the global L² projector.
fn gram_inverse_times_p(problem: &BeamProblem, ops: &BeamOperators) -> Result<DMatrix<f64>> {
    let gram = ops.m_bar.to_dense() / problem.shear_stiffness();
    let chol = gram
        .cholesky()
        .ok_or(Error::Numerics(crate::numerics::NumericsError::NotPositiveDefinite))?;
    Ok(chol.solve(&ops.p.to_dense()))
}

/// Solution of one beam formulation.
#[derive(Debug, Clone)]
pub struct BeamSolution {
    pub formulation: Formulation,
    pub w: Vec<f64>,
    pub phi: Vec<f64>,
    /// Projected shear-force coefficients `τ = sGA·γ̄` on the projected
    /// space (B̄ formulations only).
    pub tau: Option<Vec<f64>>,
    /// Global stiffness before boundary conditions.
    pub stiffness: CsrMatrix,
}

impl BeamSolution {
    /// Basis-function coupling width (interleaved dofs collapsed).
    pub fn bandwidth_functions(&self) -> BandwidthStats {
        block_bandwidth(&self.stiffness, 2)
    }

    /// Scalar bandwidth of the interleaved dof numbering.
    pub fn bandwidth_dofs(&self) -> BandwidthStats {
        block_bandwidth(&self.stiffness, 1)
    }
}

fn free_dofs(disc: &BeamDiscretization) -> Vec<usize> {
    (2..disc.n_dofs()).collect()
}

fn expand(disc: &BeamDiscretization, free: &[usize], u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut full = vec![0.0; disc.n_dofs()];
    for (d, v) in free.iter().zip(u) {
        full[*d] = *v;
    }
    let w = full.iter().step_by(2).copied().collect();
    let phi = full.iter().skip(1).step_by(2).copied().collect();
    (w, phi)
}

/// Solve one formulation. The B̄ variants are solved in saddle-point form
/// with the shear force as an extra unknown; the penalty-like coupling then
/// enters only through `1/sGA`, which keeps slender beams accurate.
pub fn solve_beam(problem: &BeamProblem, disc: &BeamDiscretization, formulation: Formulation) -> Result<BeamSolution> {
    let ops = assemble_operators(problem, disc)?;
    match formulation {
        Formulation::Standard => solve_condensed(problem, disc, &ops, formulation),
        _ => solve_saddle(problem, disc, &ops, formulation),
    }
}

/// Solve with the assembled (condensed) stiffness matrix.
pub fn solve_condensed(
    problem: &BeamProblem,
    disc: &BeamDiscretization,
    ops: &BeamOperators,
    formulation: Formulation,
) -> Result<BeamSolution> {
    let k = assemble_stiffness(problem, ops, formulation)?;
    let free = free_dofs(disc);
    let kr = k.select(&free, &free);
    let rhs: Vec<f64> = free.iter().map(|&d| ops.load[d]).collect();
    let hint = match formulation {
        Formulation::NonSymmetricBezier => Symmetry::General,
        _ => Symmetry::Symmetric,
    };
    let u = solve(&kr, &rhs, hint)?;
    let (w, phi) = expand(disc, &free, &u);
    let mut full = vec![0.0; disc.n_dofs()];
    for (d, v) in free.iter().zip(&u) {
        full[*d] = *v;
    }
    let sga = problem.shear_stiffness();
    let tau = match formulation {
        Formulation::Standard => None,
        Formulation::SymmetricBezier | Formulation::NonSymmetricBezier => {
            Some(ops.p_hat.mul_vec(&full).into_iter().map(|v| sga * v).collect())
        }
        Formulation::GlobalBbar => {
            let gp = gram_inverse_times_p(problem, ops)?;
            Some((gp * DVector::from_vec(full)).iter().map(|v| sga * v).collect())
        }
    };
    Ok(BeamSolution {
        formulation,
        w,
        phi,
        tau,
        stiffness: k,
    })
}

fn solve_saddle(
    problem: &BeamProblem,
    disc: &BeamDiscretization,
    ops: &BeamOperators,
    formulation: Formulation,
) -> Result<BeamSolution> {
    let free = free_dofs(disc);
    let nf = free.len();
    let nb = disc.projected.n_basis();
    let sga = problem.shear_stiffness();
    let bars: Vec<usize> = (0..nb).collect();
    let kb = ops.bending.select(&free, &free);
    let p = ops.p.select(&bars, &free);
    let ph = ops.p_hat.select(&bars, &free);
    let gram = ops.m_bar.scale(1.0 / sga);
    let n_extra = match formulation {
        Formulation::SymmetricBezier => 2 * nb,
        _ => nb,
    };
    let mut t = TripletMatrix::new(nf + n_extra, nf + n_extra);
    for (i, j, v) in kb.iter() {
        t.push(i, j, v);
    }
    // last block of unknowns is always τ
    let tau0 = nf + n_extra - nb;
    let coupling = match formulation {
        Formulation::SymmetricBezier => &ph,
        _ => &p,
    };
    for (i, j, v) in coupling.iter() {
        t.push(j, tau0 + i, v);
    }
    match formulation {
        Formulation::NonSymmetricBezier => {
            // P̂ d − τ/sGA = 0
            for (i, j, v) in ph.iter() {
                t.push(nf + i, j, v);
            }
            for i in 0..nb {
                t.push(nf + i, nf + i, -1.0 / sga);
            }
        }
        Formulation::GlobalBbar => {
            // P d − G τ/sGA = 0
            for (i, j, v) in p.iter() {
                t.push(nf + i, j, v);
            }
            for (i, j, v) in gram.iter() {
                t.push(nf + i, nf + j, -v / sga);
            }
        }
        Formulation::SymmetricBezier => {
            // P̂ d − g = 0,  G g − τ/sGA = 0
            for (i, j, v) in ph.iter() {
                t.push(nf + i, j, v);
            }
            for i in 0..nb {
                t.push(nf + i, nf + i, -1.0);
                t.push(tau0 + i, tau0 + i, -1.0 / sga);
            }
            for (i, j, v) in gram.iter() {
                t.push(tau0 + i, nf + j, v);
            }
        }
        Formulation::Standard => unreachable!("standard formulation has no auxiliary field"),
    }
    let mut rhs: Vec<f64> = free.iter().map(|&d| ops.load[d]).collect();
    rhs.resize(nf + n_extra, 0.0);
    let x = solve(&t.to_csr(), &rhs, Symmetry::General)?;
    let (w, phi) = expand(disc, &free, &x[..nf]);
    let tau = match formulation {
        Formulation::SymmetricBezier => x[nf..nf + nb].iter().map(|g| sga * g).collect(),
        _ => x[tau0..].to_vec(),
    };
    Ok(BeamSolution {
        formulation,
        w,
        phi,
        tau: Some(tau),
        stiffness: assemble_stiffness(problem, ops, formulation)?,
    })
}

/// Solve the non-symmetric formulation as the uncondensed mixed system
/// `[Kᵇ Pᵀ; P̂ −I/sGA] [d; τ] = [F; 0]`.
pub fn solve_mixed(problem: &BeamProblem, disc: &BeamDiscretization) -> Result<BeamSolution> {
    let ops = assemble_operators(problem, disc)?;
    solve_saddle(problem, disc, &ops, Formulation::NonSymmetricBezier)
}

/// Discrete fields of a solution at parametric point `xi` on element `e`.
pub fn discrete_fields(problem: &BeamProblem, disc: &BeamDiscretization, sol: &BeamSolution, e: usize, xi: f64) -> BeamFields {
    let jac = disc.geometry.length();
    let n = disc.space.eval_in_element(e, xi, DerivOrder::First);
    let mut f = BeamFields {
        w: 0.0,
        phi: 0.0,
        moment: 0.0,
        shear: 0.0,
    };
    let mut dw = 0.0;
    for (k, (v, d)) in n.values.iter().zip(&n.derivs).enumerate() {
        let a = n.first + k;
        f.w += v * sol.w[a];
        f.phi += v * sol.phi[a];
        dw += d / jac * sol.w[a];
        f.moment -= problem.bending_stiffness() * d / jac * sol.phi[a];
    }
    f.shear = match &sol.tau {
        Some(tau) => {
            let nb = disc.projected.eval_in_element(e, xi, DerivOrder::Value);
            -nb.values.iter().enumerate().map(|(k, v)| v * tau[nb.first + k]).sum::<f64>()
        }
        None => -problem.shear_stiffness() * (dw - f.phi),
    };
    f
}

/// Relative L² errors of `(w, φ, M, Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamErrors {
    pub w: f64,
    pub phi: f64,
    pub moment: f64,
    pub shear: f64,
}

/// Normalized errors against the closed-form solution with `p + 3` Gauss
/// points per element.
pub fn beam_errors(problem: &BeamProblem, disc: &BeamDiscretization, sol: &BeamSolution) -> Result<BeamErrors> {
    let rule = gauss_rule(disc.degree() + 3)?;
    let mut num = [0.0; 4];
    let mut den = [0.0; 4];
    for (e, span) in disc.space.elements().iter().enumerate() {
        let h = disc.geometry.span_measure(span);
        for (t, wq) in rule.iter() {
            let xi = span.global(t);
            let ex = analytical_solution(problem, disc.geometry.map(xi))?;
            let fh = discrete_fields(problem, disc, sol, e, xi);
            let pairs = [(ex.w, fh.w), (ex.phi, fh.phi), (ex.moment, fh.moment), (ex.shear, fh.shear)];
            for (k, (a, b)) in pairs.into_iter().enumerate() {
                num[k] += wq * h * (a - b).powi(2);
                den[k] += wq * h * a * a;
            }
        }
    }
    let r = |k: usize| (num[k] / den[k]).sqrt();
    Ok(BeamErrors {
        w: r(0),
        phi: r(1),
        moment: r(2),
        shear: r(3),
    })
}

/// `max_ij |⟨N̂̄_i, N̂̄_j⟩ − (Gram(N̄)⁻¹)_ij|`: nonzero whenever the
/// symmetric formulation differs from the mixed one.
pub fn inconsistency_witness(disc: &BeamDiscretization) -> Result<f64> {
    let q = disc.degree() - 1;
    let n = disc.projected.n_basis();
    let rule = gauss_rule(q + 2)?;
    let mut dual_gram = DMatrix::zeros(n, n);
    let mut gram = DMatrix::zeros(n, n);
    for (e, span) in disc.projected.elements().iter().enumerate() {
        let h = disc.geometry.span_measure(span);
        let d = &disc.projected_dual[e];
        for (t, wq) in rule.iter() {
            let nd = d.values(&bernstein_values(q, t));
            let nb = disc.projected.eval_in_element(e, span.global(t), DerivOrder::Value);
            for (i, &gi) in d.functions.iter().enumerate() {
                for (j, &gj) in d.functions.iter().enumerate() {
                    dual_gram[(gi, gj)] += wq * h * nd[i] * nd[j];
                    gram[(gi, gj)] += wq * h * nb.values[i] * nb.values[j];
                }
            }
        }
    }
    let inv = gram.try_inverse().ok_or(Error::Numerics(crate::numerics::NumericsError::NotPositiveDefinite))?;
    Ok((dual_gram - inv).amax())
}

/// Number of elements giving `total_dofs` (both fields, before BCs) at
/// degree `p` with maximal smoothness.
pub fn elements_for_total_dofs(p: usize, total_dofs: usize) -> Option<usize> {
    (total_dofs % 2 == 0 && total_dofs / 2 > p).then(|| total_dofs / 2 - p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn analytical_boundary_values() {
        let pb = BeamProblem::with_slenderness(100.0);
        let a = analytical_solution(&pb, 0.0).unwrap();
        assert_abs_diff_eq!(a.w, 0.0, epsilon = 1e-18);
        assert_abs_diff_eq!(a.phi, 0.0, epsilon = 1e-18);
        let b = analytical_solution(&pb, pb.length).unwrap();
        assert_abs_diff_eq!(b.shear, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.moment, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn analytical_satisfies_equations() {
        let pb = BeamProblem::with_slenderness(20.0);
        let h = 1e-4;
        let (ei, sga) = (pb.bending_stiffness(), pb.shear_stiffness());
        for &x in &[1.0, 3.3, 7.9] {
            let f = |x| analytical_solution(&pb, x).unwrap();
            let d = |g: &dyn Fn(BeamFields) -> f64| (g(f(x + h)) - g(f(x - h))) / (2.0 * h);
            let s = f(x);
            assert_abs_diff_eq!(d(&|v| v.shear), pb.load_at(x), epsilon = 1e-6);
            assert_abs_diff_eq!(d(&|v| v.moment), -s.shear, epsilon = 1e-5);
            assert_abs_diff_eq!(-ei * d(&|v| v.phi), s.moment, epsilon = 1e-5 * s.moment.abs().max(1.0));
            let gamma = d(&|v| v.w) - s.phi;
            assert_abs_diff_eq!(-sga * gamma, s.shear, epsilon = 1e-5 * s.shear.abs().max(1.0));
        }
    }

    #[test]
    fn bending_block_of_linear_element() {
        let pb = BeamProblem::default();
        let disc = BeamDiscretization::uniform(1, 1, 1.0).unwrap();
        let em = element_matrices(&pb, &disc, 0).unwrap();
        let ei = pb.bending_stiffness();
        assert_abs_diff_eq!(em.bending[(1, 1)], ei, epsilon = 1e-12 * ei);
        assert_abs_diff_eq!(em.bending[(1, 3)], -ei, epsilon = 1e-12 * ei);
        assert_abs_diff_eq!(em.bending[(0, 0)], 0.0);
    }

    #[test]
    fn tip_moment_patch_test() {
        for p in 2..=4 {
            let pb = BeamProblem {
                load: BeamLoad::Uniform(0.0),
                tip_moment: 2.5,
                ..BeamProblem::with_slenderness(100.0)
            };
            let disc = BeamDiscretization::uniform(p, 3, pb.length).unwrap();
            let ei = pb.bending_stiffness();
            for f in [Formulation::SymmetricBezier, Formulation::NonSymmetricBezier, Formulation::GlobalBbar] {
                let sol = solve_beam(&pb, &disc, f).unwrap();
                // φ = Mx/EI, w = Mx²/(2EI)
                let x = pb.length;
                let fld = discrete_fields(&pb, &disc, &sol, 2, 1.0);
                let w_ex = 2.5 * x * x / (2.0 * ei);
                assert!((fld.w - w_ex).abs() < 1e-9 * w_ex, "{f}: {} vs {}", fld.w, w_ex);
                assert!((fld.phi - 2.5 * x / ei).abs() < 1e-9 * (2.5 * x / ei));
            }
        }
    }

    #[test]
    fn symmetric_stiffness_is_symmetric() {
        let pb = BeamProblem::default();
        let disc = BeamDiscretization::uniform(3, 6, pb.length).unwrap();
        let ops = assemble_operators(&pb, &disc).unwrap();
        for f in [Formulation::Standard, Formulation::SymmetricBezier, Formulation::GlobalBbar] {
            assert!(assemble_stiffness(&pb, &ops, f).unwrap().asymmetry() < 1e-12);
        }
        assert!(assemble_stiffness(&pb, &ops, Formulation::NonSymmetricBezier).unwrap().asymmetry() > 1e-8);
    }

    #[test]
    fn rigid_translation_is_in_kernel() {
        let pb = BeamProblem::default();
        let disc = BeamDiscretization::uniform(2, 5, pb.length).unwrap();
        let ops = assemble_operators(&pb, &disc).unwrap();
        let d: Vec<f64> = (0..disc.n_dofs()).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        for f in Formulation::ALL {
            let k = assemble_stiffness(&pb, &ops, f).unwrap();
            let r = k.mul_vec(&d);
            assert!(r.iter().all(|v| v.abs() < 1e-9 * k.max_abs()), "{f}");
        }
    }

    #[test]
    fn mixed_equals_condensed() {
        let pb = BeamProblem::default();
        let disc = BeamDiscretization::uniform(2, 4, pb.length).unwrap();
        let ops = assemble_operators(&pb, &disc).unwrap();
        let a = solve_condensed(&pb, &disc, &ops, Formulation::NonSymmetricBezier).unwrap();
        let b = solve_mixed(&pb, &disc).unwrap();
        let scale = a.w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (x, y) in a.w.iter().zip(&b.w) {
            assert!((x - y).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn single_element_symmetric_equals_global() {
        let pb = BeamProblem::default();
        let disc = BeamDiscretization::uniform(3, 1, pb.length).unwrap();
        let ops = assemble_operators(&pb, &disc).unwrap();
        let s = assemble_stiffness(&pb, &ops, Formulation::SymmetricBezier).unwrap().to_dense();
        let g = assemble_stiffness(&pb, &ops, Formulation::GlobalBbar).unwrap().to_dense();
        assert!((s - &g).amax() < 1e-9 * g.amax());
    }

    #[test]
    fn dof_count_inversion() {
        assert_eq!(elements_for_total_dofs(2, 32), Some(14));
        assert_eq!(elements_for_total_dofs(2, 31), None);
    }
}
