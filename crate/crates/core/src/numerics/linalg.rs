//! Direct solvers, the symmetric generalized eigenvalue routine used by
//! the inf-sup test, and matrix pattern statistics.

use nalgebra::{DMatrix, DVector};

use super::sparse::CsrMatrix;
use super::NumericsError;

/// Systems at or above this size go through the banded LU path.
pub const DENSE_SOLVE_LIMIT: usize = 3000;

/// Accepted relative residual `‖Ax − b‖ / ‖b‖`.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Entries below this fraction of `max|a|` are ignored by the pattern
/// statistics (values are never dropped for solves).
pub const PATTERN_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Symmetric,
    General,
}

/// Maximum number of iterative-refinement sweeps.
const REFINEMENT_STEPS: usize = 4;

/// Solve `A x = b` with a direct method. Symmetric systems try Cholesky
/// first and fall back to LU when the matrix is not positive definite.
/// The result is refined with compensated residuals and must satisfy
/// `‖Ax − b‖ ≤ tol · max(‖b‖, ‖|A||x|‖)`.
pub fn solve(a: &CsrMatrix, b: &[f64], hint: Symmetry) -> Result<Vec<f64>, NumericsError> {
    let n = a.n_rows();
    if a.n_cols() != n || b.len() != n {
        return Err(NumericsError::Dimension {
            expected: (n, n),
            found: (a.n_cols(), b.len()),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let x = if n < DENSE_SOLVE_LIMIT {
        solve_dense(&a.to_dense(), b, hint)?
    } else {
        let lu = BandedLu::factor(a)?;
        let mut x = lu.solve(b);
        for _ in 0..REFINEMENT_STEPS {
            let r: Vec<f64> = (0..n)
                .map(|i| {
                    let row: Vec<(f64, f64)> = a.row(i).map(|(j, v)| (v, x[j])).collect();
                    compensated_residual(b[i], row.into_iter())
                })
                .collect();
            let dx = lu.solve(&r);
            let done = converged(&dx, &x);
            x.iter_mut().zip(&dx).for_each(|(xi, d)| *xi += d);
            if done {
                break;
            }
        }
        x
    };
    check_residual(a, &x, b)?;
    Ok(x)
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

/// `b − Σ a_j x_j` accumulated in doubled precision.
fn compensated_residual(b: f64, terms: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (b, 0.0);
    for (a, x) in terms {
        let p = -a * x;
        let ep = (-a).mul_add(x, -p);
        let (t, es) = two_sum(s, p);
        s = t;
        c += ep + es;
    }
    s + c
}

fn converged(dx: &[f64], x: &[f64]) -> bool {
    let dn = dx.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    dn <= f64::EPSILON * xn
}

fn refine(a: &DMatrix<f64>, rhs: &DVector<f64>, x: &mut DVector<f64>, step: impl Fn(&DVector<f64>) -> Option<DVector<f64>>) {
    let n = a.nrows();
    for _ in 0..REFINEMENT_STEPS {
        let r = DVector::from_fn(n, |i, _| compensated_residual(rhs[i], (0..n).map(|j| (a[(i, j)], x[j]))));
        let Some(dx) = step(&r) else { return };
        let done = converged(dx.as_slice(), x.as_slice());
        *x += dx;
        if done {
            return;
        }
    }
}

/// Dense direct solve with compensated iterative refinement.
pub fn solve_dense(a: &DMatrix<f64>, b: &[f64], hint: Symmetry) -> Result<Vec<f64>, NumericsError> {
    let n = a.nrows();
    let rhs = DVector::from_column_slice(b);
    if hint == Symmetry::Symmetric {
        if let Some(chol) = a.clone().cholesky() {
            let mut x = chol.solve(&rhs);
            refine(a, &rhs, &mut x, |r| Some(chol.solve(r)));
            return Ok(x.as_slice().to_vec());
        }
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let scale = (0..n).fold(0.0f64, |m, i| m.max(u[(i, i)].abs()));
    let (pivot_index, pivot) = (0..n)
        .map(|i| (i, u[(i, i)].abs()))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    if scale == 0.0 || pivot <= f64::EPSILON * scale * n as f64 {
        return Err(NumericsError::Singular {
            pivot_index,
            pivot_ratio: if scale == 0.0 { 0.0 } else { pivot / scale },
        });
    }
    let mut x = lu.solve(&rhs).ok_or(NumericsError::Singular {
        pivot_index,
        pivot_ratio: pivot / scale,
    })?;
    refine(a, &rhs, &mut x, |r| lu.solve(r));
    Ok(x.as_slice().to_vec())
}

/// Relative residual `‖Ax − b‖ / max(‖b‖, ‖|A||x|‖)`.
pub fn relative_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> f64 {
    let n = a.n_rows();
    let mut rn = 0.0;
    let mut an = 0.0;
    for i in 0..n {
        let row: Vec<(f64, f64)> = a.row(i).map(|(j, v)| (v, x[j])).collect();
        let abs: f64 = row.iter().map(|(v, xj)| (v * xj).abs()).sum();
        rn += compensated_residual(b[i], row.into_iter()).powi(2);
        an += abs * abs;
    }
    let bn = b.iter().map(|v| v * v).sum::<f64>();
    let denom = bn.max(an).sqrt();
    if denom > 0.0 {
        rn.sqrt() / denom
    } else {
        rn.sqrt()
    }
}

fn check_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> Result<(), NumericsError> {
    let rel = relative_residual(a, x, b);
    if !rel.is_finite() || rel > RESIDUAL_TOL {
        return Err(NumericsError::Residual { relative: rel });
    }
    Ok(())
}

/// Solve `A x = b` with the entries listed in `fixed` prescribed; those
/// rows are dropped and their columns lifted to the right-hand side.
/// Returns the full solution vector.
pub fn solve_constrained(
    a: &CsrMatrix,
    b: &[f64],
    fixed: &[(usize, f64)],
    hint: Symmetry,
) -> Result<Vec<f64>, NumericsError> {
    let n = a.n_rows();
    let mut value = vec![None; n];
    for &(i, v) in fixed {
        value[i] = Some(v);
    }
    let free: Vec<usize> = (0..n).filter(|&i| value[i].is_none()).collect();
    let mut x = vec![0.0; n];
    for &(i, v) in fixed {
        x[i] = v;
    }
    let lift = a.mul_vec(&x);
    let rhs: Vec<f64> = free.iter().map(|&i| b[i] - lift[i]).collect();
    let xf = solve(&a.select(&free, &free), &rhs, hint)?;
    for (i, v) in free.iter().zip(xf) {
        x[*i] = v;
    }
    Ok(x)
}

/// Row-window banded LU with partial pivoting. Multipliers are stored in
/// the order they are produced, as in LAPACK's `gbtrf`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    n: usize,
    /// Upper factor, one `(first column, values)` window per row.
    upper: Vec<(usize, Vec<f64>)>,
    pivots: Vec<usize>,
    lower: Vec<Vec<(usize, f64)>>,
}

impl BandedLu {
    pub fn factor(a: &CsrMatrix) -> Result<Self, NumericsError> {
        let n = a.n_rows();
        let (mut kl, mut ku) = (0usize, 0usize);
        for (i, j, _) in a.iter() {
            if j < i {
                kl = kl.max(i - j);
            } else {
                ku = ku.max(j - i);
            }
        }
        let mut rows: Vec<(usize, Vec<f64>)> = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(kl);
                let hi = (i + ku).min(n - 1);
                let mut v = vec![0.0; hi - lo + 1];
                for (j, val) in a.row(i) {
                    v[j - lo] += val;
                }
                (lo, v)
            })
            .collect();
        let scale = a.max_abs();
        let mut pivots = vec![0; n];
        let mut lower = vec![Vec::new(); n];
        let at = |row: &(usize, Vec<f64>), j: usize| -> f64 {
            if j >= row.0 && j < row.0 + row.1.len() {
                row.1[j - row.0]
            } else {
                0.0
            }
        };
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = at(&rows[k], k).abs();
            for (i, row) in rows.iter().enumerate().take(last + 1).skip(k + 1) {
                let v = at(row, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= f64::EPSILON * scale {
                return Err(NumericsError::Singular {
                    pivot_index: k,
                    pivot_ratio: if scale > 0.0 { best / scale } else { 0.0 },
                });
            }
            pivots[k] = p;
            rows.swap(k, p);
            let pivot_row = rows[k].clone();
            let piv = at(&pivot_row, k);
            let hi = pivot_row.0 + pivot_row.1.len();
            for i in (k + 1)..=last {
                let m = at(&rows[i], k) / piv;
                if m == 0.0 {
                    continue;
                }
                let row = &mut rows[i];
                if row.0 + row.1.len() < hi {
                    row.1.resize(hi - row.0, 0.0);
                }
                for j in k..hi {
                    let u = at(&pivot_row, j);
                    if j >= row.0 {
                        row.1[j - row.0] -= m * u;
                    }
                }
                lower[k].push((i, m));
            }
        }
        Ok(Self {
            n,
            upper: rows,
            pivots,
            lower,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut y = b.to_vec();
        for k in 0..self.n {
            y.swap(k, self.pivots[k]);
            let yk = y[k];
            for &(i, m) in &self.lower[k] {
                y[i] -= m * yk;
            }
        }
        let mut x = vec![0.0; self.n];
        for k in (0..self.n).rev() {
            let (lo, ref vals) = self.upper[k];
            let mut s = y[k];
            for (off, &u) in vals.iter().enumerate() {
                let j = lo + off;
                if j > k {
                    s -= u * x[j];
                }
            }
            x[k] = s / vals[k - lo];
        }
        x
    }
}

/// All eigenvalues of `A x = λ B x` for symmetric `A` and SPD `B`,
/// ascending. Reduction through the Cholesky factor of `B`.
pub fn generalized_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>, NumericsError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n {
        return Err(NumericsError::Dimension {
            expected: (n, n),
            found: (b.nrows(), b.ncols()),
        });
    }
    let chol = b.clone().cholesky().ok_or(NumericsError::NotPositiveDefinite)?;
    let l = chol.l();
    // C = L⁻¹ A L⁻ᵀ
    let y = l
        .solve_lower_triangular(a)
        .ok_or(NumericsError::NotPositiveDefinite)?;
    let c_t = l
        .solve_lower_triangular(&y.transpose())
        .ok_or(NumericsError::NotPositiveDefinite)?;
    let c = (&c_t + c_t.transpose()) * 0.5;
    let mut eig: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|p, q| p.total_cmp(q));
    Ok(eig)
}

/// Smallest eigenvalue of `A x = λ B x` above `rel_zero_tol · λ_max`.
pub fn smallest_nonzero_gen_eig(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    rel_zero_tol: f64,
) -> Result<f64, NumericsError> {
    let eig = generalized_eigenvalues(a, b)?;
    let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eig.into_iter()
        .find(|&v| v > rel_zero_tol * max)
        .ok_or(NumericsError::NoNonzeroEigenvalue)
}

/// Pattern statistics of an assembled matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandwidthStats {
    /// `max_i (last_col − first_col + 1)` over significant entries.
    pub bandwidth: usize,
    /// Number of significant entries.
    pub nnz: usize,
}

pub fn bandwidth(a: &CsrMatrix) -> BandwidthStats {
    block_bandwidth(a, 1)
}

/// Bandwidth after collapsing interleaved groups of `block` dofs into one
/// index (the coupling graph of basis functions for vector fields stored
/// as `[u0_0, u1_0, u0_1, u1_1, ...]`). `nnz` always counts scalar entries.
pub fn block_bandwidth(a: &CsrMatrix, block: usize) -> BandwidthStats {
    assert!(block > 0);
    let tol = PATTERN_REL_TOL * a.max_abs();
    let n_blocks = a.n_rows().div_ceil(block);
    let mut first = vec![usize::MAX; n_blocks];
    let mut last = vec![0usize; n_blocks];
    let mut nnz = 0;
    for (i, j, v) in a.iter() {
        if v.abs() <= tol {
            continue;
        }
        nnz += 1;
        let (bi, bj) = (i / block, j / block);
        first[bi] = first[bi].min(bj);
        last[bi] = last[bi].max(bj);
    }
    let bandwidth = first
        .iter()
        .zip(&last)
        .filter(|(f, _)| **f != usize::MAX)
        .map(|(f, l)| l - f + 1)
        .max()
        .unwrap_or(0);
    BandwidthStats { bandwidth, nnz }
}
