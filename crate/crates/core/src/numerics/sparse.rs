//! Triplet and compressed-row sparse matrices, plus the scatter-add
//! assembly map used by every element loop in the crate.

use nalgebra::DMatrix;

/// Coordinate-format accumulator. Duplicates are allowed and summed on
/// compression.
#[derive(Debug, Clone, Default)]
pub struct TripletMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletMatrix {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.n_rows && col < self.n_cols, "triplet out of bounds");
        self.entries.push((row, col, value));
    }

    /// Scatter-add a dense element block at the given global rows and columns.
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], block: &DMatrix<f64>) {
        debug_assert_eq!(block.nrows(), rows.len());
        debug_assert_eq!(block.ncols(), cols.len());
        for (a, &r) in rows.iter().enumerate() {
            for (b, &c) in cols.iter().enumerate() {
                self.push(r, c, block[(a, b)]);
            }
        }
    }

    /// Append all entries of another accumulator of the same shape.
    pub fn extend(&mut self, other: TripletMatrix) {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        self.entries.extend(other.entries);
    }

    pub fn to_csr(&self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.n_rows, self.n_cols, &self.entries)
    }
}

/// Compressed sparse row matrix with sorted, unique column indices per row.
///
/// Stored values are exact sums of the contributing triplets, including
/// values that happen to cancel to (near) zero; the pattern statistics
/// apply their own threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn from_triplets(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n_rows + 1];
        for &(r, _, _) in entries {
            counts[r + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; entries.len()];
        let mut vals = vec![0.0; entries.len()];
        for &(r, c, v) in entries {
            let k = next[r];
            cols[k] = c;
            vals[k] = v;
            next[r] += 1;
        }
        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..n_rows {
            scratch.clear();
            scratch.extend((counts[r]..counts[r + 1]).map(|k| (cols[k], vals[k])));
            scratch.sort_by_key(|&(c, _)| c);
            let mut iter = scratch.iter().copied();
            if let Some((mut c0, mut acc)) = iter.next() {
                for (c, v) in iter {
                    if c == c0 {
                        acc += v;
                    } else {
                        col_idx.push(c0);
                        values.push(acc);
                        c0 = c;
                        acc = v;
                    }
                }
                col_idx.push(c0);
                values.push(acc);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Keep every entry with `|a| > drop_tol`.
    pub fn from_dense(a: &DMatrix<f64>, drop_tol: f64) -> Self {
        let mut entries = Vec::new();
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                let v = a[(i, j)];
                if v.abs() > drop_tol {
                    entries.push((i, j, v));
                }
            }
        }
        Self::from_triplets(a.nrows(), a.ncols(), &entries)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// All stored entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn transpose(&self) -> CsrMatrix {
        let entries: Vec<_> = self.iter().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n_cols, self.n_rows, &entries)
    }

    pub fn scale(&self, factor: f64) -> CsrMatrix {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let entries: Vec<_> = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.n_rows, self.n_cols, &entries)
    }

    /// Sparse product `self · other` (row-wise accumulation).
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n_cols, other.n_rows, "inner dimensions differ");
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut acc = vec![0.0; other.n_cols];
        let mut mark = vec![usize::MAX; other.n_cols];
        let mut touched: Vec<usize> = Vec::new();
        for i in 0..self.n_rows {
            touched.clear();
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        touched.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                col_idx.push(j);
                values.push(acc[j]);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            n_rows: self.n_rows,
            n_cols: other.n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| self.row(i).map(|(j, v)| v * x[j]).sum())
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.iter() {
            a[(i, j)] += v;
        }
        a
    }

    /// Submatrix on the given (sorted or not) row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            col_map[old] = new;
        }
        let mut entries = Vec::new();
        for (new_r, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                let nc = col_map[c];
                if nc != usize::MAX {
                    entries.push((new_r, nc, v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &entries)
    }

    /// Max-norm of `A − Aᵀ` relative to max-norm of `A`.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let diff = self.add(&self.transpose().scale(-1.0));
        diff.max_abs() / scale
    }

    /// `row col value` text lines, sorted by row then column, for entries
    /// above `rel_tol · max|a|`.
    pub fn pattern_lines(&self, rel_tol: f64) -> Vec<String> {
        let tol = rel_tol * self.max_abs();
        self.iter()
            .filter(|&(_, _, v)| v.abs() > tol)
            .map(|(i, j, v)| format!("{i} {j} {v:.16e}"))
            .collect()
    }
}

/// Element-to-global degree-of-freedom connectivity. Assembly is the
/// scatter-add of element blocks through these maps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssemblyMap {
    element_dofs: Vec<Vec<usize>>,
    n_dofs: usize,
}

impl AssemblyMap {
    pub fn new(element_dofs: Vec<Vec<usize>>, n_dofs: usize) -> Self {
        debug_assert!(element_dofs.iter().flatten().all(|&d| d < n_dofs));
        Self {
            element_dofs,
            n_dofs,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.element_dofs.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn dofs(&self, e: usize) -> &[usize] {
        &self.element_dofs[e]
    }

    /// Assemble element matrices `blocks[e]` (rows through `self`,
    /// columns through `cols`).
    pub fn assemble(&self, cols: &AssemblyMap, blocks: &[DMatrix<f64>]) -> CsrMatrix {
        assert_eq!(blocks.len(), self.n_elements());
        let mut t = TripletMatrix::new(self.n_dofs, cols.n_dofs);
        for (e, block) in blocks.iter().enumerate() {
            t.add_block(self.dofs(e), cols.dofs(e), block);
        }
        t.to_csr()
    }

    pub fn assemble_vector(&self, blocks: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dofs];
        for (e, block) in blocks.iter().enumerate() {
            for (&g, v) in self.dofs(e).iter().zip(block) {
                out[g] += v;
            }
        }
        out
    }
}
