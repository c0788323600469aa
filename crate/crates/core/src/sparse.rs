//! Minimal sparse layer over the direct solver.
//!
//! Assembly emits unsorted, duplicated triplets; this module sums them into
//! CSC, applies row equilibration, and solves with a sparse LU. The Newton
//! loop produces the same structural pattern every iteration, so the
//! symbolic factorization is computed once and reused.

use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{SparseColMat, SymbolicSparseColMat, Triplet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SparseError {
    #[error("failed to build sparse matrix: {0}")]
    Build(String),
    #[error("sparse LU factorization failed (matrix singular or structurally deficient): {0}")]
    Factorization(String),
    #[error("matrix pattern changed between factorizations")]
    PatternChanged,
}

/// Square coordinate-format accumulator. Duplicate entries sum.
#[derive(Debug, Clone)]
pub struct Coo {
    pub n: usize,
    entries: Vec<Triplet<usize, usize, f64>>,
}

impl Coo {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self { n, entries: Vec::with_capacity(cap) }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n && col < self.n);
        self.entries.push(Triplet::new(row, col, value));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    /// Add every entry of `other`, optionally scaled.
    pub fn add_scaled(&mut self, other: &Coo, scale: f64) {
        debug_assert_eq!(self.n, other.n);
        for t in &other.entries {
            self.entries.push(Triplet::new(t.row, t.col, scale * t.val));
        }
    }

    pub fn to_csc(&self) -> Result<SparseColMat<usize, f64>, SparseError> {
        SparseColMat::try_new_from_triplets(self.n, self.n, &self.entries)
            .map_err(|e| SparseError::Build(format!("{e:?}")))
    }

    /// y += scale * A x, summing duplicates implicitly.
    pub fn mul_add(&self, x: &[f64], y: &mut [f64], scale: f64) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for t in &self.entries {
            y[t.row] += scale * t.val * x[t.col];
        }
    }

    /// Dense copy, for small-system oracles in tests.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for t in &self.entries {
            a[t.row][t.col] += t.val;
        }
        a
    }

    /// Dump in coordinate text format: one `row\tcol\tvalue` line per
    /// stored entry (duplicates not merged).
    pub fn dump_coo(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        for t in &self.entries {
            writeln!(out, "{}\t{}\t{:e}", t.row, t.col, t.val)?;
        }
        Ok(())
    }
}

/// Sparse LU with cached symbolic analysis.
#[derive(Default)]
pub struct DirectSolver {
    symbolic: Option<(SymbolicSparseColMat<usize>, SymbolicLu<usize>)>,
}

impl DirectSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Solve A x = b with row equilibration.
    ///
    /// Rows are scaled to unit infinity norm before factorizing; this only
    /// conditions the factorization, the solution is unchanged.
    pub fn solve(&mut self, a: &Coo, b: &[f64]) -> Result<Vec<f64>, SparseError> {
        let n = a.n;
        assert_eq!(b.len(), n);
        let mat = a.to_csc()?;

        let mut row_scale = vec![0.0f64; n];
        for col in 0..n {
            for (&row, &val) in mat
                .row_idx_of_col_raw(col)
                .iter()
                .zip(mat.val_of_col(col).iter())
            {
                row_scale[row] = row_scale[row].max(val.abs());
            }
        }
        for s in &mut row_scale {
            *s = if *s > 0.0 { 1.0 / *s } else { 1.0 };
        }

        let mut scaled = mat;
        {
            let (symbolic, values) = scaled.parts_mut();
            let mut k = 0;
            for col in 0..n {
                for &row in symbolic.row_idx_of_col_raw(col) {
                    values[k] *= row_scale[row];
                    k += 1;
                }
            }
        }

        let reuse = match &self.symbolic {
            Some((pattern, _)) => {
                if pattern.row_idx() == scaled.symbolic().row_idx()
                    && pattern.col_ptr() == scaled.symbolic().col_ptr()
                {
                    true
                } else {
                    return Err(SparseError::PatternChanged);
                }
            }
            None => false,
        };
        if !reuse {
            let sym = SymbolicLu::try_new(scaled.symbolic())
                .map_err(|e| SparseError::Factorization(format!("{e:?}")))?;
            self.symbolic = Some((scaled.symbolic().to_owned().unwrap(), sym));
        }
        let sym = &self.symbolic.as_ref().unwrap().1;
        // An exactly zero pivot makes the numeric factorization panic
        // instead of returning an error; contain it here.
        let lu = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
            Lu::try_new_with_symbolic(sym.clone(), scaled.as_ref())
        }))
        .map_err(|_| SparseError::Factorization("zero pivot".into()))?
        .map_err(|e| SparseError::Factorization(format!("{e:?}")))?;

        let mut rhs = faer::Mat::zeros(n, 1);
        for i in 0..n {
            rhs[(i, 0)] = b[i] * row_scale[i];
        }
        use faer::linalg::solvers::Solve;
        let sol = lu.solve(&rhs);
        let x: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(SparseError::Factorization("non-finite solution".into()));
        }
        Ok(x)
    }

    /// Drop the cached symbolic analysis (pattern about to change).
    pub fn reset(&mut self) {
        self.symbolic = None;
    }
}
