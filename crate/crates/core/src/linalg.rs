//! Small sparse linear algebra layer over `nalgebra-sparse`.

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};

pub type Vector = DVector<f64>;

/// Build an `n x n` CSR matrix from triplets; duplicate entries are summed in order.
pub fn csr_from_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> CsrMatrix<f64> {
    let mut coo = CooMatrix::new(n, n);
    for &(i, j, v) in triplets {
        coo.push(i, j, v);
    }
    CsrMatrix::from(&coo)
}

/// Sparse matrix-vector product.
pub fn matvec(a: &CsrMatrix<f64>, x: &Vector) -> Vector {
    let mut y = Vector::zeros(a.nrows());
    for (i, row) in a.row_iter().enumerate() {
        let mut s = 0.0;
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            s += v * x[j];
        }
        y[i] = s;
    }
    y
}

/// `x^T A y`.
pub fn bilinear(a: &CsrMatrix<f64>, x: &Vector, y: &Vector) -> f64 {
    a.row_iter()
        .enumerate()
        .map(|(i, row)| {
            let s: f64 = row.col_indices().iter().zip(row.values()).map(|(&j, &v)| v * y[j]).sum();
            x[i] * s
        })
        .sum()
}

/// `x^T A x`.
pub fn quad_form(a: &CsrMatrix<f64>, x: &Vector) -> f64 {
    bilinear(a, x, x)
}

/// Norm induced by a symmetric positive (semi)definite matrix.
pub fn energy_norm(a: &CsrMatrix<f64>, x: &Vector) -> f64 {
    quad_form(a, x).max(0.0).sqrt()
}

/// Restrict a matrix to the rows and columns listed in `keep`.
pub fn restrict(a: &CsrMatrix<f64>, keep: &[usize], full_to_kept: &[Option<usize>]) -> CsrMatrix<f64> {
    let mut triplets = Vec::with_capacity(a.nnz());
    for (ri, &r) in keep.iter().enumerate() {
        let row = a.row(r);
        for (&c, &v) in row.col_indices().iter().zip(row.values()) {
            if let Some(ci) = full_to_kept[c] {
                triplets.push((ri, ci, v));
            }
        }
    }
    csr_from_triplets(keep.len(), &triplets)
}

/// `alpha * A + beta * B`.
pub fn linear_combination(alpha: f64, a: &CsrMatrix<f64>, beta: f64, b: &CsrMatrix<f64>) -> CsrMatrix<f64> {
    let mut triplets = Vec::with_capacity(a.nnz() + b.nnz());
    triplets.extend(a.triplet_iter().map(|(i, j, &v)| (i, j, alpha * v)));
    triplets.extend(b.triplet_iter().map(|(i, j, &v)| (i, j, beta * v)));
    csr_from_triplets(a.nrows(), &triplets)
}

/// Add triplets into existing entries of `a`; returns false (leaving `a` partially
/// updated) if some entry lies outside the sparsity pattern.
pub fn add_in_pattern(a: &mut CsrMatrix<f64>, triplets: &[(usize, usize, f64)]) -> bool {
    use nalgebra_sparse::SparseEntryMut;
    for &(i, j, v) in triplets {
        match a.get_entry_mut(i, j) {
            Some(SparseEntryMut::NonZero(x)) => *x += v,
            _ => return false,
        }
    }
    true
}

/// Largest `|A_ij - A_ji|` over all stored entries.
pub fn max_asymmetry(a: &CsrMatrix<f64>) -> f64 {
    a.triplet_iter()
        .map(|(i, j, &v)| {
            let t = a.get_entry(j, i).map(|e| e.into_value()).unwrap_or(0.0);
            (v - t).abs()
        })
        .fold(0.0, f64::max)
}

pub fn max_abs(a: &CsrMatrix<f64>) -> f64 {
    a.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn to_dense(a: &CsrMatrix<f64>) -> nalgebra::DMatrix<f64> {
    let mut d = nalgebra::DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, &v) in a.triplet_iter() {
        d[(i, j)] += v;
    }
    d
}

/// Cholesky factorization of a sparse symmetric positive definite matrix.
pub struct SpdFactor {
    chol: CscCholesky<f64>,
}

impl SpdFactor {
    pub fn new(a: &CsrMatrix<f64>) -> Result<Self> {
        let csc = a.clone().transpose_as_csc();
        let chol = CscCholesky::factor(&csc).map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(SpdFactor { chol })
    }

    /// Refactor a matrix with exactly the sparsity pattern of the one factored first.
    pub fn refactor(&mut self, a: &CsrMatrix<f64>) -> Result<()> {
        // For a symmetric matrix the CSR arrays coincide with the CSC arrays.
        self.chol.refactor(a.values()).map_err(|e| Error::Factorization(format!("{e:?}")))
    }

    pub fn solve(&self, b: &Vector) -> Vector {
        let x = self.chol.solve(b);
        Vector::from_column_slice(x.as_slice())
    }
}
