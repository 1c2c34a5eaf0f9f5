//! Extreme eigenvalues of symmetric pencils `K x = lambda G x` with `G` positive definite.

use nalgebra::{DMatrix, SymmetricEigen};
use nalgebra_sparse::CsrMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{bilinear, matvec, SpdFactor, Vector};

const MAX_KRYLOV: usize = 400;

/// Largest eigenvalue of an operator self-adjoint in the inner product of `inner`,
/// by Lanczos with full reorthogonalization.
fn lanczos_largest<F>(n: usize, op: F, inner: &CsrMatrix<f64>, rel_tol: f64, seed: u64) -> Result<f64>
where
    F: Fn(&Vector) -> Vector,
{
    if n == 0 {
        return Err(Error::Eigen("empty space".into()));
    }
    let dot = |x: &Vector, y: &Vector| bilinear(inner, x, y);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = Vector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    q /= dot(&q, &q).sqrt();
    let mut basis: Vec<Vector> = vec![q];
    let mut alphas = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last = f64::NAN;
    for j in 0..n.min(MAX_KRYLOV) {
        let mut w = op(&basis[j]);
        let a = dot(&w, &basis[j]);
        alphas.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.axpy(-c, b, 1.0);
            }
        }
        let beta = dot(&w, &w).max(0.0).sqrt();
        let m = alphas.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alphas[i];
            if i + 1 < m {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imax, theta) = eig
            .eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let residual = beta * eig.eigenvectors[(m - 1, imax)].abs();
        let scale = theta.abs().max(f64::MIN_POSITIVE);
        if residual <= rel_tol * scale || beta <= 1e-14 * scale || m == n {
            return Ok(theta);
        }
        last = theta;
        betas.push(beta);
        basis.push(w / beta);
    }
    Err(Error::Eigen(format!("Lanczos did not converge in {MAX_KRYLOV} steps (last Ritz value {last})")))
}

/// Largest `lambda` with `K x = lambda G x`; `K` symmetric positive semidefinite.
pub fn largest_generalized(k: &CsrMatrix<f64>, g: &CsrMatrix<f64>, g_factor: &SpdFactor) -> Result<f64> {
    lanczos_largest(k.nrows(), |x| g_factor.solve(&matvec(k, x)), g, 1e-11, 17)
}

/// Smallest `lambda` with `K x = lambda G x`; `K` symmetric positive definite.
pub fn smallest_generalized(k: &CsrMatrix<f64>, g: &CsrMatrix<f64>) -> Result<f64> {
    let kf = SpdFactor::new(k)?;
    let theta = lanczos_largest(k.nrows(), |x| kf.solve(&matvec(g, x)), g, 1e-11, 29)?;
    Ok(1.0 / theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{csr_from_triplets, to_dense};

    #[test]
    fn matches_dense_generalized_eigenvalues() {
        let n = 30;
        let mut kt = Vec::new();
        let mut gt = Vec::new();
        for i in 0..n {
            kt.push((i, i, 2.0 + 0.1 * i as f64));
            gt.push((i, i, 1.0 + 0.05 * (i % 3) as f64));
            if i + 1 < n {
                kt.push((i, i + 1, -0.9));
                kt.push((i + 1, i, -0.9));
                gt.push((i, i + 1, 0.2));
                gt.push((i + 1, i, 0.2));
            }
        }
        let (k, g) = (csr_from_triplets(n, &kt), csr_from_triplets(n, &gt));
        let gf = SpdFactor::new(&g).unwrap();
        let hi = largest_generalized(&k, &g, &gf).unwrap();
        let lo = smallest_generalized(&k, &g).unwrap();
        // Dense oracle: eigenvalues of L^{-1} K L^{-T}.
        let chol = to_dense(&g).cholesky().unwrap();
        let linv = chol.l().try_inverse().unwrap();
        let s = &linv * to_dense(&k) * linv.transpose();
        let ev = SymmetricEigen::new(0.5 * (&s + s.transpose())).eigenvalues;
        assert!((hi - ev.max()).abs() <= 1e-10 * ev.max());
        assert!((lo - ev.min()).abs() <= 1e-10 * ev.max());
    }
}
