use super::{fix_phase, residual_norm, Method, SpectralResult};
use crate::error::{Error, Result};
use crate::sparse::SparseOperator;
use nalgebra::SymmetricEigen;

pub const DEFAULT_DENSE_CAP: usize = 4096;

/// All eigenvalues (ascending) of `op`, and optionally its eigenvectors, by
/// dense diagonalization.
pub fn full_spectrum(op: &SparseOperator, want_vectors: bool) -> Result<SpectralResult> {
    full_spectrum_with_cap(op, want_vectors, DEFAULT_DENSE_CAP)
}

pub fn full_spectrum_with_cap(
    op: &SparseOperator,
    want_vectors: bool,
    cap: usize,
) -> Result<SpectralResult> {
    let n = op.dim();
    if n > cap {
        return Err(Error::DenseCapExceeded { dim: n, cap });
    }
    let m = op.to_dense();
    if !want_vectors {
        let mut eigenvalues: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(f64::total_cmp);
        return Ok(SpectralResult {
            eigenvalues,
            eigenvectors: None,
            method: Method::Dense,
            residual_norms: Vec::new(),
            sector_tag: op.tag(),
        });
    }
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut scratch = vec![0.0; n];
    for &i in &order {
        let lambda = eig.eigenvalues[i];
        let mut v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        fix_phase(&mut v);
        residuals.push(residual_norm(op, &v, lambda, &mut scratch));
        eigenvalues.push(lambda);
        vectors.push(v);
    }
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors: Some(vectors),
        method: Method::Dense,
        residual_norms: residuals,
        sector_tag: op.tag(),
    })
}
