//! Restarted block Lanczos with full reorthogonalization.
//!
//! Each cycle starts from a block of `b` orthonormal vectors and grows the
//! block Krylov space one vector at a time (band form): processing basis
//! vector `v_j` computes `H v_j`, records the column `Vᵀ H v_j` of the
//! projected matrix, and orthogonalizes `H v_j` twice against the whole basis
//! to obtain the next vector. When the basis reaches its size limit, the
//! remaining vectors are processed without expansion, the projected matrix is
//! diagonalized, and the lowest `b` Ritz vectors seed the next cycle.
//!
//! A block larger than any eigenvalue cluster among the wanted pairs keeps
//! convergence governed by the gap to the rest of the spectrum rather than by
//! the spacing inside the cluster.

use super::{axpy, dot, fix_phase, norm, residual_norm, Method, SpectralResult};
use crate::error::{domain, Error, Result};
use crate::sparse::SparseOperator;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Residual target ‖Hv - λv‖ for every returned pair.
    pub tol: f64,
    /// Budget of matrix-vector products across all restarts.
    pub max_iter: usize,
    pub seed: u64,
    /// Block size; default `k + 3`.
    pub block: Option<usize>,
    /// Basis size per cycle; default `max(6·block, 60)`.
    pub basis: Option<usize>,
    /// Further Ritz pairs returned after the `k` converged ones, with
    /// whatever residual they reached. Their values are upper bounds.
    pub extra: usize,
}

impl LanczosOptions {
    pub fn new(tol: f64, max_iter: usize, seed: u64) -> Self {
        Self {
            tol,
            max_iter,
            seed,
            block: None,
            basis: None,
            extra: 0,
        }
    }
}

/// Lowest `k` eigenpairs of `op`, with every residual at most `tol`.
///
/// `max_iter` bounds the number of matrix-vector products. The result is a
/// deterministic function of the operator, `k` and `seed`.
pub fn lowest_k(
    op: &SparseOperator,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralResult> {
    lowest_k_with(op, k, LanczosOptions::new(tol, max_iter, seed))
}

pub fn lowest_k_with(op: &SparseOperator, k: usize, opts: LanczosOptions) -> Result<SpectralResult> {
    let n = op.dim();
    if k == 0 || k > n {
        return domain(format!("lowest_k needs 1 <= k <= dim, got k={k}, dim={n}"));
    }
    if !(opts.tol > 0.0) {
        return domain(format!("tolerance must be positive, got {}", opts.tol));
    }
    let want = (k + opts.extra).min(n);
    let block = opts.block.unwrap_or(want + 3).clamp(want, n);
    let basis_cap = opts.basis.unwrap_or((6 * block).max(60)).min(n).max(block);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut scratch = vec![0.0; n];

    let mut start: Vec<Vec<f64>> = (0..block).map(|_| random_vector(&mut rng, n)).collect();
    let mut matvecs = 0usize;
    let mut cycles = 0usize;
    let mut best: Vec<f64> = vec![f64::INFINITY; k];

    loop {
        cycles += 1;
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(basis_cap);
        for v in start.drain(..) {
            push_orthogonal(&mut basis, v, None, &mut rng, n);
        }
        let mut proj = DMatrix::<f64>::zeros(basis_cap, basis_cap);
        let mut processed = 0;
        while processed < basis.len() {
            let j = processed;
            let mut w = vec![0.0; n];
            op.matvec(&basis[j], &mut w);
            matvecs += 1;
            let prior = norm(&w);
            // the first Gram-Schmidt pass yields the projected column
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                proj[(i, j)] = c;
                proj[(j, i)] = c;
                axpy(-c, v, &mut w);
            }
            processed += 1;
            if basis.len() < basis_cap {
                push_orthogonal(&mut basis, w, Some(prior), &mut rng, n);
            }
        }
        let m = basis.len();
        let eig = SymmetricEigen::new(proj.view((0, 0), (m, m)).into_owned());
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));

        let keep = block.min(m);
        let mut ritz_vals = Vec::with_capacity(keep);
        let mut ritz_vecs = Vec::with_capacity(keep);
        for &c in order.iter().take(keep) {
            let mut y = vec![0.0; n];
            for (i, v) in basis.iter().enumerate() {
                axpy(eig.eigenvectors[(i, c)], v, &mut y);
            }
            let ny = norm(&y);
            y.iter_mut().for_each(|x| *x /= ny);
            ritz_vals.push(eig.eigenvalues[c]);
            ritz_vecs.push(y);
        }
        drop(basis);

        let residuals: Vec<f64> = (0..k)
            .map(|i| residual_norm(op, &ritz_vecs[i], ritz_vals[i], &mut scratch))
            .collect();
        matvecs += k;
        for (b, r) in best.iter_mut().zip(&residuals) {
            *b = b.min(*r);
        }
        // a basis spanning the whole space is exact
        let exhausted = m == n;
        if exhausted || residuals.iter().all(|&r| r <= opts.tol) {
            let mut vectors: Vec<Vec<f64>> = ritz_vecs.into_iter().take(want).collect();
            vectors.iter_mut().for_each(|v| fix_phase(v));
            let residual_norms = vectors
                .iter()
                .zip(&ritz_vals)
                .map(|(v, &l)| residual_norm(op, v, l, &mut scratch))
                .collect::<Vec<_>>();
            if exhausted && residual_norms[..k].iter().any(|&r| r > opts.tol) {
                return Err(Error::NoConvergence {
                    iterations: cycles,
                    residuals: residual_norms,
                });
            }
            ritz_vals.truncate(want);
            return Ok(SpectralResult {
                eigenvalues: ritz_vals,
                eigenvectors: Some(vectors),
                method: Method::Lanczos,
                residual_norms,
                sector_tag: op.tag(),
            });
        }
        if matvecs + basis_cap + k > opts.max_iter {
            return Err(Error::NoConvergence {
                iterations: cycles,
                residuals: best,
            });
        }
        start = ritz_vecs;
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Orthogonalize `w` against `basis` and append it normalized. `prior` is
/// the norm of `w` before an orthogonalization pass the caller already made,
/// in which case one more pass is done here instead of two. A direction
/// that is numerically dependent is replaced by a random one, which is
/// always possible while the basis is smaller than the space.
fn push_orthogonal(
    basis: &mut Vec<Vec<f64>>,
    mut w: Vec<f64>,
    mut prior: Option<f64>,
    rng: &mut ChaCha8Rng,
    n: usize,
) {
    if basis.len() >= n {
        return;
    }
    for attempt in 0..8 {
        let (before, passes) = match prior.take() {
            Some(p) => (p, 1),
            None => (norm(&w), 2),
        };
        if before > 0.0 {
            for _ in 0..passes {
                for v in basis.iter() {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                }
            }
            let after = norm(&w);
            if after > 1e-10 * before {
                w.iter_mut().for_each(|x| *x /= after);
                basis.push(w);
                return;
            }
        }
        debug_assert!(attempt < 7, "could not extend a basis of size {} in dimension {n}", basis.len());
        w = random_vector(rng, n);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensolve::full_spectrum;
    use crate::hilbert::SpinBasisSector;
    use crate::xxz::{build_chain_hamiltonian, Boundary};

    fn chain(sites: usize, down: usize, delta: f64, bd: Boundary) -> SparseOperator {
        let s = SpinBasisSector::new(sites, down).unwrap();
        build_chain_hamiltonian(sites, delta, bd, &s).unwrap()
    }

    #[test]
    fn agrees_with_dense() {
        let op = chain(10, 4, 1.7, Boundary::PP);
        let dense = full_spectrum(&op, false).unwrap();
        let lz = lowest_k(&op, 6, 1e-10, 20_000, 7).unwrap();
        for i in 0..6 {
            assert!((lz.eigenvalues[i] - dense.eigenvalues[i]).abs() < 1e-9);
        }
        assert!(lz.max_residual() <= 1e-10);
        assert_eq!(lz.method, Method::Lanczos);
    }

    #[test]
    fn resolves_droplet_cluster() {
        // 9 nearly degenerate levels below a gap
        let op = chain(12, 4, 2.125, Boundary::PP);
        let dense = full_spectrum(&op, false).unwrap();
        let lz = lowest_k(&op, 10, 1e-10, 50_000, 1).unwrap();
        for i in 0..10 {
            assert!((lz.eigenvalues[i] - dense.eigenvalues[i]).abs() < 1e-9, "{i}");
        }
    }

    #[test]
    fn extra_pairs_bound_the_next_levels() {
        let op = chain(12, 6, 2.125, Boundary::PP);
        let dense = full_spectrum(&op, false).unwrap();
        let mut opts = LanczosOptions::new(1e-10, 50_000, 2);
        opts.extra = 2;
        let lz = lowest_k_with(&op, 7, opts).unwrap();
        assert_eq!(lz.len(), 9);
        assert!(lz.residual_norms[..7].iter().all(|&r| r <= 1e-10));
        for i in 7..9 {
            assert!(lz.eigenvalues[i] >= dense.eigenvalues[i] - 1e-12);
            assert!(lz.eigenvalues[i] - dense.eigenvalues[i] <= lz.residual_norms[i] + 1e-12);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let op = chain(11, 5, 2.0, Boundary::PM);
        let a = lowest_k(&op, 3, 1e-9, 20_000, 42).unwrap();
        let b = lowest_k(&op, 3, 1e-9, 20_000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_space_is_exhausted() {
        let op = chain(4, 2, 2.125, Boundary::PP);
        let dense = full_spectrum(&op, false).unwrap();
        let lz = lowest_k(&op, 5, 1e-10, 1000, 3).unwrap();
        for i in 0..5 {
            assert!((lz.eigenvalues[i] - dense.eigenvalues[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn one_dimensional_sector() {
        let op = chain(12, 12, 2.125, Boundary::PP);
        let r = lowest_k(&op, 1, 1e-12, 10, 0).unwrap();
        assert_eq!(r.eigenvalues, vec![15.0 / 34.0]);
    }

    #[test]
    fn argument_checks() {
        let op = chain(4, 2, 2.125, Boundary::PP);
        assert!(lowest_k(&op, 0, 1e-10, 100, 0).is_err());
        assert!(lowest_k(&op, 7, 1e-10, 100, 0).is_err());
        assert!(lowest_k(&op, 1, 0.0, 100, 0).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_residuals() {
        let op = chain(14, 7, 1.1, Boundary::PP);
        match lowest_k(&op, 2, 1e-13, 70, 0) {
            Err(Error::NoConvergence { residuals, .. }) => assert_eq!(residuals.len(), 2),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
