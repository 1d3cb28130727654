//! Lanczos against the dense oracle on random sectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xxzfk::eigensolve::{full_spectrum, lowest_k, orthonormalize, projection_distance};
use xxzfk::hilbert::SpinBasisSector;
use xxzfk::sparse::SparseOperator;
use xxzfk::xxz::{build_chain_hamiltonian, Boundary};

fn random_sector(rng: &mut ChaCha8Rng) -> (usize, usize, f64, Boundary, SparseOperator) {
    loop {
        let l = rng.random_range(4..=11);
        let n = rng.random_range(0..=l);
        let s = SpinBasisSector::new(l, n).unwrap();
        if s.dim() < 6 || s.dim() > 512 {
            continue;
        }
        let delta = rng.random_range(1.05..4.0);
        let bd = [Boundary::PP, Boundary::PM, Boundary::MP, Boundary::MM][rng.random_range(0..4)];
        let op = build_chain_hamiltonian(l, delta, bd, &s).unwrap();
        return (l, n, delta, bd, op);
    }
}

#[test]
fn fifty_random_sectors_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let (l, n, delta, bd, op) = random_sector(&mut rng);
        let dense = full_spectrum(&op, true).unwrap();
        let lz = lowest_k(&op, 5, 1e-10, 100_000, case).unwrap();
        for i in 0..5 {
            assert!(
                (lz.eigenvalues[i] - dense.eigenvalues[i]).abs() < 1e-8,
                "L={l} n={n} Δ={delta} {bd:?}: level {i}"
            );
        }
        assert!(lz.max_residual() <= 1e-10);
        assert!(dense.max_residual() <= 1e-10);
        // eigenvectors up to clusters: compare spans at a non-degenerate cut
        if !dense.cut_is_degenerate(5) && dense.eigenvalues[5] - dense.eigenvalues[4] > 1e-3 {
            let a = dense.leading_subspace(5).unwrap();
            let b = lz.leading_subspace(5).unwrap();
            assert!(projection_distance(&a, &b).unwrap() < 1e-6);
        }
    }
}

#[test]
fn eigenvectors_are_orthonormal() {
    let s = SpinBasisSector::new(12, 5).unwrap();
    let op = build_chain_hamiltonian(12, 2.125, Boundary::PP, &s).unwrap();
    let r = lowest_k(&op, 9, 1e-10, 100_000, 5).unwrap();
    let basis = orthonormalize(r.eigenvectors.as_ref().unwrap(), 1e-8).unwrap();
    assert_eq!(basis.rank(), 9);
    let v = r.eigenvectors.as_ref().unwrap();
    for i in 0..9 {
        for j in 0..9 {
            let d: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
            assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
        }
    }
}

#[test]
fn residuals_are_verifiable_by_matvec() {
    let s = SpinBasisSector::new(13, 6).unwrap();
    let op = build_chain_hamiltonian(13, 1.5, Boundary::MP, &s).unwrap();
    let r = lowest_k(&op, 4, 1e-9, 100_000, 9).unwrap();
    for (i, v) in r.eigenvectors.as_ref().unwrap().iter().enumerate() {
        let hv = op.apply(v);
        let res: f64 = hv
            .iter()
            .zip(v)
            .map(|(h, x)| (h - r.eigenvalues[i] * x).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-9);
        assert!((res - r.residual_norms[i]).abs() < 1e-12);
    }
}
