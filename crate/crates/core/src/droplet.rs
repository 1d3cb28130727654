//! Kink, antikink and droplet states of the XXZ chain, and numerical checks
//! of the droplet-multiplet spectrum of the `++` Hamiltonian.
//!
//! On an interval [a, b] with n down spins at x_1 < … < x_n, the kink state
//! has amplitude q^{Σ(b+1-x_k)} (down spins pushed to the right end) and the
//! antikink q^{Σ(x_k+1-a)} (pushed to the left end). The droplet state
//! centred at x is kink([1,x], ⌊n/2⌋) ⊗ antikink([x+1,L], ⌈n/2⌉).
//!
//! Constructors come in two flavours: `*_raw` evaluates the amplitudes
//! literally, the plain versions return unit vectors computed from
//! exponents shifted by their minimum so that long chains do not underflow.

use crate::eigensolve::{
    full_spectrum_with_cap, lowest_k_with, orthonormalize, projection_distance, LanczosOptions,
    Method, SpectralResult, SubspaceBasis, DEFAULT_DENSE_CAP,
};
use crate::error::{domain, Error, Result};
use crate::hilbert::SpinBasisSector;
use crate::xxz::{build_chain_hamiltonian, AnisotropyParam, Boundary};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Profile {
    Kink,
    Antikink,
}

/// Exponent of q for a local configuration on an interval of `len` sites
/// (bit i = site a + i).
fn exponent(bits: u64, len: usize, profile: Profile) -> u32 {
    let mut e = 0;
    let mut b = bits;
    while b != 0 {
        let i = b.trailing_zeros() as usize;
        e += match profile {
            Profile::Kink => len - i,
            Profile::Antikink => i + 1,
        };
        b &= b - 1;
    }
    e as u32
}

/// Smallest exponent over configurations with `n` down spins: n(n+1)/2.
fn min_exponent(n: usize) -> u32 {
    (n * (n + 1) / 2) as u32
}

fn check_interval(a: i64, b: i64, n: usize, q: f64) -> Result<usize> {
    if a > b {
        return domain(format!("interval [{a}, {b}] is empty"));
    }
    let len = (b - a + 1) as usize;
    if n > len {
        return Err(Error::SectorRange { sites: len, down: n });
    }
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q={q} must lie in (0, 1)"));
    }
    Ok(len)
}

fn interval_state(
    a: i64,
    b: i64,
    n: usize,
    q: f64,
    profile: Profile,
    raw: bool,
) -> Result<(SpinBasisSector, Vec<f64>)> {
    let len = check_interval(a, b, n, q)?;
    let sector = SpinBasisSector::new(len, n)?;
    let shift = if raw { 0 } else { min_exponent(n) };
    let mut v: Vec<f64> = sector
        .states()
        .iter()
        .map(|&bits| q.powi((exponent(bits, len, profile) - shift) as i32))
        .collect();
    if !raw {
        normalize(&mut v);
    }
    Ok((sector, v))
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Unit-norm kink state ψ^{+-}_{[a,b]}(n) in the (b-a+1, n) sector basis,
/// together with that basis.
pub fn kink_state(a: i64, b: i64, n: usize, q: f64) -> Result<(SpinBasisSector, Vec<f64>)> {
    interval_state(a, b, n, q, Profile::Kink, false)
}

/// Unit-norm antikink state ψ^{-+}_{[a,b]}(n).
pub fn antikink_state(a: i64, b: i64, n: usize, q: f64) -> Result<(SpinBasisSector, Vec<f64>)> {
    interval_state(a, b, n, q, Profile::Antikink, false)
}

/// Kink amplitudes exactly as the defining sum gives them (unnormalized).
pub fn kink_state_raw(a: i64, b: i64, n: usize, q: f64) -> Result<(SpinBasisSector, Vec<f64>)> {
    interval_state(a, b, n, q, Profile::Kink, true)
}

pub fn antikink_state_raw(a: i64, b: i64, n: usize, q: f64) -> Result<(SpinBasisSector, Vec<f64>)> {
    interval_state(a, b, n, q, Profile::Antikink, true)
}

/// Raw kink coefficient q^{Σ(b+1-x_k)} for down spins at `down_sites` in [a, b].
pub fn kink_coefficient(b: i64, down_sites: &[i64], q: f64) -> f64 {
    q.powi(down_sites.iter().map(|&x| (b + 1 - x) as i32).sum())
}

/// Raw antikink coefficient q^{Σ(x_k+1-a)}.
pub fn antikink_coefficient(a: i64, down_sites: &[i64], q: f64) -> f64 {
    q.powi(down_sites.iter().map(|&x| (x + 1 - a) as i32).sum())
}

/// Admissible droplet centres ⌊n/2⌋ ..= L - ⌈n/2⌉.
pub fn droplet_centers(sites: usize, n: usize) -> std::ops::RangeInclusive<usize> {
    n / 2..=sites - n.div_ceil(2)
}

fn droplet_vector(sites: usize, n: usize, x: usize, q: f64, sector: &SpinBasisSector, raw: bool) -> Vec<f64> {
    let left_n = (n / 2) as u32;
    let left_mask = crate::hilbert::full_mask(x);
    let shift = if raw {
        0
    } else {
        min_exponent(n / 2) + min_exponent(n.div_ceil(2))
    };
    sector
        .states()
        .iter()
        .map(|&bits| {
            let left = bits & left_mask;
            if left.count_ones() != left_n {
                return 0.0;
            }
            let right = bits >> x;
            let e = exponent(left, x, Profile::Kink) + exponent(right, sites - x, Profile::Antikink);
            q.powi((e - shift) as i32)
        })
        .collect()
}

fn check_droplet(sites: usize, n: usize, q: f64) -> Result<()> {
    if sites == 0 || n > sites {
        return Err(Error::SectorRange { sites, down: n });
    }
    if !(q > 0.0 && q < 1.0) {
        return domain(format!("q={q} must lie in (0, 1)"));
    }
    Ok(())
}

/// Unit-norm droplet state ξ_{L,n}(x) in the (L, n) sector basis.
pub fn droplet_state(sites: usize, n: usize, x: usize, q: f64) -> Result<Vec<f64>> {
    check_droplet(sites, n, q)?;
    if !droplet_centers(sites, n).contains(&x) {
        return domain(format!(
            "centre x={x} outside the admissible range {:?} for L={sites}, n={n}",
            droplet_centers(sites, n)
        ));
    }
    let sector = SpinBasisSector::new(sites, n)?;
    let mut v = droplet_vector(sites, n, x, q, &sector, false);
    normalize(&mut v);
    Ok(v)
}

/// ξ_{L,n}(x) with literal amplitudes.
pub fn droplet_state_raw(sites: usize, n: usize, x: usize, q: f64) -> Result<Vec<f64>> {
    check_droplet(sites, n, q)?;
    if !droplet_centers(sites, n).contains(&x) {
        return domain(format!("centre x={x} outside the admissible range for L={sites}, n={n}"));
    }
    let sector = SpinBasisSector::new(sites, n)?;
    Ok(droplet_vector(sites, n, x, q, &sector, true))
}

/// Number of independent droplet states: L - n + 1, except n = 0 where every
/// centre gives the all-up state.
pub fn multiplet_size(sites: usize, n: usize) -> usize {
    if n == 0 {
        1
    } else {
        sites - n + 1
    }
}

#[derive(Debug, Clone)]
pub struct DropletFamily {
    pub sites: usize,
    pub n: usize,
    pub q: f64,
    pub centers: Vec<usize>,
    pub raw_vectors: Vec<Vec<f64>>,
    pub basis: SubspaceBasis,
}

impl DropletFamily {
    /// Gram matrix of the raw droplet vectors.
    pub fn gram(&self) -> DMatrix<f64> {
        gram(&self.raw_vectors)
    }
}

fn gram(vectors: &[Vec<f64>]) -> DMatrix<f64> {
    let m = vectors.len();
    DMatrix::from_fn(m, m, |i, j| {
        vectors[i].iter().zip(&vectors[j]).map(|(a, b)| a * b).sum()
    })
}

/// The droplet family for (L, n) and an orthonormal basis of K_{L,n}.
/// Fails with [`Error::RankDeficient`] unless the detected rank equals
/// [`multiplet_size`].
pub fn droplet_subspace(sites: usize, n: usize, q: f64, rank_tol: f64) -> Result<DropletFamily> {
    check_droplet(sites, n, q)?;
    let sector = SpinBasisSector::new(sites, n)?;
    let centers: Vec<usize> = droplet_centers(sites, n).collect();
    let raw_vectors: Vec<Vec<f64>> = centers
        .iter()
        .map(|&x| droplet_vector(sites, n, x, q, &sector, true))
        .collect();
    let unit: Vec<Vec<f64>> = centers
        .iter()
        .map(|&x| {
            let mut v = droplet_vector(sites, n, x, q, &sector, false);
            normalize(&mut v);
            v
        })
        .collect();
    let basis = orthonormalize(&unit, rank_tol)?;
    let expected = multiplet_size(sites, n);
    if basis.rank() != expected {
        let mut spectrum: Vec<f64> = gram(&unit).symmetric_eigenvalues().iter().copied().collect();
        spectrum.sort_by(f64::total_cmp);
        return Err(Error::RankDeficient {
            rank: basis.rank(),
            expected,
            gram_spectrum: spectrum,
        });
    }
    Ok(DropletFamily {
        sites,
        n,
        q,
        centers,
        raw_vectors,
        basis,
    })
}

/// How sector spectra are computed for [`verify_theorem`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverBudget {
    pub dense_cap: usize,
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub rank_tol: f64,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            dense_cap: DEFAULT_DENSE_CAP,
            tol: 1e-9,
            max_iter: 500_000,
            seed: 0,
            rank_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    #[serde(rename = "L")]
    pub sites: usize,
    pub n: usize,
    pub delta: f64,
    pub q: f64,
    /// A(Δ).
    pub a_delta: f64,
    /// Number of eigenvalues in the droplet multiplet.
    pub multiplet: usize,
    /// max_k |λ(k) - A(Δ)| over the multiplet.
    pub window_halfwidth: f64,
    /// λ(multiplet + 1) - A(Δ), if the sector has that many levels.
    pub gap_value: Option<f64>,
    /// ‖Proj(K_{L,n}) - Proj(first `multiplet` eigenvectors)‖.
    pub subspace_distance: f64,
    /// 1 - 1/Δ.
    pub gamma_ref: f64,
    /// λ(multiplet) and λ(multiplet + 1) coincide within 1e-12.
    pub degenerate_cut: bool,
    pub method: Method,
    /// The multiplet eigenvalues followed by the next one, when available.
    pub eigenvalues: Vec<f64>,
    pub max_residual: f64,
}

/// Solve the `++` Hamiltonian on sector (L, n) for its lowest `count`
/// eigenpairs (all of them when the sector fits the dense cap).
pub fn droplet_sector_spectrum(
    sites: usize,
    n: usize,
    delta: f64,
    count: usize,
    budget: &SolverBudget,
) -> Result<SpectralResult> {
    let sector = SpinBasisSector::new(sites, n)?;
    let op = build_chain_hamiltonian(sites, delta, Boundary::PP, &sector)?;
    if op.dim() <= budget.dense_cap {
        full_spectrum_with_cap(&op, true, budget.dense_cap)
    } else {
        let opts = LanczosOptions::new(budget.tol, budget.max_iter, budget.seed);
        lowest_k_with(&op, count.min(op.dim()), opts)
    }
}

/// Measure the multiplet window, the gap above it, and the distance between
/// the multiplet's spectral subspace and K_{L,n}.
pub fn verify_theorem(sites: usize, n: usize, delta: f64, budget: &SolverBudget) -> Result<TheoremReport> {
    let aniso = AnisotropyParam::from_delta(delta)?;
    if sites < 2 {
        return domain(format!("chain needs at least 2 sites, got L={sites}"));
    }
    if n > sites {
        return Err(Error::SectorRange { sites, down: n });
    }
    let a = aniso.boundary_field();
    let m = multiplet_size(sites, n);
    let spec = droplet_sector_spectrum(sites, n, delta, m + 1, budget)?;
    let window_halfwidth = spec.eigenvalues[..m]
        .iter()
        .map(|l| (l - a).abs())
        .fold(0.0, f64::max);
    let gap_value = spec.eigenvalues.get(m).map(|l| l - a);
    let family = droplet_subspace(sites, n, aniso.q(), budget.rank_tol)?;
    let spectral = spec
        .leading_subspace(m)
        .ok_or_else(|| Error::Domain("solver returned no eigenvectors".into()))?;
    let subspace_distance = projection_distance(&family.basis, &spectral)?;
    let shown = (m + 1).min(spec.len());
    Ok(TheoremReport {
        sites,
        n,
        delta,
        q: aniso.q(),
        a_delta: a,
        multiplet: m,
        window_halfwidth,
        gap_value,
        subspace_distance,
        gamma_ref: aniso.gamma(),
        degenerate_cut: spec.cut_is_degenerate(m),
        method: spec.method,
        eigenvalues: spec.eigenvalues[..shown].to_vec(),
        max_residual: spec.max_residual(),
    })
}

/// ‖H^{+-} ψ^{+-}_{[1,L]}(n)‖ for the unit kink state.
pub fn kink_annihilation_check(sites: usize, n: usize, delta: f64) -> Result<f64> {
    zero_mode_residual(sites, n, delta, Boundary::PM)
}

/// ‖H^{-+} ψ^{-+}_{[1,L]}(n)‖ for the unit antikink state.
pub fn antikink_annihilation_check(sites: usize, n: usize, delta: f64) -> Result<f64> {
    zero_mode_residual(sites, n, delta, Boundary::MP)
}

fn zero_mode_residual(sites: usize, n: usize, delta: f64, boundary: Boundary) -> Result<f64> {
    let aniso = AnisotropyParam::from_delta(delta)?;
    if sites < 2 {
        return domain(format!("chain needs at least 2 sites, got L={sites}"));
    }
    let (sector, psi) = if boundary == Boundary::PM {
        kink_state(1, sites as i64, n, aniso.q())?
    } else {
        antikink_state(1, sites as i64, n, aniso.q())?
    };
    let op = build_chain_hamiltonian(sites, delta, boundary, &sector)?;
    let h_psi = op.apply(&psi);
    Ok(h_psi.iter().map(|x| x * x).sum::<f64>().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: f64 = 0.25;

    #[test]
    fn kink_amplitudes_on_three_sites() {
        let (s, raw) = kink_state_raw(1, 3, 1, Q).unwrap();
        // states: site 1 down, site 2 down, site 3 down
        assert_eq!(s.states(), &[0b001, 0b010, 0b100]);
        assert_eq!(raw, vec![1.0 / 64.0, 1.0 / 16.0, 1.0 / 4.0]);
        let (_, unit) = kink_state(1, 3, 1, Q).unwrap();
        let norm = (raw.iter().map(|x| x * x).sum::<f64>()).sqrt();
        for (u, r) in unit.iter().zip(&raw) {
            assert!((u - r / norm).abs() < 1e-15);
        }
        let (_, raw) = antikink_state_raw(1, 3, 1, Q).unwrap();
        assert_eq!(raw, vec![1.0 / 4.0, 1.0 / 16.0, 1.0 / 64.0]);
        assert_eq!(kink_coefficient(3, &[1], Q), 1.0 / 64.0);
        assert_eq!(antikink_coefficient(1, &[1], Q), 1.0 / 4.0);
    }

    #[test]
    fn trivial_interval_states() {
        let (s, v) = kink_state(4, 9, 0, Q).unwrap();
        assert_eq!((s.dim(), v), (1, vec![1.0]));
        let (_, v) = antikink_state(2, 2, 0, Q).unwrap();
        assert_eq!(v, vec![1.0]);
        let (_, v) = kink_state(1, 1, 1, Q).unwrap();
        assert_eq!(v, vec![1.0]);
        assert!(kink_state(1, 3, 4, Q).is_err());
        assert!(kink_state(3, 1, 0, Q).is_err());
        assert!(kink_state(1, 3, 1, 1.0).is_err());
    }

    #[test]
    fn reflection_maps_antikink_to_kink() {
        for n in 0..=6 {
            let (s, anti) = antikink_state(3, 8, n, Q).unwrap();
            let (_, kink) = kink_state(3, 8, n, Q).unwrap();
            for (i, c) in s.iter().enumerate() {
                let j = s.index_of(c.reflected().bits()).unwrap();
                assert!((anti[i] - kink[j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn droplet_endpoints() {
        for sites in [3, 6, 7] {
            let v = droplet_state(sites, sites, sites / 2, Q).unwrap();
            assert_eq!(v, vec![1.0]);
        }
        for x in 0..=12 {
            assert_eq!(droplet_state(12, 0, x, Q).unwrap(), vec![1.0]);
        }
        assert!(droplet_state(6, 4, 1, Q).is_err());
        assert!(droplet_state(6, 4, 5, Q).is_err());
        assert!(droplet_state(6, 4, 2, Q).is_ok());
    }

    #[test]
    fn droplet_matches_brute_force_tensor_product() {
        // kink([1,2], 1) ⊗ antikink([3,4], 1), expanded by hand over 4 sites
        let sector = SpinBasisSector::new(4, 2).unwrap();
        let raw = droplet_state_raw(4, 2, 2, Q).unwrap();
        for (i, c) in sector.iter().enumerate() {
            let downs: Vec<i64> = (1..=4).filter(|&s| c.is_down(s as usize).unwrap()).collect();
            let left: Vec<i64> = downs.iter().copied().filter(|&s| s <= 2).collect();
            let right: Vec<i64> = downs.iter().copied().filter(|&s| s > 2).collect();
            let expect = if left.len() == 1 && right.len() == 1 {
                kink_coefficient(2, &left, Q) * antikink_coefficient(3, &right, Q)
            } else {
                0.0
            };
            assert_eq!(raw[i], expect, "{:04b}", c.bits());
        }
        // the dominant amplitude puts the pair on sites 2 and 3
        let unit = droplet_state(4, 2, 2, Q).unwrap();
        let top = sector.index_of(0b0110).unwrap();
        assert!(unit.iter().enumerate().all(|(i, &v)| i == top || v < unit[top]));
    }

    #[test]
    fn droplet_support_respects_the_cut() {
        let (sites, n) = (9, 5);
        let sector = SpinBasisSector::new(sites, n).unwrap();
        for x in droplet_centers(sites, n) {
            let v = droplet_state(sites, n, x, 0.4).unwrap();
            for (i, c) in sector.iter().enumerate() {
                let left = (c.bits() & ((1 << x) - 1)).count_ones() as usize;
                if left != n / 2 {
                    assert_eq!(v[i], 0.0);
                } else {
                    assert!(v[i] > 0.0);
                }
            }
        }
    }

    #[test]
    fn droplet_subspace_ranks() {
        let fam = droplet_subspace(12, 5, Q, 1e-10).unwrap();
        assert_eq!(fam.centers.len(), 8);
        assert_eq!(fam.basis.rank(), 8);
        assert!(fam.basis.orthonormality_error() < 1e-12);
        let fam = droplet_subspace(3, 3, Q, 1e-10).unwrap();
        assert_eq!(fam.centers, vec![1]);
        assert_eq!(fam.basis.vectors(), &[vec![1.0]]);
        let fam = droplet_subspace(5, 0, Q, 1e-10).unwrap();
        assert_eq!((fam.centers.len(), fam.basis.rank()), (6, 1));
    }

    #[test]
    fn droplet_gram_is_positive_definite() {
        let fam = droplet_subspace(8, 4, Q, 1e-10).unwrap();
        let eig = fam.gram().symmetric_eigenvalues();
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eig.iter().copied().fold(0.0, f64::max);
        assert!(min > 0.0);
        // regression values for the raw vectors at q = 1/4
        assert!((min - GRAM_MIN_8_4).abs() < 1e-9 * GRAM_MIN_8_4, "{min}");
        assert!((max - GRAM_MAX_8_4).abs() < 1e-9 * GRAM_MAX_8_4, "{max}");
    }

    const GRAM_MIN_8_4: f64 = 6.381283866703687e-8;
    const GRAM_MAX_8_4: f64 = 6.859068636353011e-8;

    #[test]
    fn kink_is_a_zero_mode() {
        for delta in [1.25, 2.125, 5.0] {
            for n in 0..=10 {
                assert!(kink_annihilation_check(10, n, delta).unwrap() < 1e-12);
                let k = kink_annihilation_check(10, n, delta).unwrap();
                let a = antikink_annihilation_check(10, n, delta).unwrap();
                assert!((k - a).abs() < 1e-12);
            }
        }
        // the opposite sign convention does not annihilate the kink
        let (s, psi) = kink_state(1, 6, 3, Q).unwrap();
        let op = build_chain_hamiltonian(6, 2.125, Boundary::MP, &s).unwrap();
        let r: f64 = op.apply(&psi).iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(r > 0.1);
    }

    #[test]
    fn full_droplet_sector_report() {
        let r = verify_theorem(7, 7, 2.125, &SolverBudget::default()).unwrap();
        assert_eq!(r.window_halfwidth, 0.0);
        assert_eq!(r.subspace_distance, 0.0);
        assert_eq!(r.gap_value, None);
        assert!(!r.degenerate_cut);
    }
}
