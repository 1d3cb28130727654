//! Falicov–Kimball model: spinless electrons hopping with amplitude -1 on a
//! lattice, coupled by 2U on each site to classical ions W(x) ∈ {0, 1}.
//!
//! For a fixed ion configuration the electrons are free, so everything here
//! follows from the single-particle levels of the one-body matrix
//! `h = -A + 2U·diag(W)` with `A` the adjacency matrix.

mod metropolis;

pub use metropolis::{metropolis_ions, pin_111, McInit, McOptions, McStats, MAX_MC_SITES};

use crate::error::{domain, Error, Result};
use crate::lattice::LatticeSpec;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Largest lattice accepted by [`one_body_matrix`].
pub const MAX_FK_SITES: usize = 4096;
/// Largest lattice for exhaustive checkerboard enumeration.
pub const MAX_CHECKERBOARD_SITES: usize = 20;

/// Ion occupancy W on a lattice. The staggered Ising field
/// s_x = (-1)^{|x|}(2W(x) - 1) is always derived from W.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IonConfiguration {
    occupancy: Vec<u8>,
    ions: usize,
}

impl IonConfiguration {
    pub fn new(lattice: &LatticeSpec, occupancy: Vec<u8>) -> Result<Self> {
        if occupancy.len() != lattice.site_count() {
            return Err(Error::DimensionMismatch {
                expected: lattice.site_count(),
                found: occupancy.len(),
            });
        }
        if occupancy.iter().any(|&w| w > 1) {
            return domain("ion occupancy must be 0 or 1");
        }
        let ions = occupancy.iter().map(|&w| w as usize).sum();
        Ok(Self { occupancy, ions })
    }

    /// Parse a 0/1 string in site order.
    pub fn parse(lattice: &LatticeSpec, text: &str) -> Result<Self> {
        let occ = text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Domain(format!("bad occupancy character '{c}'"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(lattice, occ)
    }

    /// Ions on the sublattice of coordinate parity `parity` (+1 even, -1 odd).
    pub fn checkerboard(lattice: &LatticeSpec, parity: i32) -> Self {
        let occ = (0..lattice.site_count())
            .map(|x| (lattice.parity(x) == parity) as u8)
            .collect();
        Self::new(lattice, occ).expect("sized from the lattice")
    }

    /// Configuration whose staggered field equals `spins`.
    pub fn from_spins(lattice: &LatticeSpec, spins: &[i8]) -> Result<Self> {
        if spins.len() != lattice.site_count() {
            return Err(Error::DimensionMismatch {
                expected: lattice.site_count(),
                found: spins.len(),
            });
        }
        let occ = spins
            .iter()
            .enumerate()
            .map(|(x, &s)| match s {
                1 | -1 => Ok(((lattice.parity(x) * s as i32 + 1) / 2) as u8),
                _ => Err(Error::Domain(format!("spin value {s} is not ±1"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(lattice, occ)
    }

    pub fn occupancy(&self) -> &[u8] {
        &self.occupancy
    }

    pub fn ion_count(&self) -> usize {
        self.ions
    }

    pub fn site_count(&self) -> usize {
        self.occupancy.len()
    }

    /// s_x = (-1)^{|x|}(2W(x) - 1).
    pub fn spin(&self, lattice: &LatticeSpec, x: usize) -> i8 {
        (lattice.parity(x) * (2 * self.occupancy[x] as i32 - 1)) as i8
    }

    pub fn spins(&self, lattice: &LatticeSpec) -> Vec<i8> {
        (0..self.occupancy.len()).map(|x| self.spin(lattice, x)).collect()
    }

    /// W ↦ 1 - W.
    pub fn complement(&self) -> Self {
        let occupancy: Vec<u8> = self.occupancy.iter().map(|&w| 1 - w).collect();
        let ions = occupancy.len() - self.ions;
        Self { occupancy, ions }
    }

    /// Move the ion at `from` to the empty site `to`.
    pub fn swapped(&self, from: usize, to: usize) -> Result<Self> {
        if self.occupancy.get(from) != Some(&1) || self.occupancy.get(to) != Some(&0) {
            return domain(format!("no ion at {from} or site {to} is occupied"));
        }
        let mut occ = self.occupancy.clone();
        occ.swap(from, to);
        Ok(Self {
            occupancy: occ,
            ions: self.ions,
        })
    }

    pub fn as_string(&self) -> String {
        self.occupancy.iter().map(|&w| if w == 1 { '1' } else { '0' }).collect()
    }
}

/// h[x][y] = -1 on each edge, h[x][x] = 2U·W(x).
pub fn one_body_matrix(lattice: &LatticeSpec, config: &IonConfiguration, u: f64) -> Result<DMatrix<f64>> {
    let n = lattice.site_count();
    if n > MAX_FK_SITES {
        return domain(format!("{n} sites exceeds the one-body cap of {MAX_FK_SITES}"));
    }
    if config.site_count() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: config.site_count(),
        });
    }
    let mut h = DMatrix::zeros(n, n);
    for &(a, b) in lattice.edges() {
        h[(a, b)] = -1.0;
        h[(b, a)] = -1.0;
    }
    for (x, &w) in config.occupancy().iter().enumerate() {
        h[(x, x)] = 2.0 * u * w as f64;
    }
    Ok(h)
}

/// Ascending single-particle levels.
pub fn single_particle_levels(lattice: &LatticeSpec, config: &IonConfiguration, u: f64) -> Result<Vec<f64>> {
    let h = one_body_matrix(lattice, config, u)?;
    let mut levels: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeFermionResult {
    pub levels: Vec<f64>,
    pub u: f64,
}

impl FreeFermionResult {
    pub fn new(lattice: &LatticeSpec, config: &IonConfiguration, u: f64) -> Result<Self> {
        Ok(Self {
            levels: single_particle_levels(lattice, config, u)?,
            u,
        })
    }

    /// Sum of the `electrons` lowest levels.
    pub fn ground_energy_at(&self, electrons: usize) -> Result<f64> {
        if electrons > self.levels.len() {
            return domain(format!(
                "electron count {electrons} exceeds the {} available levels",
                self.levels.len()
            ));
        }
        Ok(self.levels[..electrons].iter().sum())
    }

    /// Grand potential -(1/β) Σ ln(1 + e^{-β(ε - μ)}), evaluated as
    /// Σ [min(0, ε - μ) - ln(1 + e^{-β|ε - μ|})/β] so that large β cannot overflow.
    pub fn free_energy(&self, beta: f64, mu: f64) -> Result<f64> {
        free_energy_of_levels(&self.levels, beta, mu)
    }
}

pub(crate) fn free_energy_of_levels(levels: &[f64], beta: f64, mu: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    Ok(levels
        .iter()
        .map(|&e| {
            let x = e - mu;
            x.min(0.0) - (-beta * x.abs()).exp().ln_1p() / beta
        })
        .sum())
}

/// Many-body ground energy of `electrons` free fermions in the ion background.
pub fn electron_ground_energy(
    lattice: &LatticeSpec,
    config: &IonConfiguration,
    u: f64,
    electrons: usize,
) -> Result<f64> {
    if electrons > lattice.site_count() {
        return domain(format!(
            "electron count {electrons} exceeds the {} sites",
            lattice.site_count()
        ));
    }
    FreeFermionResult::new(lattice, config, u)?.ground_energy_at(electrons)
}

/// Electron grand potential at inverse temperature `beta`, chemical potential `mu`.
pub fn electron_free_energy(
    lattice: &LatticeSpec,
    config: &IonConfiguration,
    u: f64,
    beta: f64,
    mu: f64,
) -> Result<f64> {
    FreeFermionResult::new(lattice, config, u)?.free_energy(beta, mu)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckerboardReport {
    pub sites: usize,
    pub u: f64,
    pub configurations: usize,
    pub min_energy: f64,
    /// Every configuration within `tie_tol` of the minimum, as 0/1 strings.
    pub argmin: Vec<String>,
    pub argmin_energies: Vec<f64>,
    pub checkerboards: [String; 2],
    pub checkerboard_energies: [f64; 2],
    /// Lowest energy outside the two checkerboards.
    pub runner_up: Option<f64>,
    /// True when the argmin set is exactly the two checkerboards.
    pub selected: bool,
    pub tie_tol: f64,
}

/// Enumerate every neutral ion configuration (N/2 ions) of a bipartite
/// lattice with N ≤ 20 sites and minimize the half-filled electron ground
/// energy.
pub fn checkerboard_check(lattice: &LatticeSpec, u: f64) -> Result<CheckerboardReport> {
    checkerboard_check_with(lattice, u, 1e-9)
}

pub fn checkerboard_check_with(lattice: &LatticeSpec, u: f64, tie_tol: f64) -> Result<CheckerboardReport> {
    let n = lattice.site_count();
    if !lattice.is_bipartite() {
        return domain("checkerboard selection needs a bipartite lattice");
    }
    if !n.is_multiple_of(2) || n > MAX_CHECKERBOARD_SITES {
        return domain(format!(
            "exhaustive scan needs an even site count ≤ {MAX_CHECKERBOARD_SITES}, got {n}"
        ));
    }
    if !(u > 0.0) {
        return domain(format!("U must be positive, got {u}"));
    }
    let half = n / 2;
    let sector = crate::hilbert::SpinBasisSector::new(n, half)?;
    let mut energies = Vec::with_capacity(sector.dim());
    for &bits in sector.states() {
        let occ = (0..n).map(|x| (bits >> x & 1) as u8).collect();
        let cfg = IonConfiguration::new(lattice, occ)?;
        energies.push(electron_ground_energy(lattice, &cfg, u, half)?);
    }
    let min_energy = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let boards = [
        IonConfiguration::checkerboard(lattice, 1),
        IonConfiguration::checkerboard(lattice, -1),
    ];
    let board_idx: Vec<usize> = boards
        .iter()
        .map(|b| {
            let bits = b
                .occupancy()
                .iter()
                .enumerate()
                .fold(0u64, |acc, (x, &w)| acc | (w as u64) << x);
            sector.index_of(bits).expect("checkerboard is neutral on a balanced bipartite lattice")
        })
        .collect();
    let mut argmin = Vec::new();
    let mut argmin_energies = Vec::new();
    let mut runner_up: Option<f64> = None;
    for (i, &e) in energies.iter().enumerate() {
        if e - min_energy <= tie_tol {
            let bits = sector.states()[i];
            argmin.push((0..n).map(|x| if bits >> x & 1 == 1 { '1' } else { '0' }).collect());
            argmin_energies.push(e);
        }
        if !board_idx.contains(&i) {
            runner_up = Some(runner_up.map_or(e, |r| r.min(e)));
        }
    }
    let board_strings = [boards[0].as_string(), boards[1].as_string()];
    let selected = argmin.len() == 2 && board_strings.iter().all(|b| argmin.contains(b));
    Ok(CheckerboardReport {
        sites: n,
        u,
        configurations: energies.len(),
        min_energy,
        argmin,
        argmin_energies,
        checkerboard_energies: [energies[board_idx[0]], energies[board_idx[1]]],
        checkerboards: board_strings,
        runner_up,
        selected,
        tie_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingEstimate {
    pub u: f64,
    /// Ground-energy cost of the ion hop relative to the checkerboard.
    pub delta_e: f64,
    /// Bonds joining the hopped pair to the rest of the lattice.
    pub pair_coordination: usize,
    /// ΔE / (2 · pair_coordination).
    pub j_est: f64,
    /// 4U · J_est; tends to 1 at large U.
    pub scaled: f64,
    pub warning: Option<String>,
}

/// Leading effective Ising coupling from a single ion hop.
///
/// Protocol: start from the checkerboard with ions on the even sublattice
/// and move the ion at site 0 to its neighbour along the first axis. In the
/// staggered variables this flips s on both sites of the pair; in the
/// effective model -J Σ s_x s_y it breaks every bond between the pair and
/// the rest of the lattice, costing 2J per bond. Hence J_est = ΔE / (2 z_pair).
pub fn effective_coupling_estimate(lattice: &LatticeSpec, u: f64) -> Result<CouplingEstimate> {
    if !lattice.is_bipartite() {
        return domain("effective coupling needs a bipartite lattice");
    }
    if !(u >= 2.0) {
        return domain(format!("estimator is defined for U >= 2, got {u}"));
    }
    let n = lattice.site_count();
    let adj = lattice.neighbors();
    let from = 0usize;
    let to = *adj[from]
        .first()
        .ok_or_else(|| Error::Domain("site 0 has no neighbours".into()))?;
    let base = IonConfiguration::checkerboard(lattice, lattice.parity(from));
    if 2 * base.ion_count() != n {
        return domain("lattice sublattices are unbalanced; no neutral checkerboard");
    }
    let moved = base.swapped(from, to)?;
    let half = n / 2;
    let e0 = electron_ground_energy(lattice, &base, u, half)?;
    let e1 = electron_ground_energy(lattice, &moved, u, half)?;
    let delta_e = e1 - e0;
    let pair_coordination = adj[from].len() + adj[to].len() - 2;
    let j_est = delta_e / (2.0 * pair_coordination as f64);
    let warning = match lattice.shape() {
        Some(s) if (0..lattice.dim()).any(|a| s.extents[a] < 4) => Some(format!(
            "lattice extents {:?} are below 4 per axis; the hop is not bulk-like",
            &s.extents[..lattice.dim()]
        )),
        None => Some("lattice has no box shape; bulk-likeness of the hop is unchecked".into()),
        _ => None,
    };
    Ok(CouplingEstimate {
        u,
        delta_e,
        pair_coordination,
        j_est,
        scaled: 4.0 * u * j_est,
        warning,
    })
}
