//! XXZ interfaces on two-dimensional strips.
//!
//! The strip has `width` sites along axis 0 and `height` along axis 1. Every
//! edge, oriented along its positive axis direction x → x + e, carries the
//! kink bond field `-A(Δ)(S³_x - S³_{x+e})`. Summed over edges the fields
//! cancel in the bulk and leave `-A(Δ)·(out - in)` on each boundary site:
//! `-A` on the lower and left sides, `+A` on the upper and right sides,
//! doubled at the two corners on the diagonal and cancelling at the other
//! two. Up spins are favoured below the 11 diagonal and down spins above it.
//! At width 1 this is the open chain with `+-` boundary fields.

use crate::droplet::SolverBudget;
use crate::eigensolve::{full_spectrum_with_cap, lowest_k_with, LanczosOptions, Method};
use crate::error::{domain, Result};
use crate::hilbert::SpinBasisSector;
use crate::lattice::LatticeSpec;
use crate::xxz::{boundary_field_amplitude, build_lattice_hamiltonian};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Largest strip, in sites, accepted by [`build_scenario`].
pub const MAX_STRIP_SITES: usize = 24;

/// Fraction of down spins, `num/den`, in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filling {
    pub num: u32,
    pub den: u32,
}

impl Filling {
    pub const HALF: Filling = Filling { num: 1, den: 2 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num > den {
            return domain(format!("filling {num}/{den} is not in [0, 1]"));
        }
        Ok(Self { num, den })
    }

    /// round(filling · sites), halves rounded up.
    pub fn down_count(&self, sites: usize) -> usize {
        let (num, den) = (self.num as usize, self.den as usize);
        (2 * num * sites + den) / (2 * den)
    }
}

impl fmt::Display for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Filling {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || crate::Error::Domain(format!("cannot parse filling '{s}', expected p/q"));
        let (a, b) = s.split_once('/').ok_or_else(bad)?;
        let num = a.trim().parse().map_err(|_| bad())?;
        let den = b.trim().parse().map_err(|_| bad())?;
        Self::new(num, den)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceScenario {
    /// Strip with its boundary fields attached.
    pub lattice: LatticeSpec,
    pub delta: f64,
    pub sector_n: usize,
    pub width: usize,
    pub height: usize,
    pub periodic_transverse: bool,
}

impl InterfaceScenario {
    /// Same strip with every field reversed and the sector mirrored to
    /// `sites - n`.
    pub fn flipped(&self) -> Self {
        let fields = self.lattice.fields().iter().map(|f| -f).collect();
        let lattice = self
            .lattice
            .clone()
            .with_fields(fields)
            .expect("field count unchanged");
        Self {
            lattice,
            sector_n: self.lattice.site_count() - self.sector_n,
            ..self.clone()
        }
    }
}

/// Open strip with diagonal-interface fields.
pub fn build_scenario(width: usize, height: usize, delta: f64, filling: Filling) -> Result<InterfaceScenario> {
    build_scenario_with(width, height, delta, filling, false)
}

/// As [`build_scenario`]; `periodic_transverse` closes the width axis into a
/// ring (when width ≥ 3), which removes its fields and leaves a flat interface.
pub fn build_scenario_with(
    width: usize,
    height: usize,
    delta: f64,
    filling: Filling,
    periodic_transverse: bool,
) -> Result<InterfaceScenario> {
    if width == 0 || height == 0 {
        return domain(format!("strip {width}x{height} is empty"));
    }
    let sites = width * height;
    if sites > MAX_STRIP_SITES {
        return domain(format!(
            "strip {width}x{height} has {sites} sites, above the cap of {MAX_STRIP_SITES}"
        ));
    }
    let a = boundary_field_amplitude(delta)?;
    let lattice = LatticeSpec::hypercubic(&[width, height], &[periodic_transverse, false])?;
    let extents = [width as i32, height as i32];
    let mut fields = vec![0.0; sites];
    for &(i, j) in lattice.edges() {
        let (ci, cj) = (lattice.coord(i), lattice.coord(j));
        let axis = if ci[0] != cj[0] { 0 } else { 1 };
        // positive direction, including the wrap from the last site back to 0
        let forward = cj[axis] - ci[axis] == 1 || ci[axis] - cj[axis] == extents[axis] - 1;
        let (from, to) = if forward { (i, j) } else { (j, i) };
        fields[from] -= a;
        fields[to] += a;
    }
    let lattice = lattice.with_fields(fields)?;
    Ok(InterfaceScenario {
        lattice,
        delta,
        sector_n: filling.down_count(sites),
        width,
        height,
        periodic_transverse,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceGap {
    pub lambda1: f64,
    pub lambda2: f64,
    pub gap: f64,
    pub method: Method,
    pub residual: f64,
}

/// Two lowest eigenvalues of the scenario Hamiltonian in its sector.
pub fn interface_gap(scenario: &InterfaceScenario, budget: &SolverBudget) -> Result<InterfaceGap> {
    let sector = SpinBasisSector::new(scenario.lattice.site_count(), scenario.sector_n)?;
    if sector.dim() < 2 {
        return domain(format!(
            "sector n={} of {} sites has a single state and no gap",
            scenario.sector_n,
            scenario.lattice.site_count()
        ));
    }
    let op = build_lattice_hamiltonian(&scenario.lattice, scenario.delta, &sector)?;
    let spec = if op.dim() <= budget.dense_cap {
        full_spectrum_with_cap(&op, true, budget.dense_cap)?
    } else {
        lowest_k_with(&op, 2, LanczosOptions::new(budget.tol, budget.max_iter, budget.seed))?
    };
    let (lambda1, lambda2) = (spec.eigenvalues[0], spec.eigenvalues[1]);
    let residual = spec.residual_norms[..2].iter().copied().fold(0.0, f64::max);
    Ok(InterfaceGap {
        lambda1,
        lambda2,
        gap: lambda2 - lambda1,
        method: spec.method,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub delta: f64,
    pub width: usize,
    pub height: usize,
    /// Sector, or `None` when the scenario could not be built.
    pub n: Option<usize>,
    pub outcome: std::result::Result<InterfaceGap, String>,
}

/// One row per (delta, width), deltas outermost. Failures are recorded in
/// the row and the scan continues.
pub fn gap_scan(
    deltas: &[f64],
    widths: &[usize],
    height: usize,
    filling: Filling,
    budget: &SolverBudget,
) -> Vec<GapRow> {
    gap_scan_with(deltas, widths, height, filling, false, budget)
}

/// [`gap_scan`] with the choice of a periodic width axis.
pub fn gap_scan_with(
    deltas: &[f64],
    widths: &[usize],
    height: usize,
    filling: Filling,
    periodic_transverse: bool,
    budget: &SolverBudget,
) -> Vec<GapRow> {
    let mut rows = Vec::with_capacity(deltas.len() * widths.len());
    for &delta in deltas {
        for &width in widths {
            let (n, outcome) = match build_scenario_with(width, height, delta, filling, periodic_transverse) {
                Ok(s) => (
                    Some(s.sector_n),
                    interface_gap(&s, budget).map_err(|e| e.to_string()),
                ),
                Err(e) => (None, Err(e.to_string())),
            };
            rows.push(GapRow {
                delta,
                width,
                height,
                n,
                outcome,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xxz::{build_chain_hamiltonian, Boundary};

    const D: f64 = 2.125;

    #[test]
    fn sizes_and_sectors() {
        let s = build_scenario(2, 2, D, Filling::HALF).unwrap();
        assert_eq!((s.lattice.site_count(), s.sector_n), (4, 2));
        let s = build_scenario(3, 4, D, Filling::HALF).unwrap();
        assert_eq!((s.lattice.site_count(), s.sector_n), (12, 6));
        assert!(build_scenario(5, 5, D, Filling::HALF).is_err());
        assert!(build_scenario(2, 2, 1.0, Filling::HALF).is_err());
        assert_eq!(Filling::new(1, 3).unwrap().down_count(4), 1);
        assert_eq!(Filling::new(1, 4).unwrap().down_count(6), 2);
        assert!("3/2".parse::<Filling>().is_err());
        assert_eq!("1/2".parse::<Filling>().unwrap(), Filling::HALF);
    }

    #[test]
    fn fields_sit_on_the_boundary() {
        let a = boundary_field_amplitude(D).unwrap();
        let s = build_scenario(3, 4, D, Filling::HALF).unwrap();
        let l = &s.lattice;
        for x in 0..l.site_count() {
            if l.field(x) != 0.0 {
                assert!(l.is_boundary(x));
            }
        }
        let at = |i, j| l.field(l.site_at([i, j, 0]).unwrap());
        assert!((at(0, 0) + 2.0 * a).abs() < 1e-15);
        assert!((at(2, 3) - 2.0 * a).abs() < 1e-15);
        assert_eq!(at(2, 0), 0.0);
        assert_eq!(at(0, 3), 0.0);
        assert!((at(1, 0) + a).abs() < 1e-15);
        assert!((at(0, 1) + a).abs() < 1e-15);
        assert!((at(2, 1) - a).abs() < 1e-15);
        assert_eq!(at(1, 1), 0.0);
        assert!(l.fields().iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn width_one_is_the_mixed_chain() {
        for h in 2..=8 {
            let s = build_scenario(1, h, D, Filling::HALF).unwrap();
            let sector = SpinBasisSector::new(h, s.sector_n).unwrap();
            let strip = build_lattice_hamiltonian(&s.lattice, D, &sector).unwrap();
            let chain = build_chain_hamiltonian(h, D, Boundary::PM, &sector).unwrap();
            assert_eq!(strip.nnz(), chain.nnz());
            for ((r1, c1, v1), (r2, c2, v2)) in strip.triplets().zip(chain.triplets()) {
                assert_eq!((r1, c1), (r2, c2));
                assert!((v1 - v2).abs() < 1e-15);
            }
            let g = interface_gap(&s, &SolverBudget::default()).unwrap();
            assert!(g.lambda1.abs() < 1e-12, "kink ground energy {}", g.lambda1);
        }
    }

    #[test]
    fn spin_flip_with_field_reversal() {
        let budget = SolverBudget::default();
        for (w, h, f) in [(2, 3, Filling::new(1, 3).unwrap()), (3, 3, Filling::HALF), (2, 4, Filling::new(1, 4).unwrap())] {
            let s = build_scenario(w, h, D, f).unwrap();
            let a = interface_gap(&s, &budget).unwrap();
            let b = interface_gap(&s.flipped(), &budget).unwrap();
            assert!((a.lambda1 - b.lambda1).abs() < 1e-10);
            assert!((a.lambda2 - b.lambda2).abs() < 1e-10);
        }
    }

    #[test]
    fn gap_shrinks_with_width() {
        let budget = SolverBudget::default();
        let gaps: Vec<f64> = (1..=3)
            .map(|w| interface_gap(&build_scenario(w, 4, D, Filling::HALF).unwrap(), &budget).unwrap().gap)
            .collect();
        assert!(gaps[2] < gaps[1] && gaps[1] < gaps[0], "{gaps:?}");
    }

    #[test]
    fn scans() {
        let budget = SolverBudget::default();
        assert!(gap_scan(&[D], &[], 4, Filling::HALF, &budget).is_empty());
        let single = gap_scan(&[D], &[2], 4, Filling::HALF, &budget);
        let direct = interface_gap(&build_scenario(2, 4, D, Filling::HALF).unwrap(), &budget).unwrap();
        assert_eq!(single[0].outcome.as_ref().unwrap(), &direct);
        let rows = gap_scan(&[1.5, D], &[1, 2, 3, 7], 4, Filling::HALF, &budget);
        assert_eq!(rows.len(), 8);
        assert!(rows[3].outcome.is_err() && rows[3].n.is_none());
        assert!(rows.iter().filter(|r| r.width != 7).all(|r| r.outcome.as_ref().unwrap().gap.is_finite()));
        assert_eq!(rows[4].delta, D);
    }
}
