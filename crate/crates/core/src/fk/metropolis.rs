//! Metropolis sampling of ion configurations weighted by exp(-β F_el), where
//! F_el is the electron grand potential in the ion background.
//!
//! Proposals move one ion to a vacancy, both chosen uniformly among the
//! unpinned sites, so the ion number never changes. Every proposal
//! recomputes the single-particle spectrum from scratch.

use super::{free_energy_of_levels, single_particle_levels, IonConfiguration};
use crate::error::{domain, Error, Result};
use crate::lattice::LatticeSpec;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Largest lattice the sampler accepts (an 8×8×8 box).
pub const MAX_MC_SITES: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub enum McInit {
    /// Pinned sites fixed, remaining ions placed uniformly at random.
    Random,
    Given(IonConfiguration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct McOptions {
    pub u: f64,
    /// β = 0 accepts every proposal.
    pub beta: f64,
    /// Electron chemical potential; `None` means μ = U.
    pub mu: Option<f64>,
    /// Measured sweeps. A sweep is one proposal per unpinned site.
    pub sweeps: usize,
    /// Discarded sweeps before measuring; `None` means sweeps / 5.
    pub burn_in: Option<usize>,
    pub seed: u64,
    /// Per-site frozen s value; only boundary sites may be pinned.
    pub pinning: Option<Vec<Option<i8>>>,
    pub init: McInit,
    /// Batches for the standard error of ⟨s_x⟩.
    pub batches: usize,
}

impl McOptions {
    pub fn new(u: f64, beta: f64, sweeps: usize, seed: u64) -> Self {
        Self {
            u,
            beta,
            mu: None,
            sweeps,
            burn_in: None,
            seed,
            pinning: None,
            init: McInit::Random,
            batches: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McStats {
    /// Time-averaged s_x per site.
    pub mean_s: Vec<f64>,
    /// Batch-means standard error of `mean_s`.
    pub stderr: Vec<f64>,
    pub acceptance: f64,
    pub proposals: u64,
    pub sweeps: usize,
    pub burn_in: usize,
    pub mu: f64,
    pub pinned: Vec<bool>,
    pub final_occupancy: String,
}

/// Pin every boundary site off the plane x₁+x₂+x₃ = `plane` to the sign of
/// (x₁+x₂+x₃ - plane). Sites on the plane stay free.
pub fn pin_111(lattice: &LatticeSpec, plane: i32) -> Vec<Option<i8>> {
    (0..lattice.site_count())
        .map(|x| {
            let sum: i32 = lattice.coord(x).iter().sum();
            if !lattice.is_boundary(x) || sum == plane {
                None
            } else if sum > plane {
                Some(1)
            } else {
                Some(-1)
            }
        })
        .collect()
}

pub fn metropolis_ions(lattice: &LatticeSpec, opts: &McOptions) -> Result<McStats> {
    let n = lattice.site_count();
    if n > MAX_MC_SITES {
        return domain(format!("{n} sites exceeds the sampler cap of {MAX_MC_SITES}"));
    }
    if opts.sweeps == 0 {
        return domain("at least one sweep is required");
    }
    if !(opts.beta >= 0.0) {
        return domain(format!("beta must be non-negative, got {}", opts.beta));
    }
    let pins = match &opts.pinning {
        Some(p) => {
            if p.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.len() });
            }
            for (x, v) in p.iter().enumerate() {
                match v {
                    None => {}
                    Some(1) | Some(-1) if lattice.is_boundary(x) => {}
                    Some(1) | Some(-1) => {
                        return domain(format!("site {x} at {:?} is not on the boundary", lattice.coord(x)))
                    }
                    Some(s) => return domain(format!("pinned value {s} is not ±1")),
                }
            }
            p.clone()
        }
        None => vec![None; n],
    };
    let pinned_w = |x: usize| pins[x].map(|s| ((lattice.parity(x) * s as i32 + 1) / 2) as u8);
    let free: Vec<usize> = (0..n).filter(|&x| pins[x].is_none()).collect();
    let target = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut occ: Vec<u8> = match &opts.init {
        McInit::Given(cfg) => {
            if cfg.site_count() != n || cfg.ion_count() != target {
                return domain(format!("initial configuration must hold {target} ions on {n} sites"));
            }
            if (0..n).any(|x| pinned_w(x).is_some_and(|w| w != cfg.occupancy()[x])) {
                return domain("initial configuration disagrees with the pinning");
            }
            cfg.occupancy().to_vec()
        }
        McInit::Random => {
            let mut occ: Vec<u8> = (0..n).map(|x| pinned_w(x).unwrap_or(0)).collect();
            let placed: usize = occ.iter().map(|&w| w as usize).sum();
            if placed > target || target - placed > free.len() {
                return domain(format!(
                    "pinning fixes {placed} ions; cannot reach {target} with {} free sites",
                    free.len()
                ));
            }
            let chosen = rand::seq::index::sample(&mut rng, free.len(), target - placed);
            let mut chosen: Vec<usize> = chosen.into_iter().collect();
            chosen.sort_unstable();
            for i in chosen {
                occ[free[i]] = 1;
            }
            occ
        }
    };

    let mu = opts.mu.unwrap_or(opts.u);
    let accept_all = opts.beta == 0.0;
    let energy = |occ: &[u8]| -> Result<f64> {
        let cfg = IonConfiguration::new(lattice, occ.to_vec())?;
        free_energy_of_levels(&single_particle_levels(lattice, &cfg, opts.u)?, opts.beta, mu)
    };
    let mut current = if accept_all { 0.0 } else { energy(&occ)? };

    let burn_in = opts.burn_in.unwrap_or(opts.sweeps / 5);
    let batches = opts.batches.clamp(2, opts.sweeps.max(2));
    let per_batch = (opts.sweeps / batches).max(1);
    let used_batches = (opts.sweeps / per_batch).min(batches);
    let mut batch_sum = vec![0.0; n];
    let mut batch_means: Vec<Vec<f64>> = Vec::with_capacity(used_batches);
    let mut total = vec![0.0; n];
    let mut proposals = 0u64;
    let mut accepted = 0u64;
    let mut measured = 0usize;
    let parity: Vec<f64> = (0..n).map(|x| lattice.parity(x) as f64).collect();

    for sweep in 0..burn_in + opts.sweeps {
        for _ in 0..free.len() {
            let ions: Vec<usize> = free.iter().copied().filter(|&x| occ[x] == 1).collect();
            let holes: Vec<usize> = free.iter().copied().filter(|&x| occ[x] == 0).collect();
            let (Some(&from), Some(&to)) = (ions.choose(&mut rng), holes.choose(&mut rng)) else {
                break;
            };
            proposals += 1;
            occ.swap(from, to);
            let accept = if accept_all {
                true
            } else {
                let trial = energy(&occ)?;
                let d = trial - current;
                let ok = d <= 0.0 || rng.random::<f64>() < (-opts.beta * d).exp();
                if ok {
                    current = trial;
                }
                ok
            };
            if accept {
                accepted += 1;
            } else {
                occ.swap(from, to);
            }
        }
        if sweep >= burn_in && measured < used_batches * per_batch {
            for x in 0..n {
                let s = parity[x] * (2.0 * occ[x] as f64 - 1.0);
                batch_sum[x] += s;
                total[x] += s;
            }
            measured += 1;
            if measured.is_multiple_of(per_batch) {
                batch_means.push(batch_sum.iter().map(|v| v / per_batch as f64).collect());
                batch_sum.iter_mut().for_each(|v| *v = 0.0);
            }
        }
    }

    let mean_s: Vec<f64> = total.iter().map(|t| t / measured as f64).collect();
    let b = batch_means.len() as f64;
    let stderr = (0..n)
        .map(|x| {
            let var = batch_means.iter().map(|m| (m[x] - mean_s[x]).powi(2)).sum::<f64>() / (b - 1.0);
            (var / b).sqrt()
        })
        .collect();
    Ok(McStats {
        mean_s,
        stderr,
        acceptance: if proposals == 0 { 0.0 } else { accepted as f64 / proposals as f64 },
        proposals,
        sweeps: opts.sweeps,
        burn_in,
        mu,
        pinned: pins.iter().map(Option::is_some).collect(),
        final_occupancy: occ.iter().map(|&w| if w == 1 { '1' } else { '0' }).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_temperature_is_unbiased() {
        let l = LatticeSpec::hypercubic(&[4, 4], &[true, true]).unwrap();
        let opts = McOptions::new(8.0, 0.0, 100_000, 11);
        let st = metropolis_ions(&l, &opts).unwrap();
        assert_eq!(st.acceptance, 1.0);
        for x in 0..16 {
            assert!(st.mean_s[x].abs() <= 5.0 * st.stderr[x], "site {x}: {} ± {}", st.mean_s[x], st.stderr[x]);
            assert!(st.stderr[x] > 0.0);
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let l = LatticeSpec::hypercubic(&[4, 4], &[true, true]).unwrap();
        let opts = McOptions::new(8.0, 5.0, 30, 3);
        let a = metropolis_ions(&l, &opts).unwrap();
        let b = metropolis_ions(&l, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_s.iter().zip(&b.mean_s).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = metropolis_ions(&l, &McOptions::new(8.0, 5.0, 30, 4)).unwrap();
        assert_ne!(a.final_occupancy, c.final_occupancy);
    }

    #[test]
    fn interior_pinning_rejected() {
        let l = LatticeSpec::hypercubic(&[4, 4], &[false, false]).unwrap();
        let mut pins = vec![None; 16];
        pins[5] = Some(1);
        let mut opts = McOptions::new(8.0, 1.0, 5, 0);
        opts.pinning = Some(pins);
        assert!(metropolis_ions(&l, &opts).is_err());
    }

    #[test]
    fn pinned_sites_never_move() {
        let l = LatticeSpec::hypercubic(&[4, 4, 4], &[false, false, false]).unwrap();
        let mut opts = McOptions::new(8.0, 0.0, 200, 1);
        let pins = pin_111(&l, 4);
        opts.pinning = Some(pins.clone());
        let st = metropolis_ions(&l, &opts).unwrap();
        for (x, p) in pins.iter().enumerate() {
            if let Some(s) = p {
                assert_eq!(st.mean_s[x], *s as f64);
                assert_eq!(st.stderr[x], 0.0);
            }
        }
        let ions = st.final_occupancy.chars().filter(|&c| c == '1').count();
        assert_eq!(ions, 32);
    }
}
