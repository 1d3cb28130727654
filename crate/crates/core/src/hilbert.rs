//! Fixed-magnetization sectors of the spin-1/2 chain.
//!
//! A basis configuration is an `L`-bit pattern where bit `x` set means the
//! spin at site `x + 1` points down, so the number of down spins is the
//! popcount. Sector states are listed in ascending integer order, which for
//! a fixed popcount is colexicographic order of the down-spin positions. That
//! order has a closed-form rank (the combinatorial number system), used here
//! as the configuration -> index map.

use crate::error::{Error, Result};

/// Largest chain length accepted by [`SpinBasisSector::new`].
pub const MAX_SITES: usize = 32;

/// A basis label: which of the `sites` spins are down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfiguration {
    bits: u64,
    sites: usize,
}

impl SpinConfiguration {
    pub fn new(bits: u64, sites: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::TooManySites(sites));
        }
        if bits >> sites != 0 {
            return Err(Error::Domain(format!(
                "bit pattern {bits:#b} has bits beyond site {sites}"
            )));
        }
        Ok(Self { bits, sites })
    }

    pub fn all_up(sites: usize) -> Result<Self> {
        Self::new(0, sites)
    }

    /// Configuration with the given 1-based sites down.
    pub fn with_down(sites: usize, down: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &s in down {
            if s == 0 || s > sites {
                return Err(Error::SiteOutOfRange { site: s, sites });
            }
            bits |= 1 << (s - 1);
        }
        Self::new(bits, sites)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn down_count(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Whether the 1-based `site` is down.
    pub fn is_down(&self, site: usize) -> Result<bool> {
        self.check_site(site)?;
        Ok(self.bits >> (site - 1) & 1 == 1)
    }

    /// Action of S⁻ at the 1-based `site`; `None` when the spin is already down.
    pub fn apply_lowering(&self, site: usize) -> Result<Option<Self>> {
        self.check_site(site)?;
        let mask = 1u64 << (site - 1);
        if self.bits & mask != 0 {
            return Ok(None);
        }
        Ok(Some(Self {
            bits: self.bits | mask,
            sites: self.sites,
        }))
    }

    /// Action of S⁺ at the 1-based `site`; `None` when the spin is already up.
    pub fn apply_raising(&self, site: usize) -> Result<Option<Self>> {
        self.check_site(site)?;
        let mask = 1u64 << (site - 1);
        if self.bits & mask == 0 {
            return Ok(None);
        }
        Ok(Some(Self {
            bits: self.bits & !mask,
            sites: self.sites,
        }))
    }

    /// All spins reversed.
    pub fn flipped(&self) -> Self {
        Self {
            bits: !self.bits & full_mask(self.sites),
            sites: self.sites,
        }
    }

    /// Sites relabeled x -> L + 1 - x.
    pub fn reflected(&self) -> Self {
        Self {
            bits: reflect_bits(self.bits, self.sites),
            sites: self.sites,
        }
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.sites {
            return Err(Error::SiteOutOfRange {
                site,
                sites: self.sites,
            });
        }
        Ok(())
    }
}

pub(crate) fn full_mask(sites: usize) -> u64 {
    if sites >= 64 {
        u64::MAX
    } else {
        (1u64 << sites) - 1
    }
}

pub(crate) fn reflect_bits(bits: u64, sites: usize) -> u64 {
    bits.reverse_bits() >> (64 - sites)
}

/// Pascal triangle up to `MAX_SITES`.
struct Binomials([[u64; MAX_SITES + 1]; MAX_SITES + 1]);

impl Binomials {
    const fn new() -> Self {
        let mut t = [[0u64; MAX_SITES + 1]; MAX_SITES + 1];
        let mut n = 0;
        while n <= MAX_SITES {
            t[n][0] = 1;
            let mut k = 1;
            while k <= n {
                t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
                k += 1;
            }
            n += 1;
        }
        Self(t)
    }

    #[inline]
    fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.0[n][k]
        }
    }
}

static BINOMIALS: Binomials = Binomials::new();

/// binomial(n, k) for n ≤ 32.
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(n <= MAX_SITES, "binomial table covers n <= {MAX_SITES}");
    BINOMIALS.get(n, k)
}

/// The basis of H_{L,n}: all `L`-site configurations with `n` down spins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinBasisSector {
    sites: usize,
    down: usize,
    states: Vec<u64>,
}

impl SpinBasisSector {
    /// Enumerate sector (L, n). `L` is capped at [`MAX_SITES`].
    pub fn new(sites: usize, down: usize) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::TooManySites(sites));
        }
        if down > sites {
            return Err(Error::SectorRange { sites, down });
        }
        let dim = binomial(sites, down) as usize;
        let mut states = Vec::with_capacity(dim);
        if down == 0 {
            states.push(0);
        } else {
            // Gosper's hack: next larger integer with the same popcount.
            let limit = 1u64 << sites;
            let mut v = (1u64 << down) - 1;
            while v < limit {
                states.push(v);
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = (((r ^ v) >> 2) / c) | r;
            }
        }
        debug_assert_eq!(states.len(), dim);
        Ok(Self {
            sites,
            down,
            states,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn down_count(&self) -> usize {
        self.down
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    /// Raw bit patterns in canonical order.
    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> SpinConfiguration {
        SpinConfiguration {
            bits: self.states[index],
            sites: self.sites,
        }
    }

    /// Position of `bits` in the sector, or `None` if it does not belong.
    #[inline]
    pub fn index_of(&self, bits: u64) -> Option<usize> {
        if bits >> self.sites != 0 || bits.count_ones() as usize != self.down {
            return None;
        }
        Some(self.rank(bits))
    }

    /// Colex rank: sum over the k-th lowest set bit p_k of binomial(p_k, k).
    #[inline]
    fn rank(&self, mut bits: u64) -> usize {
        let mut idx = 0u64;
        let mut k = 1;
        while bits != 0 {
            let p = bits.trailing_zeros() as usize;
            idx += BINOMIALS.get(p, k);
            bits &= bits - 1;
            k += 1;
        }
        idx as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = SpinConfiguration> + '_ {
        self.states.iter().map(move |&bits| SpinConfiguration {
            bits,
            sites: self.sites,
        })
    }
}

/// Dimensions of sectors n = 0..=L.
pub fn sector_dimensions(sites: usize) -> Result<Vec<usize>> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::TooManySites(sites));
    }
    Ok((0..=sites).map(|n| binomial(sites, n) as usize).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn factorial(n: u128) -> u128 {
        (1..=n).product()
    }

    #[test]
    fn small_sector_dimensions() {
        assert_eq!(SpinBasisSector::new(4, 2).unwrap().dim(), 6);
        let s = SpinBasisSector::new(12, 0).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.states(), &[0]);
        // independent factorial route
        let expect = factorial(12) / (factorial(6) * factorial(6));
        assert_eq!(expect, 924);
        assert_eq!(SpinBasisSector::new(12, 6).unwrap().dim() as u128, expect);
    }

    #[test]
    fn out_of_range_sector_names_the_pair() {
        let err = SpinBasisSector::new(4, 5).unwrap_err();
        assert_eq!(err, Error::SectorRange { sites: 4, down: 5 });
        assert!(err.to_string().contains("n=5") && err.to_string().contains("L=4"));
        assert_eq!(
            SpinBasisSector::new(33, 1).unwrap_err(),
            Error::TooManySites(33)
        );
    }

    #[test]
    fn pascal_rows() {
        assert_eq!(sector_dimensions(2).unwrap(), vec![1, 2, 1]);
        assert_eq!(sector_dimensions(4).unwrap(), vec![1, 4, 6, 4, 1]);
        assert_eq!(sector_dimensions(12).unwrap().iter().sum::<usize>(), 4096);
        assert_eq!(sector_dimensions(32).unwrap()[16], 601_080_390);
    }

    #[test]
    fn lowering() {
        let up = SpinConfiguration::all_up(3).unwrap();
        let one = up.apply_lowering(2).unwrap().unwrap();
        assert_eq!(one, SpinConfiguration::with_down(3, &[2]).unwrap());
        assert_eq!(one.apply_lowering(2).unwrap(), None);
        assert_eq!(
            up.apply_lowering(4).unwrap_err(),
            Error::SiteOutOfRange { site: 4, sites: 3 }
        );
        assert!(up.apply_lowering(0).is_err());
        assert_eq!(one.apply_raising(2).unwrap(), Some(up));
    }

    #[test]
    fn all_sectors_cover_full_space() {
        for sites in 1..=16 {
            let mut seen = HashSet::new();
            for n in 0..=sites {
                for c in SpinBasisSector::new(sites, n).unwrap().iter() {
                    assert!(seen.insert(c.bits()));
                }
            }
            assert_eq!(seen.len(), 1 << sites);
        }
    }

    #[test]
    fn index_rejects_foreign_states() {
        let s = SpinBasisSector::new(5, 2).unwrap();
        assert_eq!(s.index_of(0b111), None);
        assert_eq!(s.index_of(0b100001 << 1), None);
        assert_eq!(s.index_of(0b11), Some(0));
        assert_eq!(s.index_of(0b11000), Some(9));
    }

    proptest! {
        #[test]
        fn sector_invariants(sites in 1usize..=14, frac in 0.0f64..=1.0) {
            let down = ((sites as f64) * frac).round() as usize;
            let s = SpinBasisSector::new(sites, down).unwrap();
            prop_assert_eq!(s.dim() as u64, binomial(sites, down));
            for (k, &bits) in s.states().iter().enumerate() {
                prop_assert_eq!(bits.count_ones() as usize, down);
                prop_assert_eq!(s.index_of(bits), Some(k));
                if k > 0 {
                    prop_assert!(bits > s.states()[k - 1]);
                }
            }
        }

        #[test]
        fn spin_flip_is_a_bijection(sites in 1usize..=12, down in 0usize..=12) {
            prop_assume!(down <= sites);
            let s = SpinBasisSector::new(sites, down).unwrap();
            let t = SpinBasisSector::new(sites, sites - down).unwrap();
            let mut hit = vec![false; t.dim()];
            for c in s.iter() {
                let j = t.index_of(c.flipped().bits()).unwrap();
                prop_assert!(!hit[j]);
                hit[j] = true;
            }
            prop_assert!(hit.iter().all(|&h| h));
        }
    }
}
