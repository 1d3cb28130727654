//! Spectra of sparse symmetric operators and comparisons between subspaces.
//!
//! [`full_spectrum`] is the dense oracle for small sectors; [`lowest_k`] is a
//! restarted block Lanczos solver with full reorthogonalization for sectors
//! beyond dense reach. Both fix eigenvector phases so that the
//! largest-magnitude component is positive.

mod dense;
mod lanczos;
mod subspace;

pub use dense::{full_spectrum, full_spectrum_with_cap, DEFAULT_DENSE_CAP};
pub use lanczos::{lowest_k, lowest_k_with, LanczosOptions};
pub use subspace::{orthonormalize, projection_distance, SubspaceBasis};

use crate::sparse::{SectorTag, SparseOperator};
use serde::{Deserialize, Serialize};

/// Two eigenvalues closer than this at a requested cut make the cut ambiguous.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::Lanczos => "lanczos",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors aligned with `eigenvalues`, when requested.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub method: Method,
    /// ‖Hv - λv‖ per pair; empty when vectors were not computed.
    pub residual_norms: Vec<f64>,
    pub sector_tag: Option<SectorTag>,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_norms.iter().copied().fold(0.0, f64::max)
    }

    /// True when keeping the first `k` eigenpairs splits a cluster, i.e.
    /// λ(k) and λ(k+1) (1-based) differ by less than [`DEGENERACY_TOL`].
    /// `false` when λ(k+1) is not available.
    pub fn cut_is_degenerate(&self, k: usize) -> bool {
        k >= 1
            && k < self.eigenvalues.len()
            && (self.eigenvalues[k] - self.eigenvalues[k - 1]).abs() < DEGENERACY_TOL
    }

    /// Orthonormal basis of the span of the first `k` eigenvectors.
    pub fn leading_subspace(&self, k: usize) -> Option<SubspaceBasis> {
        let vecs = self.eigenvectors.as_ref()?;
        if k > vecs.len() {
            return None;
        }
        let ambient = vecs.first().map_or(0, Vec::len);
        Some(SubspaceBasis::from_orthonormal(ambient, vecs[..k].to_vec()))
    }
}

/// Serializable summary of one sector solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    #[serde(rename = "L")]
    pub sites: usize,
    pub n: usize,
    pub delta: f64,
    pub method: Method,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl SpectrumRecord {
    pub fn new(result: &SpectralResult, delta: f64) -> Self {
        let tag = result.sector_tag.unwrap_or(SectorTag { sites: 0, down: 0 });
        Self {
            sites: tag.sites,
            n: tag.down,
            delta,
            method: result.method,
            eigenvalues: result.eigenvalues.clone(),
            residuals: result.residual_norms.clone(),
        }
    }
}

pub(crate) fn residual_norm(op: &SparseOperator, v: &[f64], lambda: f64, scratch: &mut [f64]) -> f64 {
    op.matvec(v, scratch);
    scratch
        .iter()
        .zip(v)
        .map(|(hv, x)| (hv - lambda * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Flip sign so the largest-magnitude component is positive (first one on ties).
pub(crate) fn fix_phase(v: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if x.abs() > best {
            best = x.abs();
            sign = x.signum();
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
