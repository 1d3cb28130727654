use super::{axpy, dot, norm};
use crate::error::{domain, Error, Result};
use nalgebra::DMatrix;

/// Orthonormal vectors spanning a subspace of an `ambient`-dimensional space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    ambient: usize,
    vectors: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    /// Wrap vectors that are already orthonormal.
    pub(crate) fn from_orthonormal(ambient: usize, vectors: Vec<Vec<f64>>) -> Self {
        Self { ambient, vectors }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// max |G - I| over the Gram matrix G.
    pub fn orthonormality_error(&self) -> f64 {
        let mut err = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                err = err.max((dot(a, b) - target).abs());
            }
        }
        err
    }

    /// Coordinates of `v` in this basis.
    pub fn coefficients(&self, v: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|b| dot(b, v)).collect()
    }

    /// Component of `v` orthogonal to the subspace.
    pub fn reject(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for b in &self.vectors {
                let c = dot(b, &r);
                axpy(-c, b, &mut r);
            }
        }
        r
    }
}

/// Orthonormal basis of span(`vectors`) by twice-iterated modified
/// Gram–Schmidt. A vector is dropped when its component orthogonal to the
/// previously accepted ones is below `rank_tol` relative to its own norm;
/// the detected rank is the basis size.
pub fn orthonormalize(vectors: &[Vec<f64>], rank_tol: f64) -> Result<SubspaceBasis> {
    let ambient = match vectors.first() {
        Some(v) => v.len(),
        None => return domain("cannot orthonormalize an empty list"),
    };
    if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
        return Err(Error::DimensionMismatch {
            expected: ambient,
            found: v.len(),
        });
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w: Vec<f64> = v.iter().map(|x| x / n0).collect();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
        }
        let n1 = norm(&w);
        if n1 > rank_tol {
            w.iter_mut().for_each(|x| *x /= n1);
            basis.push(w);
        }
    }
    if basis.is_empty() {
        return domain("all input vectors are zero");
    }
    Ok(SubspaceBasis::from_orthonormal(ambient, basis))
}

/// Operator norm ‖P_a - P_b‖ of the difference of the orthogonal projections.
///
/// For equal ranks this is the sine of the largest principal angle, taken as
/// the largest singular value of (I - P_a) B with B the basis of `b`; that
/// form keeps full relative accuracy for small angles. Unequal ranks give 1.
pub fn projection_distance(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<f64> {
    if a.ambient != b.ambient {
        return Err(Error::DimensionMismatch {
            expected: a.ambient,
            found: b.ambient,
        });
    }
    if a.rank() != b.rank() {
        return Ok(1.0);
    }
    let r = b.rank();
    if r == 0 {
        return Ok(0.0);
    }
    // one Gram-Schmidt pass against a is enough here: rounding only adds ~ε
    let rejected: Vec<Vec<f64>> = b
        .vectors
        .iter()
        .map(|v| {
            let mut w = v.clone();
            for u in &a.vectors {
                let c = dot(u, &w);
                axpy(-c, u, &mut w);
            }
            w
        })
        .collect();
    let mut gram = DMatrix::<f64>::zeros(r, r);
    for i in 0..r {
        for j in i..r {
            let g = dot(&rejected[i], &rejected[j]);
            gram[(i, j)] = g;
            gram[(j, i)] = g;
        }
    }
    let top = gram
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    Ok(top.max(0.0).sqrt().min(1.0))
}
