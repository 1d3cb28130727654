//! Row-compressed real symmetric operators and their plain-text triplet form.
//!
//! Triplet format: a header line `dim nnz`, then one `row col value` line per
//! stored entry in row-major order, values in `{:.16e}` (17 significant
//! digits, lossless for f64).

use crate::error::{domain, Error, Result};
use nalgebra::DMatrix;
use std::fmt::Write as _;

/// Sector provenance of an operator: `(sites, down)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SectorTag {
    pub sites: usize,
    pub down: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    tag: Option<SectorTag>,
}

/// Accumulates rows in order; columns within a row are sorted and merged.
pub struct CsrBuilder {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrBuilder {
    pub fn new(dim: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(dim + 1);
        row_ptr.push(0);
        Self {
            dim,
            row_ptr,
            cols: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Append the next row. Duplicate columns are summed; zeros are dropped.
    pub fn push_row(&mut self, entries: &mut Vec<(usize, f64)>) {
        entries.sort_by_key(|e| e.0);
        let mut i = 0;
        while i < entries.len() {
            let c = entries[i].0;
            let mut v = entries[i].1;
            i += 1;
            while i < entries.len() && entries[i].0 == c {
                v += entries[i].1;
                i += 1;
            }
            if v != 0.0 {
                self.cols.push(c);
                self.vals.push(v);
            }
        }
        self.row_ptr.push(self.cols.len());
        entries.clear();
    }

    /// Finish, checking that all rows were supplied and the result is exactly
    /// symmetric.
    pub fn build(self, tag: Option<SectorTag>) -> Result<SparseOperator> {
        if self.row_ptr.len() != self.dim + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.row_ptr.len() - 1,
            });
        }
        if let Some(&c) = self.cols.iter().find(|&&c| c >= self.dim) {
            return domain(format!("column {c} out of range for dimension {}", self.dim));
        }
        let op = SparseOperator {
            dim: self.dim,
            row_ptr: self.row_ptr,
            cols: self.cols,
            vals: self.vals,
            tag,
        };
        if !op.is_symmetric() {
            return domain("assembled operator is not symmetric");
        }
        Ok(op)
    }
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn tag(&self) -> Option<SectorTag> {
        self.tag
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    /// Row-major (row, col, value) triplets.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// Bitwise symmetry of stored entries.
    pub fn is_symmetric(&self) -> bool {
        self.triplets()
            .all(|(i, j, v)| self.get(j, i).to_bits() == v.to_bits())
    }

    /// y = A x, summing each row in stored column order.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec(x, &mut y);
        y
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Maximum absolute column sum (equal to the row sum by symmetry).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.triplets() {
            m[(i, j)] = v;
        }
        m
    }

    /// Symmetric permutation: entry (i, j) moves to (perm[i], perm[j]).
    pub fn permuted(&self, perm: &[usize]) -> Result<SparseOperator> {
        if perm.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: perm.len(),
            });
        }
        let mut inv = vec![usize::MAX; self.dim];
        for (i, &p) in perm.iter().enumerate() {
            if p >= self.dim || inv[p] != usize::MAX {
                return domain("permutation is not a bijection");
            }
            inv[p] = i;
        }
        let mut b = CsrBuilder::new(self.dim);
        let mut row = Vec::new();
        for &old in &inv {
            row.extend(self.row(old).map(|(j, v)| (perm[j], v)));
            b.push_row(&mut row);
        }
        b.build(self.tag)
    }

    pub fn to_triplet_string(&self) -> String {
        let mut s = String::with_capacity(32 * (self.nnz() + 1));
        writeln!(s, "{} {}", self.dim, self.nnz()).unwrap();
        for (i, j, v) in self.triplets() {
            writeln!(s, "{i} {j} {v:.16e}").unwrap();
        }
        s
    }

    pub fn from_triplet_str(text: &str) -> Result<SparseOperator> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Domain("empty triplet file".into()))?;
        let mut h = header.split_whitespace();
        let parse_usize = |t: Option<&str>| -> Result<usize> {
            t.and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Domain(format!("malformed triplet line: {header}")))
        };
        let dim = parse_usize(h.next())?;
        let nnz = parse_usize(h.next())?;
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        let mut count = 0;
        for line in lines {
            let mut t = line.split_whitespace();
            let bad = || Error::Domain(format!("malformed triplet line: {line}"));
            let i: usize = t.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let j: usize = t.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let v: f64 = t.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            if i >= dim || j >= dim {
                return Err(bad());
            }
            rows[i].push((j, v));
            count += 1;
        }
        if count != nnz {
            return domain(format!("header declares {nnz} entries, found {count}"));
        }
        let mut b = CsrBuilder::new(dim);
        for mut r in rows {
            b.push_row(&mut r);
        }
        b.build(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SparseOperator {
        let mut b = CsrBuilder::new(3);
        b.push_row(&mut vec![(0, 1.0), (1, -0.5)]);
        b.push_row(&mut vec![(1, 0.0), (0, -0.5), (2, 0.25)]);
        b.push_row(&mut vec![(1, 0.25), (2, 2.0), (2, 1.0)]);
        b.build(None).unwrap()
    }

    #[test]
    fn drops_zeros_and_merges() {
        let a = small();
        assert_eq!(a.nnz(), 6);
        assert_eq!(a.get(2, 2), 3.0);
        assert_eq!(a.get(1, 1), 0.0);
        assert_eq!(a.apply(&[1.0, 1.0, 1.0]), vec![0.5, -0.25, 3.25]);
        assert_eq!(a.trace(), 4.0);
        assert_eq!(a.norm_one(), 3.25);
    }

    #[test]
    fn asymmetric_rejected() {
        let mut b = CsrBuilder::new(2);
        b.push_row(&mut vec![(1, 1.0)]);
        b.push_row(&mut vec![(0, 2.0)]);
        assert!(b.build(None).is_err());
    }

    #[test]
    fn triplet_text_roundtrip() {
        let a = small();
        let text = a.to_triplet_string();
        assert!(text.starts_with("3 6\n0 0 1.0000000000000000e0\n"));
        let b = SparseOperator::from_triplet_str(&text).unwrap();
        assert_eq!(a.to_dense(), b.to_dense());
        assert!(SparseOperator::from_triplet_str("2 1\n0 1 1.0\n").is_err());
        assert!(SparseOperator::from_triplet_str("2 2\n0 5 1.0\n5 0 1.0\n").is_err());
    }

    #[test]
    fn permutation_preserves_entries() {
        let a = small();
        let p = a.permuted(&[2, 0, 1]).unwrap();
        for (i, j, v) in a.triplets() {
            assert_eq!(p.get([2, 0, 1][i], [2, 0, 1][j]), v);
        }
        assert!(a.permuted(&[0, 0, 1]).is_err());
    }
}
