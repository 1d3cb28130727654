//! Finite subsets of ℤ^d with nearest-neighbour edges and per-site S³ fields.

use crate::error::{domain, Result};
use std::collections::HashSet;

pub type Coord = [i32; 3];

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSpec {
    dim: usize,
    coords: Vec<Coord>,
    edges: Vec<(usize, usize)>,
    fields: Vec<f64>,
    /// Box extents and per-axis periodicity, for lattices built as boxes.
    shape: Option<BoxShape>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxShape {
    pub extents: [usize; 3],
    pub periodic: [bool; 3],
}

impl LatticeSpec {
    /// Validate an explicit site/edge list. Edges must join distinct listed
    /// sites at Euclidean distance 1, each unordered pair at most once.
    pub fn from_parts(dim: usize, coords: Vec<Coord>, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::validate(dim, &coords, &edges, None)?;
        let n = coords.len();
        Ok(Self {
            dim,
            coords,
            edges,
            fields: vec![0.0; n],
            shape: None,
        })
    }

    /// Box of the given extents (1 to 3 axes), sites in row-major order with
    /// the first axis fastest. Periodic axes wrap when the extent is at least 3;
    /// a periodic axis of extent 2 would duplicate its edge and stays open.
    pub fn hypercubic(extents: &[usize], periodic: &[bool]) -> Result<Self> {
        let dim = extents.len();
        if !(1..=3).contains(&dim) || periodic.len() != dim {
            return domain(format!(
                "box needs 1 to 3 axes with matching periodicity flags, got {extents:?} / {periodic:?}"
            ));
        }
        if extents.contains(&0) {
            return domain(format!("box extents must be positive, got {extents:?}"));
        }
        let mut ext = [1usize; 3];
        let mut per = [false; 3];
        for a in 0..dim {
            ext[a] = extents[a];
            per[a] = periodic[a] && extents[a] >= 3;
        }
        let n: usize = ext.iter().product();
        let index = |c: [usize; 3]| c[0] + ext[0] * (c[1] + ext[1] * c[2]);
        let mut coords = Vec::with_capacity(n);
        for z in 0..ext[2] {
            for y in 0..ext[1] {
                for x in 0..ext[0] {
                    coords.push([x as i32, y as i32, z as i32]);
                }
            }
        }
        let mut edges = Vec::new();
        for (i, c) in coords.iter().enumerate() {
            let c = [c[0] as usize, c[1] as usize, c[2] as usize];
            for a in 0..dim {
                let mut d = c;
                if c[a] + 1 < ext[a] {
                    d[a] += 1;
                } else if per[a] {
                    d[a] = 0;
                } else {
                    continue;
                }
                let j = index(d);
                edges.push((i.min(j), i.max(j)));
            }
        }
        let shape = BoxShape {
            extents: ext,
            periodic: per,
        };
        Self::validate(dim, &coords, &edges, Some(&shape))?;
        Ok(Self {
            dim,
            coords,
            edges,
            fields: vec![0.0; n],
            shape: Some(shape),
        })
    }

    /// Open chain of `sites` sites; site index i sits at coordinate i.
    pub fn chain(sites: usize) -> Result<Self> {
        Self::hypercubic(&[sites], &[false])
    }

    fn validate(
        dim: usize,
        coords: &[Coord],
        edges: &[(usize, usize)],
        shape: Option<&BoxShape>,
    ) -> Result<()> {
        if !(1..=3).contains(&dim) {
            return domain(format!("lattice dimension must be 1, 2 or 3, got {dim}"));
        }
        if coords.is_empty() {
            return domain("lattice has no sites");
        }
        let mut seen = HashSet::new();
        for c in coords {
            if c[dim..].iter().any(|&v| v != 0) {
                return domain(format!("coordinate {c:?} uses axes beyond d={dim}"));
            }
            if !seen.insert(*c) {
                return domain(format!("duplicate site at {c:?}"));
            }
        }
        let mut pairs = HashSet::new();
        for &(a, b) in edges {
            if a >= coords.len() || b >= coords.len() {
                return domain(format!("edge ({a}, {b}) has an endpoint that is not a listed site"));
            }
            if a == b {
                return domain(format!("edge ({a}, {a}) is a self-loop"));
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                return domain(format!("duplicate edge ({a}, {b})"));
            }
            let mut dist2 = 0i64;
            for axis in 0..3 {
                let mut d = (coords[a][axis] - coords[b][axis]).abs() as i64;
                if let Some(s) = shape {
                    if s.periodic[axis] {
                        d = d.min(s.extents[axis] as i64 - d);
                    }
                }
                dist2 += d * d;
            }
            if dist2 != 1 {
                return domain(format!(
                    "edge ({a}, {b}) joins {:?} and {:?}, which are not nearest neighbours",
                    coords[a], coords[b]
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn site_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.coords
    }

    pub fn coord(&self, site: usize) -> Coord {
        self.coords[site]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn shape(&self) -> Option<BoxShape> {
        self.shape
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn field(&self, site: usize) -> f64 {
        self.fields[site]
    }

    pub fn set_field(&mut self, site: usize, value: f64) {
        self.fields[site] = value;
    }

    pub fn with_fields(mut self, fields: Vec<f64>) -> Result<Self> {
        if fields.len() != self.coords.len() {
            return domain(format!(
                "field map has {} entries for {} sites",
                fields.len(),
                self.coords.len()
            ));
        }
        self.fields = fields;
        Ok(self)
    }

    /// (-1)^{|x|} with |x| the coordinate sum.
    pub fn parity(&self, site: usize) -> i32 {
        if self.coords[site].iter().sum::<i32>().rem_euclid(2) == 0 {
            1
        } else {
            -1
        }
    }

    /// True when every edge joins sites of opposite coordinate parity, so the
    /// parity classes are the two sublattices.
    pub fn is_bipartite(&self) -> bool {
        self.edges
            .iter()
            .all(|&(a, b)| self.parity(a) != self.parity(b))
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.coords.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for l in &mut adj {
            l.sort_unstable();
        }
        adj
    }

    /// Sites on the outer boundary: for boxes, a coordinate at either end of an
    /// open axis; otherwise sites with fewer neighbours than the maximum.
    pub fn is_boundary(&self, site: usize) -> bool {
        match self.shape {
            Some(s) => (0..self.dim).any(|a| {
                let c = self.coords[site][a] as usize;
                !s.periodic[a] && (c == 0 || c + 1 == s.extents[a])
            }),
            None => {
                let adj = self.neighbors();
                let zmax = adj.iter().map(Vec::len).max().unwrap_or(0);
                adj[site].len() < zmax
            }
        }
    }

    /// Site index for a coordinate, if present.
    pub fn site_at(&self, c: Coord) -> Option<usize> {
        self.coords.iter().position(|&d| d == c)
    }
}
