//! Sector matrices of the ferromagnetic XXZ Hamiltonian.
//!
//! Bond term, per nearest-neighbour pair:
//!
//! ```text
//! h_xy = -(1/Δ)(S¹_x S¹_y + S²_x S²_y) - (S³_x S³_y - 1/4)
//! ```
//!
//! In the S³ basis an anti-aligned pair has diagonal weight +1/2 and is
//! exchanged with amplitude -1/(2Δ); an aligned pair contributes nothing.
//! Site fields enter as `Σ_x f_x S³_x`; the open chain with boundary signs
//! (σ_L, σ_R) uses `f_1 = -σ_L A(Δ)`, `f_L = -σ_R A(Δ)`.

use crate::error::{domain, Error, Result};
use crate::hilbert::SpinBasisSector;
use crate::lattice::LatticeSpec;
use crate::sparse::{CsrBuilder, SectorTag, SparseOperator};
use serde::{Deserialize, Serialize};

/// Easy-axis anisotropy Δ > 1 and its q-parametrization Δ = (q + 1/q)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyParam {
    delta: f64,
    q: f64,
}

impl AnisotropyParam {
    pub fn from_delta(delta: f64) -> Result<Self> {
        if !(delta > 1.0) || !delta.is_finite() {
            return Err(Error::InvalidAnisotropy(delta));
        }
        // 1/(Δ + √(Δ²-1)) is the root in (0,1), without cancellation
        let q = 1.0 / (delta + (delta * delta - 1.0).sqrt());
        Ok(Self { delta, q })
    }

    pub fn from_q(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return domain(format!("q={q} must lie in (0, 1)"));
        }
        Ok(Self {
            delta: 0.5 * (q + 1.0 / q),
            q,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// A(Δ) = ½√(1 - Δ⁻²).
    pub fn boundary_field(&self) -> f64 {
        0.5 * (1.0 - 1.0 / (self.delta * self.delta)).sqrt()
    }

    /// γ = 1 - 1/Δ.
    pub fn gamma(&self) -> f64 {
        1.0 - 1.0 / self.delta
    }

    pub fn exchange(&self) -> f64 {
        -0.5 / self.delta
    }
}

/// A(Δ) = ½√(1 - Δ⁻²) for Δ > 1.
pub fn boundary_field_amplitude(delta: f64) -> Result<f64> {
    Ok(AnisotropyParam::from_delta(delta)?.boundary_field())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSign {
    Plus,
    Minus,
}

impl FieldSign {
    pub fn value(self) -> f64 {
        match self {
            FieldSign::Plus => 1.0,
            FieldSign::Minus => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            FieldSign::Plus => FieldSign::Minus,
            FieldSign::Minus => FieldSign::Plus,
        }
    }
}

/// Signs of the boundary fields at sites 1 and L: `++` favours up spins at
/// both ends, `+-` is the kink and `-+` the antikink Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Boundary {
    pub left: FieldSign,
    pub right: FieldSign,
}

impl Boundary {
    pub const PP: Boundary = Boundary::new(FieldSign::Plus, FieldSign::Plus);
    pub const PM: Boundary = Boundary::new(FieldSign::Plus, FieldSign::Minus);
    pub const MP: Boundary = Boundary::new(FieldSign::Minus, FieldSign::Plus);
    pub const MM: Boundary = Boundary::new(FieldSign::Minus, FieldSign::Minus);

    pub const fn new(left: FieldSign, right: FieldSign) -> Self {
        Self { left, right }
    }

    pub fn label(&self) -> &'static str {
        match (self.left, self.right) {
            (FieldSign::Plus, FieldSign::Plus) => "pp",
            (FieldSign::Plus, FieldSign::Minus) => "pm",
            (FieldSign::Minus, FieldSign::Plus) => "mp",
            (FieldSign::Minus, FieldSign::Minus) => "mm",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pp" | "++" => Ok(Self::PP),
            "pm" | "+-" => Ok(Self::PM),
            "mp" | "-+" => Ok(Self::MP),
            "mm" | "--" => Ok(Self::MM),
            _ => domain(format!("unknown boundary token '{s}' (expected pp, pm, mp or mm)")),
        }
    }
}

#[inline]
fn sz(bits: u64, bit: usize) -> f64 {
    if bits >> bit & 1 == 1 {
        -0.5
    } else {
        0.5
    }
}

/// Open-chain Hamiltonian on [1, L] with boundary fields `-A(Δ)(σ_L S³_1 + σ_R S³_L)`,
/// restricted to `sector`.
pub fn build_chain_hamiltonian(
    sites: usize,
    delta: f64,
    boundary: Boundary,
    sector: &SpinBasisSector,
) -> Result<SparseOperator> {
    let aniso = AnisotropyParam::from_delta(delta)?;
    if sites < 2 {
        return domain(format!("chain needs at least 2 sites, got L={sites}"));
    }
    if sector.sites() != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            found: sector.sites(),
        });
    }
    let a = aniso.boundary_field();
    let hop = aniso.exchange();
    let (fl, fr) = (-a * boundary.left.value(), -a * boundary.right.value());
    let mut b = CsrBuilder::new(sector.dim());
    let mut row = Vec::with_capacity(sites);
    for &bits in sector.states() {
        let mut diag = fl * sz(bits, 0) + fr * sz(bits, sites - 1);
        for x in 0..sites - 1 {
            let pair = (bits >> x) & 0b11;
            if pair == 0b01 || pair == 0b10 {
                diag += 0.5;
                let j = sector.index_of(bits ^ (0b11 << x)).expect("exchange stays in sector");
                row.push((j, hop));
            }
        }
        row.push((row_index(sector, bits), diag));
        b.push_row(&mut row);
    }
    b.build(Some(SectorTag {
        sites,
        down: sector.down_count(),
    }))
}

#[inline]
fn row_index(sector: &SpinBasisSector, bits: u64) -> usize {
    sector.index_of(bits).expect("state belongs to its sector")
}

/// Options for [`build_lattice_hamiltonian_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeOptions {
    /// Include the -1/4 bond constant so aligned bonds cost nothing.
    pub bond_constant: bool,
}

impl Default for LatticeOptions {
    fn default() -> Self {
        Self { bond_constant: true }
    }
}

/// `Σ_edges h_xy + Σ_x f_x S³_x` on an arbitrary lattice, restricted to `sector`.
/// Lattice site i is bit i of the configuration.
pub fn build_lattice_hamiltonian(
    lattice: &LatticeSpec,
    delta: f64,
    sector: &SpinBasisSector,
) -> Result<SparseOperator> {
    build_lattice_hamiltonian_with(lattice, delta, sector, LatticeOptions::default())
}

pub fn build_lattice_hamiltonian_with(
    lattice: &LatticeSpec,
    delta: f64,
    sector: &SpinBasisSector,
    opts: LatticeOptions,
) -> Result<SparseOperator> {
    let aniso = AnisotropyParam::from_delta(delta)?;
    if sector.sites() != lattice.site_count() {
        return Err(Error::DimensionMismatch {
            expected: lattice.site_count(),
            found: sector.sites(),
        });
    }
    let hop = aniso.exchange();
    let (aligned, anti) = if opts.bond_constant {
        (0.0, 0.5)
    } else {
        (-0.25, 0.25)
    };
    let fields: Vec<(usize, f64)> = lattice
        .fields()
        .iter()
        .enumerate()
        .filter(|(_, &f)| f != 0.0)
        .map(|(i, &f)| (i, f))
        .collect();
    let mut b = CsrBuilder::new(sector.dim());
    let mut row = Vec::new();
    for &bits in sector.states() {
        let mut diag = 0.0;
        for &(i, f) in &fields {
            diag += f * sz(bits, i);
        }
        for &(x, y) in lattice.edges() {
            if (bits >> x & 1) != (bits >> y & 1) {
                diag += anti;
                let flipped = bits ^ (1 << x) ^ (1 << y);
                row.push((row_index(sector, flipped), hop));
            } else {
                diag += aligned;
            }
        }
        row.push((row_index(sector, bits), diag));
        b.push_row(&mut row);
    }
    b.build(Some(SectorTag {
        sites: sector.sites(),
        down: sector.down_count(),
    }))
}

/// Open chain as a [`LatticeSpec`] carrying the boundary fields of `boundary`.
pub fn chain_lattice(sites: usize, delta: f64, boundary: Boundary) -> Result<LatticeSpec> {
    let a = boundary_field_amplitude(delta)?;
    let mut lat = LatticeSpec::chain(sites)?;
    lat.set_field(0, -a * boundary.left.value());
    let last = sites - 1;
    let f = lat.field(last) - a * boundary.right.value();
    lat.set_field(last, f);
    Ok(lat)
}
