use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use xxzfk::interface::Filling;
use xxzfk::xxz::Boundary;

#[derive(Debug, Parser)]
#[command(name = "xxzfk", version, about = "XXZ droplet/interface spectra and Falicov-Kimball ion statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the boundary-field chain in each requested sector.
    Spectrum(SpectrumArgs),
    /// Droplet multiplet window, gap and subspace distance per sector.
    DropletVerify(DropletArgs),
    /// Norms of the mixed-boundary Hamiltonians applied to kink/antikink states.
    KinkCheck(KinkArgs),
    /// Falicov-Kimball computations.
    Fk {
        #[command(subcommand)]
        command: FkCommand,
    },
    /// Two lowest levels of diagonal-interface strips over a (delta, width) grid.
    InterfaceScan(InterfaceArgs),
    /// Rerun the command recorded in a manifest and compare output digests.
    Replay {
        /// Path to a `*.manifest.json` file.
        manifest: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum FkCommand {
    /// Single-particle levels and energies for one ion configuration.
    Ground(FkGroundArgs),
    /// Exhaustive scan of neutral configurations.
    Checkerboard(FkCheckerboardArgs),
    /// Effective Ising coupling from a single ion hop, for each U.
    Coupling(FkCouplingArgs),
    /// Metropolis sampling of ion configurations.
    Mc(FkMcArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Directory for data files and the run manifest; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Sector list: `a..b` (inclusive) or comma-separated; empty means none.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NList(pub Vec<usize>);

pub fn parse_n_list(s: &str) -> Result<NList, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(NList(Vec::new()));
    }
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| format!("bad range start in '{s}'"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("bad range end in '{s}'"))?;
        if a > b {
            return Err(format!("empty range '{s}'"));
        }
        return Ok(NList((a..=b).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad sector '{t}'")))
        .collect::<Result<_, _>>()
        .map(NList)
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| format!("bad list entry '{t}'")))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloatList(pub Vec<f64>);

pub fn parse_float_list(s: &str) -> Result<FloatList, String> {
    parse_list(s).map(FloatList)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeList(pub Vec<usize>);

pub fn parse_size_list(s: &str) -> Result<SizeList, String> {
    parse_list(s).map(SizeList)
}

/// Box extents such as `4x4` or `4x4x4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Extents(pub Vec<usize>);

pub fn parse_extents(s: &str) -> Result<Extents, String> {
    let dims: Vec<usize> = s
        .split(['x', 'X'])
        .map(|t| t.trim().parse().map_err(|_| format!("bad lattice '{s}', expected e.g. 4x4")))
        .collect::<Result<_, _>>()?;
    if dims.is_empty() || dims.len() > 3 || dims.contains(&0) {
        return Err(format!("lattice '{s}' needs 1 to 3 positive extents"));
    }
    Ok(Extents(dims))
}

pub fn parse_boundary(s: &str) -> Result<Boundary, String> {
    s.parse().map_err(|e: xxzfk::Error| e.to_string())
}

pub fn parse_filling(s: &str) -> Result<Filling, String> {
    s.parse().map_err(|e: xxzfk::Error| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: usize,
    #[arg(long, default_value_t = 2.125)]
    pub delta: f64,
    /// Sectors; defaults to 0..L.
    #[arg(long, value_parser = parse_n_list)]
    pub n: Option<NList>,
    #[arg(long, default_value = "pp", value_parser = parse_boundary)]
    #[serde(serialize_with = "boundary_label")]
    pub boundary: Boundary,
    /// Lowest k levels by Lanczos for sectors above the dense cap.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn boundary_label<S: serde::Serializer>(b: &Boundary, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(b.label())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DropletArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: usize,
    #[arg(long, default_value_t = 2.125)]
    pub delta: f64,
    /// Sectors; defaults to 0..L.
    #[arg(long, value_parser = parse_n_list)]
    pub n: Option<NList>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KinkArgs {
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub sites: usize,
    #[arg(long, default_value_t = 2.125)]
    pub delta: f64,
    /// Sectors; defaults to 0..L.
    #[arg(long, value_parser = parse_n_list)]
    pub n: Option<NList>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeArgs {
    #[arg(long, value_parser = parse_extents)]
    pub lattice: Option<Extents>,
    /// Wrap every axis.
    #[arg(long, conflicts_with = "open")]
    pub periodic: bool,
    /// Open boundaries on every axis.
    #[arg(long)]
    pub open: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FkGroundArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long = "U", default_value_t = 8.0)]
    #[serde(rename = "U")]
    pub u: f64,
    /// Occupancy string in site order; defaults to the even checkerboard.
    #[arg(long)]
    pub config: Option<String>,
    /// Electron count; defaults to half the sites.
    #[arg(long)]
    pub electrons: Option<usize>,
    /// Also report the grand potential at this inverse temperature.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Chemical potential for the grand potential; defaults to U.
    #[arg(long)]
    pub mu: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FkCheckerboardArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long = "U", default_value_t = 8.0)]
    #[serde(rename = "U")]
    pub u: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FkCouplingArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Comma-separated couplings.
    #[arg(long = "U", default_value = "8,16,32", value_parser = parse_float_list)]
    #[serde(rename = "U")]
    pub u: FloatList,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FkMcArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long = "U", default_value_t = 8.0)]
    #[serde(rename = "U")]
    pub u: f64,
    #[arg(long, default_value_t = 10.0)]
    pub beta: f64,
    /// Defaults to U.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Measured sweeps.
    #[arg(long, default_value_t = 1000)]
    pub steps: usize,
    /// Discarded sweeps; defaults to steps/5.
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pin boundary sites off the plane x1+x2+x3 = PLANE to the side's sign.
    #[arg(long)]
    pub pin_111: Option<i32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InterfaceArgs {
    #[arg(long, default_value = "2.125", value_parser = parse_float_list)]
    pub delta: FloatList,
    #[arg(long, default_value = "1,2,3", value_parser = parse_size_list)]
    pub width: SizeList,
    #[arg(long, default_value_t = 4)]
    pub height: usize,
    #[arg(long, default_value = "1/2", value_parser = parse_filling)]
    #[serde(serialize_with = "filling_label")]
    pub filling: Filling,
    /// Close the width axis into a ring.
    #[arg(long)]
    pub periodic: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn filling_label<S: serde::Serializer>(f: &Filling, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_string())
}
