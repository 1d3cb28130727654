use crate::args::*;
use crate::output::{csv_field, float, opt_float, Sink};
use serde::Serialize;
use std::fmt::Write as _;
use std::io;
use xxzfk::droplet::{antikink_annihilation_check, kink_annihilation_check, verify_theorem, SolverBudget, TheoremReport};
use xxzfk::eigensolve::{full_spectrum, lowest_k, SpectrumRecord, DEFAULT_DENSE_CAP};
use xxzfk::fk::{
    checkerboard_check, effective_coupling_estimate, metropolis_ions, pin_111, FreeFermionResult, IonConfiguration,
    McOptions,
};
use xxzfk::hilbert::SpinBasisSector;
use xxzfk::interface::gap_scan_with;
use xxzfk::lattice::LatticeSpec;
use xxzfk::xxz::build_chain_hamiltonian;

/// Residual bound for a kink state to count as a zero mode.
pub const ZERO_MODE_TOL: f64 = 1e-10;

const LANCZOS_TOL: f64 = 1e-9;
const LANCZOS_BUDGET: usize = 500_000;

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters: exit status 2.
    Usage(String),
    /// The computation itself failed: exit status 1.
    Compute(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<xxzfk::Error> for CliError {
    fn from(e: xxzfk::Error) -> Self {
        use xxzfk::Error::*;
        match e {
            NoConvergence { .. } | RankDeficient { .. } | DenseCapExceeded { .. } => CliError::Compute(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// Outcome of a command that ran to completion. `ok = false` means some
/// part failed (exit status 1) after all data was written.
pub struct Outcome {
    pub ok: bool,
}

const DONE: Outcome = Outcome { ok: true };

fn json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn sectors(sites: usize, n: &Option<NList>) -> Vec<usize> {
    n.as_ref().map(|l| l.0.clone()).unwrap_or_else(|| (0..=sites).collect())
}

fn check_sites(sites: usize) -> Result<(), CliError> {
    if !(2..=xxzfk::hilbert::MAX_SITES).contains(&sites) {
        return Err(CliError::Usage(format!(
            "L must be between 2 and {}, got {sites}",
            xxzfk::hilbert::MAX_SITES
        )));
    }
    Ok(())
}

pub fn spectrum(a: &SpectrumArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    check_sites(a.sites)?;
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for n in sectors(a.sites, &a.n) {
        let sector = SpinBasisSector::new(a.sites, n)?;
        let op = build_chain_hamiltonian(a.sites, a.delta, a.boundary, &sector)?;
        let result = if op.dim() <= DEFAULT_DENSE_CAP {
            full_spectrum(&op, false)
        } else if let Some(k) = a.k {
            lowest_k(&op, k.clamp(1, op.dim()), LANCZOS_TOL, LANCZOS_BUDGET, a.seed)
        } else {
            failures.push(format!(
                "sector n={n}: dimension {} exceeds the dense cap {DEFAULT_DENSE_CAP}; pass --k for the lowest levels",
                op.dim()
            ));
            continue;
        };
        match result {
            Ok(r) => records.push(SpectrumRecord::new(&r, a.delta)),
            Err(e) => failures.push(format!("sector n={n}: {e}")),
        }
    }
    let body = match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => json(&records)?,
        Format::Csv => {
            let mut s = String::from("n,k,eigenvalue\n");
            for r in &records {
                for (k, e) in r.eigenvalues.iter().enumerate() {
                    writeln!(s, "{},{},{}", r.n, k + 1, float(*e)).unwrap();
                }
            }
            s
        }
    };
    let ext = extension(a.output.format.unwrap_or(Format::Csv));
    sink.emit(&format!("spectrum.{ext}"), &body)?;
    for f in &failures {
        eprintln!("{f}");
    }
    Ok(Outcome { ok: failures.is_empty() })
}

fn extension(f: Format) -> &'static str {
    match f {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

pub fn droplet_verify(a: &DropletArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    check_sites(a.sites)?;
    let budget = SolverBudget {
        seed: a.seed,
        ..SolverBudget::default()
    };
    let reports = sectors(a.sites, &a.n)
        .into_iter()
        .map(|n| verify_theorem(a.sites, n, a.delta, &budget))
        .collect::<Result<Vec<TheoremReport>, _>>()?;
    let format = a.output.format.unwrap_or(Format::Json);
    let body = match format {
        Format::Json => json(&reports)?,
        Format::Csv => {
            let mut s = String::from(
                "L,n,delta,q,a_delta,multiplet,window_halfwidth,gap_value,subspace_distance,gamma_ref,degenerate_cut,method,max_residual\n",
            );
            for r in &reports {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.sites,
                    r.n,
                    float(r.delta),
                    float(r.q),
                    float(r.a_delta),
                    r.multiplet,
                    float(r.window_halfwidth),
                    opt_float(r.gap_value),
                    float(r.subspace_distance),
                    float(r.gamma_ref),
                    r.degenerate_cut,
                    r.method.label(),
                    float(r.max_residual)
                )
                .unwrap();
            }
            s
        }
    };
    sink.emit(&format!("droplet_verify.{}", extension(format)), &body)?;
    Ok(DONE)
}

#[derive(Serialize)]
struct KinkRow {
    #[serde(rename = "L")]
    sites: usize,
    n: usize,
    delta: f64,
    kink_norm: f64,
    antikink_norm: f64,
}

pub fn kink_check(a: &KinkArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    check_sites(a.sites)?;
    let mut rows = Vec::new();
    for n in sectors(a.sites, &a.n) {
        rows.push(KinkRow {
            sites: a.sites,
            n,
            delta: a.delta,
            kink_norm: kink_annihilation_check(a.sites, n, a.delta)?,
            antikink_norm: antikink_annihilation_check(a.sites, n, a.delta)?,
        });
    }
    let format = a.output.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut s = String::from("L,n,delta,kink_norm,antikink_norm\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    r.sites,
                    r.n,
                    float(r.delta),
                    float(r.kink_norm),
                    float(r.antikink_norm)
                )
                .unwrap();
            }
            s
        }
    };
    sink.emit(&format!("kink_check.{}", extension(format)), &body)?;
    let worst = rows
        .iter()
        .map(|r| r.kink_norm.max(r.antikink_norm))
        .fold(0.0, f64::max);
    if sink.dir().is_some() {
        eprintln!("largest norm {worst:e} over {} sectors", rows.len());
    }
    Ok(Outcome {
        ok: worst <= ZERO_MODE_TOL,
    })
}

fn build_lattice(l: &LatticeArgs, default: &[usize], periodic_default: bool) -> Result<LatticeSpec, CliError> {
    let extents = l.lattice.as_ref().map(|e| e.0.clone()).unwrap_or_else(|| default.to_vec());
    let periodic = if l.periodic {
        true
    } else if l.open {
        false
    } else {
        periodic_default
    };
    Ok(LatticeSpec::hypercubic(&extents, &vec![periodic; extents.len()])?)
}

#[derive(Serialize)]
struct GroundReport {
    sites: usize,
    #[serde(rename = "U")]
    u: f64,
    configuration: String,
    ions: usize,
    electrons: usize,
    ground_energy: f64,
    beta: Option<f64>,
    mu: Option<f64>,
    free_energy: Option<f64>,
    levels: Vec<f64>,
}

pub fn fk_ground(a: &FkGroundArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    let lattice = build_lattice(&a.lattice, &[4, 4], true)?;
    let config = match &a.config {
        Some(s) => IonConfiguration::parse(&lattice, s)?,
        None => IonConfiguration::checkerboard(&lattice, 1),
    };
    let electrons = a.electrons.unwrap_or(lattice.site_count() / 2);
    let ff = FreeFermionResult::new(&lattice, &config, a.u)?;
    let mu = a.beta.map(|_| a.mu.unwrap_or(a.u));
    let free_energy = match (a.beta, mu) {
        (Some(b), Some(m)) => Some(ff.free_energy(b, m)?),
        _ => None,
    };
    let report = GroundReport {
        sites: lattice.site_count(),
        u: a.u,
        configuration: config.as_string(),
        ions: config.ion_count(),
        electrons,
        ground_energy: ff.ground_energy_at(electrons)?,
        beta: a.beta,
        mu,
        free_energy,
        levels: ff.levels.clone(),
    };
    let format = a.output.format.unwrap_or(Format::Json);
    let body = match format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("k,level\n");
            for (k, e) in report.levels.iter().enumerate() {
                writeln!(s, "{},{}", k + 1, float(*e)).unwrap();
            }
            s
        }
    };
    sink.emit(&format!("fk_ground.{}", extension(format)), &body)?;
    Ok(DONE)
}

pub fn fk_checkerboard(a: &FkCheckerboardArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    let lattice = build_lattice(&a.lattice, &[4, 4], true)?;
    let report = checkerboard_check(&lattice, a.u)?;
    let format = a.output.format.unwrap_or(Format::Json);
    let body = match format {
        Format::Json => json(&report)?,
        Format::Csv => {
            let mut s = String::from("configuration,energy\n");
            for (c, e) in report.argmin.iter().zip(&report.argmin_energies) {
                writeln!(s, "{},{}", c, float(*e)).unwrap();
            }
            s
        }
    };
    sink.emit(&format!("fk_checkerboard.{}", extension(format)), &body)?;
    Ok(DONE)
}

pub fn fk_coupling(a: &FkCouplingArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    let lattice = build_lattice(&a.lattice, &[8, 8], true)?;
    let rows = a
        .u
        .0
        .iter()
        .map(|&u| effective_coupling_estimate(&lattice, u))
        .collect::<Result<Vec<_>, _>>()?;
    for r in &rows {
        if let Some(w) = &r.warning {
            eprintln!("U={}: {w}", r.u);
        }
    }
    let format = a.output.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Json => json(&rows)?,
        Format::Csv => {
            let mut s = String::from("U,delta_e,pair_coordination,j_est,four_u_j,warning\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    float(r.u),
                    float(r.delta_e),
                    r.pair_coordination,
                    float(r.j_est),
                    float(r.scaled),
                    csv_field(r.warning.as_deref().unwrap_or(""))
                )
                .unwrap();
            }
            s
        }
    };
    sink.emit(&format!("fk_coupling.{}", extension(format)), &body)?;
    Ok(DONE)
}

#[derive(Serialize)]
struct McSummary<'a> {
    sites: usize,
    #[serde(rename = "U")]
    u: f64,
    beta: f64,
    mu: f64,
    sweeps: usize,
    burn_in: usize,
    seed: u64,
    acceptance: f64,
    proposals: u64,
    pinning: String,
    final_occupancy: &'a str,
}

pub fn fk_mc(a: &FkMcArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    let lattice = build_lattice(&a.lattice, &[4, 4, 4], false)?;
    let mut opts = McOptions::new(a.u, a.beta, a.steps, a.seed);
    opts.mu = a.mu;
    opts.burn_in = a.burn_in;
    let pinning = match a.pin_111 {
        Some(plane) => {
            if lattice.dim() != 3 {
                return Err(CliError::Usage("--pin-111 needs a three-dimensional lattice".into()));
            }
            opts.pinning = Some(pin_111(&lattice, plane));
            format!(
                "boundary sites off the plane x1+x2+x3={plane} pinned to the sign of their side; one admissible choice of 111 boundary condition"
            )
        }
        None => "none".to_string(),
    };
    let st = metropolis_ions(&lattice, &opts)?;
    let summary = McSummary {
        sites: lattice.site_count(),
        u: a.u,
        beta: a.beta,
        mu: st.mu,
        sweeps: st.sweeps,
        burn_in: st.burn_in,
        seed: a.seed,
        acceptance: st.acceptance,
        proposals: st.proposals,
        pinning,
        final_occupancy: &st.final_occupancy,
    };
    let mut sites = String::from("site,x1,x2,x3,pinned,mean_s,stderr\n");
    for x in 0..lattice.site_count() {
        let c = lattice.coord(x);
        writeln!(
            sites,
            "{x},{},{},{},{},{},{}",
            c[0],
            c[1],
            c[2],
            st.pinned[x],
            float(st.mean_s[x]),
            float(st.stderr[x])
        )
        .unwrap();
    }
    match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            sink.emit("fk_mc_sites.csv", &sites)?;
            sink.emit("fk_mc_summary.json", &json(&summary)?)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                summary: McSummary<'a>,
                mean_s: &'a [f64],
                stderr: &'a [f64],
                pinned: &'a [bool],
            }
            let full = Full {
                summary,
                mean_s: &st.mean_s,
                stderr: &st.stderr,
                pinned: &st.pinned,
            };
            sink.emit("fk_mc.json", &json(&full)?)?;
        }
    }
    Ok(DONE)
}

pub fn interface_scan(a: &InterfaceArgs, sink: &mut Sink) -> Result<Outcome, CliError> {
    if a.height == 0 {
        return Err(CliError::Usage("height must be positive".into()));
    }
    let budget = SolverBudget {
        seed: a.seed,
        ..SolverBudget::default()
    };
    let rows = gap_scan_with(&a.delta.0, &a.width.0, a.height, a.filling, a.periodic, &budget);
    let format = a.output.format.unwrap_or(Format::Csv);
    let body = match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Table<'a> {
                note: &'a str,
                filling: String,
                periodic_transverse: bool,
                rows: &'a [xxzfk::interface::GapRow],
            }
            json(&Table {
                note: WIDTH_NOTE,
                filling: a.filling.to_string(),
                periodic_transverse: a.periodic,
                rows: &rows,
            })?
        }
        Format::Csv => {
            let mut s = format!("# {WIDTH_NOTE}\ndelta,width,height,n,lambda1,lambda2,gap,method,residual,error\n");
            for r in &rows {
                let n = r.n.map(|n| n.to_string()).unwrap_or_default();
                match &r.outcome {
                    Ok(g) => writeln!(
                        s,
                        "{},{},{},{},{},{},{},{},{},",
                        float(r.delta),
                        r.width,
                        r.height,
                        n,
                        float(g.lambda1),
                        float(g.lambda2),
                        float(g.gap),
                        g.method.label(),
                        float(g.residual)
                    ),
                    Err(e) => writeln!(
                        s,
                        "{},{},{},{},,,,,,{}",
                        float(r.delta),
                        r.width,
                        r.height,
                        n,
                        csv_field(e)
                    ),
                }
                .unwrap();
            }
            s
        }
    };
    sink.emit(&format!("interface_scan.{}", extension(format)), &body)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        eprintln!("{failed} of {} scan points failed", rows.len());
    }
    Ok(Outcome { ok: failed == 0 })
}

const WIDTH_NOTE: &str = "strip width is a qualitative stand-in for the interface extent";
