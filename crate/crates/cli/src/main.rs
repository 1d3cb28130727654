//! `xxzfk` command-line front end.
//!
//! Exit status: 0 on success, 1 when a computation fails, 2 on usage errors.
//! With `--out DIR` every run writes its data files and a manifest with
//! their SHA-256 digests; `xxzfk replay DIR/<command>.manifest.json` reruns
//! it and compares the digests.

mod args;
mod commands;
mod output;

use args::{Cli, Command, FkCommand, OutputArgs};
use clap::Parser;
use commands::{CliError, Outcome};
use output::{sha256_hex, RunManifest, Sink};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Replay { manifest } => replay(&manifest),
        command => run(command, &argv[1..], None),
    };
    match result {
        Ok(Outcome { ok: true }) => ExitCode::SUCCESS,
        Ok(Outcome { ok: false }) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Name, output flags, parameters and seed of a data-producing command.
fn describe(command: &Command) -> (&'static str, &OutputArgs, serde_json::Value, Option<u64>) {
    let v = |x: &dyn erased::Ser| x.value();
    match command {
        Command::Spectrum(a) => ("spectrum", &a.output, v(a), Some(a.seed)),
        Command::DropletVerify(a) => ("droplet-verify", &a.output, v(a), Some(a.seed)),
        Command::KinkCheck(a) => ("kink-check", &a.output, v(a), None),
        Command::InterfaceScan(a) => ("interface-scan", &a.output, v(a), Some(a.seed)),
        Command::Fk { command } => match command {
            FkCommand::Ground(a) => ("fk-ground", &a.output, v(a), None),
            FkCommand::Checkerboard(a) => ("fk-checkerboard", &a.output, v(a), None),
            FkCommand::Coupling(a) => ("fk-coupling", &a.output, v(a), None),
            FkCommand::Mc(a) => ("fk-mc", &a.output, v(a), Some(a.seed)),
        },
        Command::Replay { .. } => unreachable!("replay is dispatched separately"),
    }
}

mod erased {
    pub trait Ser {
        fn value(&self) -> serde_json::Value;
    }

    impl<T: serde::Serialize> Ser for T {
        fn value(&self) -> serde_json::Value {
            serde_json::to_value(self).expect("arguments serialize")
        }
    }
}

/// Run `command`; `out_override` replaces the `--out` directory.
fn run(command: Command, raw_args: &[String], out_override: Option<&Path>) -> Result<Outcome, CliError> {
    let (name, output, params, seed) = describe(&command);
    let dir = out_override.map(Path::to_path_buf).or_else(|| output.out.clone());
    let mut sink = Sink::new(dir)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
    let clock = Instant::now();
    let outcome = match &command {
        Command::Spectrum(a) => commands::spectrum(a, &mut sink),
        Command::DropletVerify(a) => commands::droplet_verify(a, &mut sink),
        Command::KinkCheck(a) => commands::kink_check(a, &mut sink),
        Command::InterfaceScan(a) => commands::interface_scan(a, &mut sink),
        Command::Fk { command } => match command {
            FkCommand::Ground(a) => commands::fk_ground(a, &mut sink),
            FkCommand::Checkerboard(a) => commands::fk_checkerboard(a, &mut sink),
            FkCommand::Coupling(a) => commands::fk_coupling(a, &mut sink),
            FkCommand::Mc(a) => commands::fk_mc(a, &mut sink),
        },
        Command::Replay { .. } => unreachable!("replay is dispatched separately"),
    }?;
    if let Some(dir) = sink.dir() {
        let manifest = RunManifest {
            command: name.to_string(),
            args: raw_args.to_vec(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: started,
            duration_seconds: clock.elapsed().as_secs_f64(),
            outputs: sink.written().to_vec(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.into()))? + "\n";
        std::fs::write(dir.join(RunManifest::file_name(name)), text)?;
    }
    Ok(outcome)
}

/// Drop any `--out` flag from recorded arguments.
fn strip_out(args: &[String]) -> Vec<String> {
    let mut kept = Vec::with_capacity(args.len());
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            kept.push(a.clone());
        }
    }
    kept
}

fn replay(manifest_path: &Path) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(manifest_path)?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("unreadable manifest: {e}")))?;
    let args = strip_out(&manifest.args);
    let argv: Vec<String> = std::iter::once("xxzfk".to_string()).chain(args.iter().cloned()).collect();
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::Usage(format!("recorded arguments no longer parse: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(CliError::Usage("a manifest cannot record a replay".into()));
    }
    let scratch = tempfile::tempdir()?;
    let fresh: PathBuf = scratch.path().join("replay");
    run(cli.command, &args, Some(&fresh))?;
    let mut ok = true;
    for f in &manifest.outputs {
        let now = std::fs::read(fresh.join(&f.file)).map(|b| sha256_hex(&b));
        match now {
            Ok(d) if d == f.sha256 => println!("match    {}  {}", f.sha256, f.file),
            Ok(d) => {
                ok = false;
                println!("MISMATCH {}  {} (recorded {})", d, f.file, f.sha256);
            }
            Err(e) => {
                ok = false;
                println!("MISSING  {}: {e}", f.file);
            }
        }
    }
    Ok(Outcome { ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_flags_are_removed() {
        let a: Vec<String> = ["spectrum", "--L", "4", "--out", "d", "--out=e", "--n", "1"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(strip_out(&a), vec!["spectrum", "--L", "4", "--n", "1"]);
    }
}
