//! `qhe`: drive the protocol simulations from the command line.
//!
//! Exit codes: 0 when everything verified, 1 on a protocol or verification
//! failure, 2 on a usage error.

mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use qhe_core::bits::BitString;
use qhe_core::circuits::parse_circuit_annotated;
use qhe_core::pauli_crypto::PauliKey;
use qhe_core::protocols::{run_protocol1, run_protocol2, table2, Protocol1Config};
use qhe_core::statevector::{StateVector, STATE_TOL};
use qhe_core::{selftest, QheError};

use report::{emit, render_runs, render_suites, render_table2, Format, RunReport};

#[derive(Parser, Debug)]
#[command(
    name = "qhe",
    version,
    about = "Quantum homomorphic evaluation protocol simulator"
)]
struct Cli {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Blind two-qubit Grover search with a key center.
    Search {
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Gadget outcomes, one bit per gadget.
        #[arg(long = "script-c")]
        script_c: Option<String>,
        /// Encryption key as x then z: 4 bits (data wires) or 6 bits (all wires).
        #[arg(long)]
        ek: Option<String>,
        /// Gadget secrets as y then d, one bit each per gadget.
        #[arg(long)]
        evk: Option<String>,
    },
    /// Replay the five recorded blind-search runs.
    Table2,
    /// Compact evaluation of a Clifford circuit with a delegated key search.
    Clifford {
        #[arg(long)]
        circuit: PathBuf,
        /// Basis-state bits, or `uniform`.
        #[arg(long, default_value = "uniform")]
        input: String,
        /// Number of encrypted (trailing) wires; defaults to all wires.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run the invariant suites.
    Selftest {
        /// Shorthand for `--format json`.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Core(#[from] QheError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn usage(e: QheError) -> CliError {
    CliError::Usage(e.to_string())
}

fn parse_bits(flag: &str, s: &str) -> Result<BitString, CliError> {
    s.parse::<BitString>()
        .map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
}

fn search_config(
    target: &str,
    script_c: Option<&str>,
    ek: Option<&str>,
    evk: Option<&str>,
) -> Result<Protocol1Config, CliError> {
    let mut cfg = Protocol1Config::new(parse_bits("target", target)?, 0);
    if cfg.m != 2 {
        return Err(CliError::Usage(format!(
            "--target must have 2 bits, got {}",
            cfg.m
        )));
    }
    let gadgets = 7;
    if let Some(s) = script_c {
        let c = parse_bits("script-c", s)?;
        if c.len() != gadgets {
            return Err(CliError::Usage(format!(
                "--script-c has {} bits but the circuit has {gadgets} gadgets",
                c.len()
            )));
        }
        cfg.scripted_c = Some(c);
    }
    if let Some(s) = ek {
        let bits = parse_bits("ek", s)?;
        if bits.len() != 4 && bits.len() != 6 {
            return Err(CliError::Usage(format!(
                "--ek needs 4 or 6 bits (x then z), got {}",
                bits.len()
            )));
        }
        cfg.forced_ek = Some(PauliKey::from_concat(&bits).map_err(usage)?);
    }
    if let Some(s) = evk {
        let bits = parse_bits("evk", s)?;
        if bits.len() != 2 * gadgets {
            return Err(CliError::Usage(format!(
                "--evk needs {} bits (y then d), got {}",
                2 * gadgets,
                bits.len()
            )));
        }
        cfg.forced_yd = Some((bits.slice(0, gadgets), bits.slice(gadgets, 2 * gadgets)));
    }
    Ok(cfg)
}

fn ms_since(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn cmd_search(cli: &Cli, cfg: Protocol1Config, trials: usize) -> Result<(String, bool), CliError> {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let rows = (0..trials)
        .into_par_iter()
        .map(|i| {
            let seed = cli.seed.wrapping_add(i as u64);
            let start = Instant::now();
            let r = run_protocol1(&Protocol1Config {
                seed,
                ..cfg.clone()
            })?;
            Ok(RunReport::from_search(seed, i, &r, ms_since(start)))
        })
        .collect::<Result<Vec<_>, QheError>>()
        .map_err(|e| match e {
            QheError::ImpossibleOutcome { .. } => CliError::Failed(e.to_string()),
            QheError::InvalidKey(_) | QheError::LengthMismatch { .. } => usage(e),
            other => CliError::Core(other),
        })?;
    let ok = rows.iter().all(|r| r.verified);
    Ok((render(render_runs(&rows, cli.format))?, ok))
}

fn cmd_table2(cli: &Cli) -> Result<(String, bool), CliError> {
    let checks = table2::check_all()?;
    let ok = checks.iter().all(|c| c.passed());
    Ok((render(render_table2(&checks, cli.format))?, ok))
}

fn cmd_clifford(
    cli: &Cli,
    path: &PathBuf,
    input: &str,
    n: Option<usize>,
) -> Result<(String, bool), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("--circuit {}: {e}", path.display())))?;
    let basis = if input == "uniform" {
        None
    } else {
        Some(parse_bits("input", input)?)
    };
    let parsed = parse_circuit_annotated(&text, basis.as_ref().map(|b| b.len()))
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parsed
        .ensure_clifford()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let circuit = parsed.circuit;
    let w = circuit.num_wires();
    let plain = match &basis {
        Some(b) => StateVector::new_basis_state(w, b.as_slice()).map_err(usage)?,
        None => StateVector::new_uniform(w).map_err(usage)?,
    };
    let n = n.unwrap_or(w);
    let start = Instant::now();
    let r = run_protocol2(&circuit, &plain, n, cli.seed).map_err(|e| match e {
        QheError::TooLarge(_) | QheError::EmptyRegister => usage(e),
        other => CliError::Core(other),
    })?;
    let fidelity = r.fidelity_against(&circuit, &plain)?;
    let verified = fidelity >= 1.0 - STATE_TOL;
    let row = RunReport {
        mode: "clifford",
        seed: cli.seed,
        trial: 0,
        ek: r.ek.to_concat().to_string(),
        y: String::new(),
        d: String::new(),
        c: String::new(),
        encrypted_result: String::new(),
        dk: r.dk.to_concat().to_string(),
        decrypted: String::new(),
        verified,
        fidelity: Some(fidelity),
        attempts: Some(r.attempts),
        elapsed_ms: ms_since(start),
    };
    Ok((render(render_runs(&[row], cli.format))?, verified))
}

fn cmd_selftest(cli: &Cli, json: bool) -> Result<(String, bool), CliError> {
    let suites = selftest::run_all(cli.seed)?;
    let ok = suites.iter().all(|s| s.passed);
    let format = if json { Format::Json } else { cli.format };
    Ok((render(render_suites(&suites, format))?, ok))
}

fn render(r: Result<String, Box<dyn std::error::Error>>) -> Result<String, CliError> {
    r.map_err(|e| CliError::Io(e.to_string()))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let (text, ok) = match &cli.command {
        Command::Search {
            target,
            trials,
            script_c,
            ek,
            evk,
        } => {
            let cfg = search_config(target, script_c.as_deref(), ek.as_deref(), evk.as_deref())?;
            cmd_search(cli, cfg, *trials)?
        }
        Command::Table2 => cmd_table2(cli)?,
        Command::Clifford { circuit, input, n } => cmd_clifford(cli, circuit, input, *n)?,
        Command::Selftest { json } => cmd_selftest(cli, *json)?,
    };
    emit(&text, cli.out.as_deref()).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
