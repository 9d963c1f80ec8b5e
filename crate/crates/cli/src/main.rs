use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use sympcode_cli::commands::{
    cmd_codegen, cmd_distill, cmd_exponent, cmd_exponent_sweep, cmd_fidelity, cmd_fidelity_sweep,
    cmd_verify, ChannelSource,
};
use sympcode_cli::suites::Overrides;

/// Prime-dimension qudit symplectic codes: identity verification, fidelity
/// evaluation, entanglement distillation, and random-coding exponents.
///
/// The SYMPCODE_MAX_DIM environment variable raises the default guard of
/// d^(2n) <= 4096 on dense bipartite objects.
#[derive(Parser)]
#[command(name = "sympcode", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded identity suite and report per-check discrepancies.
    Verify {
        /// Suite: weyl, bell, twirl, choi, coset-law, average-law, oneway,
        /// twoway, exponent, inequalities or all.
        #[arg(long)]
        suite: String,
        /// Master seed; every random choice derives from it.
        #[arg(long)]
        seed: u64,
        /// Override the per-configuration instance count.
        #[arg(long)]
        seeds: Option<usize>,
        /// Restrict sweeping suites to one digit dimension d.
        #[arg(long)]
        d: Option<u8>,
        /// Restrict sweeping suites to one digit count n.
        #[arg(long)]
        n: Option<usize>,
        /// Restrict code suites to one logical digit count k.
        #[arg(long)]
        k: Option<usize>,
        /// Also write the JSON report to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate code fidelity on a channel (exact coset law for Weyl
    /// channels, syndrome-averaged law otherwise).
    Fidelity {
        /// Code bundle produced by `codegen`.
        #[arg(long)]
        code: PathBuf,
        /// Channel file (kraus operators as JSON).
        #[arg(long, conflicts_with = "bitflip")]
        channel: Option<PathBuf>,
        /// Independent bit-flip probability per digit instead of a file.
        #[arg(long)]
        bitflip: Option<f64>,
        /// Sweep the bit-flip parameter: lo:hi:steps, CSV output.
        #[arg(long)]
        sweep: Option<String>,
        /// Write sweep CSV here (default stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the two-way cat-code procedure on a Werner input.
    Distill {
        /// Initial Werner fidelity.
        #[arg(long = "input-werner")]
        input_werner: f64,
        #[arg(long)]
        rounds: usize,
        /// Comma-separated accepted relative syndromes, e.g. "0" or "0,1".
        #[arg(long, default_value = "0")]
        accept: String,
        /// Optional concluding one-way code bundle.
        #[arg(long = "final-code")]
        final_code: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-coding exponent of a stored error distribution.
    Exponent {
        /// Distribution file.
        #[arg(long)]
        dist: PathBuf,
        /// Rate in [0, 1].
        #[arg(long)]
        rate: Option<f64>,
        /// Consistency check against the file's digit count.
        #[arg(long)]
        m: Option<usize>,
        /// grid, line or both.
        #[arg(long, default_value = "both")]
        method: String,
        /// Sweep rates lo:hi:steps and emit CSV.
        #[arg(long = "rate-grid")]
        rate_grid: Option<String>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a code bundle from a subspace literal.
    Codegen {
        /// Subspace file: {"d":2,"n":2,"basis":[[0,1,0,1]]}.
        #[arg(long)]
        subspace: PathBuf,
        #[arg(long)]
        seed: u64,
        /// lexicographic or most-likely (the latter needs --dist).
        #[arg(long, default_value = "lexicographic")]
        policy: String,
        #[arg(long)]
        dist: Option<PathBuf>,
        /// Omit the dense basis vectors from the bundle.
        #[arg(long = "no-vectors")]
        no_vectors: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_range(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    anyhow::ensure!(parts.len() == 3, "expected lo:hi:steps, got {spec:?}");
    Ok((
        parts[0].parse().context("bad sweep lower bound")?,
        parts[1].parse().context("bad sweep upper bound")?,
        parts[2].parse().context("bad sweep step count")?,
    ))
}

fn print_ignoring_closed_pipe(text: &str) -> Result<()> {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(e.into()),
    }
}

fn emit(value: &serde_json::Value, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    print_ignoring_closed_pipe(&(text.clone() + "\n"))?;
    if let Some(path) = out {
        std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn emit_csv(csv: &str, path: Option<&PathBuf>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("writing {}", p.display()))?,
        None => print_ignoring_closed_pipe(csv)?,
    }
    Ok(())
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            suite,
            seed,
            seeds,
            d,
            n,
            k,
            out,
        } => {
            let ov = Overrides { d, n, k, seeds };
            let (value, pass) = cmd_verify(&suite, seed, ov)?;
            emit(&value, out.as_ref())?;
            Ok(pass)
        }
        Command::Fidelity {
            code,
            channel,
            bitflip,
            sweep,
            csv,
            out,
        } => {
            if let Some(spec) = sweep {
                let (lo, hi, steps) = parse_range(&spec)?;
                let table = cmd_fidelity_sweep(&code, lo, hi, steps)?;
                emit_csv(&table, csv.as_ref())?;
                return Ok(true);
            }
            let source = match (&channel, bitflip) {
                (Some(path), None) => ChannelSource::File(path),
                (None, Some(p)) => ChannelSource::BitFlip(p),
                _ => anyhow::bail!("provide exactly one of --channel or --bitflip"),
            };
            let output = cmd_fidelity(&code, &source)?;
            emit(&serde_json::to_value(&output)?, out.as_ref())?;
            Ok(true)
        }
        Command::Distill {
            input_werner,
            rounds,
            accept,
            final_code,
            out,
        } => {
            let value = cmd_distill(input_werner, rounds, &accept, final_code.as_deref())?;
            emit(&value, out.as_ref())?;
            Ok(true)
        }
        Command::Exponent {
            dist,
            rate,
            m,
            method,
            rate_grid,
            csv,
            out,
        } => {
            if let Some(spec) = rate_grid {
                let (lo, hi, steps) = parse_range(&spec)?;
                let table = cmd_exponent_sweep(&dist, lo, hi, steps, &method)?;
                emit_csv(&table, csv.as_ref())?;
                return Ok(true);
            }
            let rate = rate.context("--rate is required unless --rate-grid is given")?;
            let value = cmd_exponent(&dist, rate, m, &method)?;
            emit(&value, out.as_ref())?;
            Ok(true)
        }
        Command::Codegen {
            subspace,
            seed,
            policy,
            dist,
            no_vectors,
            out,
        } => {
            let bundle = cmd_codegen(&subspace, seed, &policy, dist.as_deref(), !no_vectors)?;
            emit(&serde_json::to_value(&bundle)?, out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
