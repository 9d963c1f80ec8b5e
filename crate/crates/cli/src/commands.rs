//! Subcommand implementations, kept CLI-framework-free so the integration
//! tests drive exactly what the binary runs.

use std::path::Path;

use serde::Serialize;
use serde_json::json;

use sympcode::channels::{bell_overlaps, choi, weyl_channel, ErrorDistribution};
use sympcode::codes::TransversalPolicy;
use sympcode::distill::{iterate_two_way, BellDiagonalState};
use sympcode::error::{Error, Result};
use sympcode::exponent::{
    exponent, exponent_grid, exponent_line_search, threshold_rate, ExponentMethod,
};
use sympcode::fidelity::{average_fidelity_check, fe_pauli_closed_form};
use sympcode::formats::{
    read_json, ChannelFile, CodeBundleFile, DistributionFile, FidelityReportFile, SubspaceFile,
};
use sympcode::{Channel, CodeFamily, Distribution};

use crate::suites::{run_suite, Overrides, SuiteReport};

/// Run a verify suite; the boolean is the process-level pass flag.
pub fn cmd_verify(suite: &str, seed: u64, ov: Overrides) -> Result<(serde_json::Value, bool)> {
    let reports: Vec<SuiteReport> = run_suite(suite, seed, ov)?;
    let pass = reports.iter().all(|r| r.pass);
    let value = json!({
        "seed": seed,
        "suites": reports,
        "pass": pass,
    });
    Ok((value, pass))
}

/// Build a code bundle from a subspace literal.
pub fn cmd_codegen(
    subspace_path: &Path,
    seed: u64,
    policy: &str,
    dist_path: Option<&Path>,
    include_vectors: bool,
) -> Result<CodeBundleFile> {
    let subspace: SubspaceFile = read_json(subspace_path)?;
    let l = subspace.to_subspace()?;
    let mut code: CodeFamily = sympcode::codes::build_code(&l, seed)?;
    match (policy, dist_path) {
        ("lexicographic", _) => {
            code.choose_transversal(TransversalPolicy::Lexicographic)?;
        }
        ("most-likely", Some(p)) => {
            let dist: DistributionFile = read_json(p)?;
            let dist = dist.to_distribution()?;
            code.choose_transversal(TransversalPolicy::MostLikely(&dist))?;
        }
        ("most-likely", None) => {
            return Err(Error::InvalidParameter(
                "--policy most-likely requires --dist".into(),
            ));
        }
        (other, _) => {
            return Err(Error::InvalidParameter(format!(
                "unknown transversal policy {other:?}"
            )));
        }
    }
    Ok(CodeBundleFile::from_code(&code, seed, include_vectors))
}

fn load_code(path: &Path) -> Result<CodeFamily> {
    let bundle: CodeBundleFile = read_json(path)?;
    bundle.to_code()
}

/// A channel either from a file or as an n-fold bit-flip product.
pub enum ChannelSource<'a> {
    File(&'a Path),
    BitFlip(f64),
}

fn load_channel(source: &ChannelSource<'_>, code: &CodeFamily) -> Result<Channel> {
    match source {
        ChannelSource::File(path) => {
            let file: ChannelFile = read_json(path)?;
            let ch = file.to_channel()?;
            if ch.dims != code.dims() {
                return Err(Error::Dimension(format!(
                    "channel is d={} n={}, code is d={} n={}",
                    ch.dims.d(),
                    ch.dims.n(),
                    code.dims().d(),
                    code.dims().n()
                )));
            }
            Ok(ch)
        }
        ChannelSource::BitFlip(p) => {
            if code.dims().d() != 2 {
                return Err(Error::InvalidParameter(
                    "--bitflip requires a qubit code".into(),
                ));
            }
            let dist = ErrorDistribution::<f64>::bit_flip(*p)?.power(code.n())?;
            weyl_channel(&dist)
        }
    }
}

#[derive(Serialize)]
pub struct FidelityOutput {
    /// "weyl-exact" when the channel's Choi state is Bell-diagonal and the
    /// exact per-component law applies, otherwise "average".
    pub mode: String,
    pub channel_bell_diagonal: bool,
    pub report: FidelityReportFile,
}

/// Fidelity of a code on a channel: the exact coset law for Weyl channels,
/// the syndrome-averaged law otherwise.
pub fn cmd_fidelity(code_path: &Path, source: &ChannelSource<'_>) -> Result<FidelityOutput> {
    let code = load_code(code_path)?;
    let ch = load_channel(source, &code)?;
    let s = choi(&ch)?;
    let overlaps = bell_overlaps(&s);
    let diag_total: f64 = overlaps.iter().sum();
    let bell_diagonal = (diag_total - 1.0).abs() < 1e-10 && {
        // Unit diagonal mass plus PSD means the off-diagonal part vanishes.
        let tw = sympcode::channels::twirl_choi(&s);
        sympcode::scalar::max_abs_diff(&tw.mat, &s.mat) < 1e-10
    };
    let report = if bell_diagonal {
        let dist = Distribution::new(code.dims().d(), code.n(), overlaps)?;
        fe_pauli_closed_form(&code, &dist)?
    } else {
        average_fidelity_check(&code, &ch)?
    };
    Ok(FidelityOutput {
        mode: if bell_diagonal {
            "weyl-exact".into()
        } else {
            "average".into()
        },
        channel_bell_diagonal: bell_diagonal,
        report: FidelityReportFile::from_report(&report),
    })
}

/// CSV sweep of the bit-flip parameter: one row per p.
pub fn cmd_fidelity_sweep(code_path: &Path, lo: f64, hi: f64, steps: usize) -> Result<String> {
    if steps < 2 || hi < lo {
        return Err(Error::InvalidParameter(
            "sweep needs at least two steps and lo <= hi".into(),
        ));
    }
    let code = load_code(code_path)?;
    let mut csv = String::from("p,simulated,formula,discrepancy\n");
    for i in 0..steps {
        let p = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let dist = ErrorDistribution::<f64>::bit_flip(p)?.power(code.n())?;
        let report = fe_pauli_closed_form(&code, &dist)?;
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_float(p),
            fmt_float(report.simulated),
            fmt_float(report.formula),
            fmt_float(report.discrepancy)
        ));
    }
    Ok(csv)
}

fn fmt_float(x: f64) -> String {
    // Shortest round-trip formatting, stable across runs.
    let mut s = format!("{x}");
    if !s.contains('.') && !s.contains('e') && !s.contains("inf") && !s.contains("NaN") {
        s.push_str(".0");
    }
    s
}

fn parse_accept(spec: &str) -> Result<Vec<Vec<u8>>> {
    spec.split(',')
        .map(|token| {
            let token = token.trim();
            if token.is_empty() {
                return Err(Error::InvalidParameter("empty accept label".into()));
            }
            token
                .chars()
                .map(|c| {
                    c.to_digit(10).map(|d| d as u8).ok_or_else(|| {
                        Error::InvalidParameter(format!("bad accept label {token:?}"))
                    })
                })
                .collect()
        })
        .collect()
}

/// Two-way distillation trajectory from a Werner input.
pub fn cmd_distill(
    werner_fidelity: f64,
    rounds: usize,
    accept_spec: &str,
    final_code_path: Option<&Path>,
) -> Result<serde_json::Value> {
    let accept = parse_accept(accept_spec)?;
    let state = BellDiagonalState::new(ErrorDistribution::werner(werner_fidelity)?)?;
    let final_code = final_code_path.map(load_code).transpose()?;
    let traj = iterate_two_way(&state, rounds, &accept, final_code.as_ref())?;
    let points: Vec<_> = traj
        .points
        .iter()
        .map(|p| {
            json!({
                "round": p.round,
                "fidelity": p.fidelity,
                "success_prob": p.success_probability,
                "yield": p.expected_yield,
            })
        })
        .collect();
    let final_stage = traj.final_stage.map(|f| {
        json!({
            "n": f.n,
            "k": f.k,
            "fidelity": f.fidelity,
            "yield": f.expected_yield,
        })
    });
    Ok(json!({
        "input_werner": werner_fidelity,
        "accept": accept_spec,
        "points": points,
        "final_stage": final_stage,
    }))
}

/// Exponent evaluation with optional grid/line cross agreement.
pub fn cmd_exponent(
    dist_path: &Path,
    rate: f64,
    m_check: Option<usize>,
    method: &str,
) -> Result<serde_json::Value> {
    let file: DistributionFile = read_json(dist_path)?;
    let p = file.to_distribution()?;
    if let Some(m) = m_check {
        if m != p.digits() {
            return Err(Error::InvalidParameter(format!(
                "--m {m} does not match the distribution file (m = {})",
                p.digits()
            )));
        }
    }
    let threshold = threshold_rate(&p);
    let (result, agreement) = match method {
        "grid" => (exponent_grid(rate, &p)?, None),
        "line" => (exponent_line_search(rate, &p)?, None),
        "both" => {
            let line = exponent_line_search(rate, &p)?;
            if p.len() <= 4 {
                let grid = exponent_grid(rate, &p)?;
                let gap = (grid.value - line.value).abs();
                let winner = if gap > 1e-3 { grid } else { line };
                (winner, Some(gap))
            } else {
                (line, None)
            }
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown method {other:?}; expected grid, line or both"
            )));
        }
    };
    let argmin: std::collections::BTreeMap<String, f64> = result
        .argmin
        .iter()
        .filter(|(_, w)| *w > 0.0)
        .map(|(v, w)| (v.label(), w))
        .collect();
    Ok(json!({
        "rate": rate,
        "value": result.value,
        "threshold": threshold,
        "argmin": argmin,
        "method": match result.method {
            ExponentMethod::BruteGrid => "grid",
            ExponentMethod::TiltedLineSearch => "line",
        },
        "method_agreement": agreement,
    }))
}

/// CSV sweep of the exponent over a rate grid.
pub fn cmd_exponent_sweep(
    dist_path: &Path,
    lo: f64,
    hi: f64,
    steps: usize,
    method: &str,
) -> Result<String> {
    if steps < 2 || hi < lo {
        return Err(Error::InvalidParameter(
            "sweep needs at least two steps and lo <= hi".into(),
        ));
    }
    let file: DistributionFile = read_json(dist_path)?;
    let p = file.to_distribution()?;
    let threshold = threshold_rate(&p);
    let mut csv = String::from("rate,value,threshold\n");
    for i in 0..steps {
        let rate = lo + (hi - lo) * i as f64 / (steps - 1) as f64;
        let result = match method {
            "grid" => exponent_grid(rate, &p)?,
            "line" => exponent_line_search(rate, &p)?,
            "both" => exponent(rate, &p, None)?,
            other => {
                return Err(Error::InvalidParameter(format!("unknown method {other:?}")));
            }
        };
        csv.push_str(&format!(
            "{},{},{}\n",
            fmt_float(rate),
            fmt_float(result.value),
            fmt_float(threshold)
        ));
    }
    Ok(csv)
}
