//! Seeded identity suites behind `sympcode verify`.
//!
//! Every suite runs a fixed set of checks at pinned tolerances and returns a
//! machine-readable report; the process exits zero only if every check
//! passes. All randomness derives from the single `--seed` through labeled
//! substreams, so identical invocations produce byte-identical reports.

use serde::Serialize;

use sympcode::channels::{
    channel_from_choi, choi, random_tpcp, twirl_choi, twirl_conjugation_average, ErrorDistribution,
};
use sympcode::codes::build_code;
use sympcode::distill::{iterate_two_way, two_way_cat_round, BellDiagonalState};
use sympcode::error::Result;
use sympcode::exponent::{
    entropy_lower_bound_check, exponent_grid, exponent_line_search, threshold_rate,
};
use sympcode::fflin::{random_self_orthogonal, FVector};
use sympcode::fidelity::{
    average_fidelity_check, fe_pauli_closed_form, fidelity_inequalities_check,
};
use sympcode::scalar::max_abs_diff;
use sympcode::seeding::substream;
use sympcode::weyl::{bell_vector, commutation_phase, weyl, Dims, StateVector, WeylLabel};
use sympcode::{Matrix, C64};

use rand::Rng;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub max_discrepancy: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            suite: suite.to_string(),
            seed,
            checks,
            pass,
        }
    }
}

fn check(name: impl Into<String>, max_discrepancy: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        max_discrepancy,
        tolerance,
        pass: max_discrepancy <= tolerance,
    }
}

/// Boolean check rendered as a discrepancy of zero or one.
fn check_bool(name: impl Into<String>, ok: bool) -> CheckResult {
    CheckResult {
        name: name.into(),
        max_discrepancy: if ok { 0.0 } else { 1.0 },
        tolerance: 0.5,
        pass: ok,
    }
}

/// Optional single-configuration override for suites that sweep (d, n[, k]).
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub d: Option<u8>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub seeds: Option<usize>,
}

fn random_distribution(d: u8, m: usize, rng: &mut impl Rng) -> ErrorDistribution<f64> {
    let len = usize::from(d).pow(2 * m as u32);
    let mut w: Vec<f64> = (0..len).map(|_| rng.random_range(0.0f64..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    ErrorDistribution::new(d, m, w).expect("normalized by construction")
}

/// Commutation identity: N_y N_y′ = ω^{⟨y,y′⟩} N_y′ N_y entrywise to 1e-12,
/// dense matrices, ~500 random pairs spread over d ∈ {2,3,5}, n ≤ 3.
pub fn suite_weyl(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let combos: Vec<(u8, usize)> = match (ov.d, ov.n) {
        (Some(d), Some(n)) => vec![(d, n)],
        _ => [2u8, 3, 5]
            .iter()
            .flat_map(|&d| (1..=3usize).map(move |n| (d, n)))
            .collect(),
    };
    let pairs_per_combo = ov.seeds.unwrap_or(504 / combos.len().max(1)).max(1);
    let mut rng = substream(seed, "suite.weyl");
    for (d, n) in combos {
        let dims = Dims::new(d, n)?;
        let total = dims.bipartite_dim();
        let mut max_defect = 0.0f64;
        for _ in 0..pairs_per_combo {
            let ya = WeylLabel::new(FVector::from_index(d, 2 * n, rng.random_range(0..total)));
            let yb = WeylLabel::new(FVector::from_index(d, 2 * n, rng.random_range(0..total)));
            let na = weyl::<f64>(&ya).mat;
            let nb = weyl::<f64>(&yb).mat;
            let e = commutation_phase(&ya, &yb)?;
            let lhs = &na * &nb;
            let phase = sympcode::scalar::root_of_unity::<f64>(d, i64::from(e));
            let rhs = (&nb * &na).map(|x| x * phase);
            max_defect = max_defect.max(max_abs_diff(&lhs, &rhs));
        }
        checks.push(check(
            format!("commutation identity d={d} n={n} ({pairs_per_combo} pairs)"),
            max_defect,
            1e-12,
        ));
    }
    Ok(SuiteReport::new("weyl", seed, checks))
}

/// Bell-basis orthonormality: the full Gram matrix equals the identity to
/// 1e-12, exhaustively for (d, n) ∈ {(2,1), (2,2), (3,1)}.
pub fn suite_bell(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let combos: Vec<(u8, usize)> = match (ov.d, ov.n) {
        (Some(d), Some(n)) => vec![(d, n)],
        _ => vec![(2, 1), (2, 2), (3, 1)],
    };
    let mut checks = Vec::new();
    for (d, n) in combos {
        let dims = Dims::new(d, n)?;
        let vectors: Vec<StateVector<f64>> = sympcode::weyl::all_labels(dims)
            .map(|y| bell_vector::<f64>(&y))
            .collect();
        let mut max_defect = 0.0f64;
        for (i, a) in vectors.iter().enumerate() {
            for (j, b) in vectors.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = a.overlap(b);
                max_defect = max_defect.max((got - C64::new(want, 0.0)).norm());
            }
        }
        checks.push(check(
            format!("Bell Gram matrix d={d} n={n}"),
            max_defect,
            1e-12,
        ));
    }
    Ok(SuiteReport::new("bell", seed, checks))
}

/// Discrete twirling: the d^{2n}-term conjugation average equals the
/// Bell-diagonal truncation entrywise to 1e-10 on random Choi states.
pub fn suite_twirl(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let combos: Vec<(u8, usize)> = match (ov.d, ov.n) {
        (Some(d), Some(n)) => vec![(d, n)],
        _ => vec![(2, 1), (2, 2), (3, 1)],
    };
    let states = ov.seeds.unwrap_or(20);
    let mut rng = substream(seed, "suite.twirl");
    let mut checks = Vec::new();
    for (d, n) in combos {
        let mut max_defect = 0.0f64;
        for _ in 0..states {
            let rank = rng.random_range(1..=3);
            let ch = random_tpcp::<f64>(d, n, rank, rng.random())?;
            let s = choi(&ch)?;
            let fast = twirl_choi(&s);
            let slow = twirl_conjugation_average(&s)?;
            max_defect = max_defect.max(max_abs_diff(&fast.mat, &slow.mat));
        }
        checks.push(check(
            format!("twirl average vs Bell diagonal d={d} n={n} ({states} states)"),
            max_defect,
            1e-10,
        ));
    }
    Ok(SuiteReport::new("twirl", seed, checks))
}

/// Choi round trip: rebuilding a channel from its Choi state reproduces the
/// Choi state to 1e-9 on random trace-preserving channels.
pub fn suite_choi(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let instances = ov.seeds.unwrap_or(50);
    let mut rng = substream(seed, "suite.choi");
    let mut max_defect = 0.0f64;
    for i in 0..instances {
        let (d, n) = match i % 3 {
            0 => (2, 1),
            1 => (2, 2),
            _ => (3, 1),
        };
        let rank = rng.random_range(1..=4);
        let ch = random_tpcp::<f64>(d, n, rank, rng.random())?;
        let s = choi(&ch)?;
        let back = channel_from_choi(&s)?;
        let s2 = choi(&back)?;
        max_defect = max_defect.max(max_abs_diff(&s.mat, &s2.mat));
    }
    let checks = vec![check(
        format!("Choi reconstruction round trip ({instances} channels)"),
        max_defect,
        1e-9,
    )];
    Ok(SuiteReport::new("choi", seed, checks))
}

/// Exact coset-sum law for Weyl channels on random codes and distributions,
/// plus the analytic cat-code bit-flip instance.
pub fn suite_coset_law(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let instances = ov.seeds.unwrap_or(50);
    let mut rng = substream(seed, "suite.coset_law");
    let mut checks = Vec::new();

    let mut combos: Vec<(u8, usize, usize)> = Vec::new();
    match (ov.d, ov.n, ov.k) {
        (Some(d), Some(n), Some(k)) => combos.push((d, n, k)),
        _ => {
            for d in [2u8, 3] {
                for n in 1..=3usize {
                    for k in 0..=n {
                        combos.push((d, n, k));
                    }
                }
            }
        }
    }
    let mut max_defect = 0.0f64;
    for i in 0..instances {
        let (d, n, k) = combos[i % combos.len()];
        let l = random_self_orthogonal(n, k, d, rng.random())?;
        let code = build_code::<f64>(&l, rng.random())?;
        let p = random_distribution(d, n, &mut rng);
        let report = fe_pauli_closed_form(&code, &p)?;
        max_defect = max_defect.max(report.discrepancy);
    }
    checks.push(check(
        format!("coset-sum law on random codes ({instances} instances)"),
        max_defect,
        1e-10,
    ));

    // Analytic instance: cat code under independent bit flips has fidelity
    // 1 − p for every syndrome.
    let cat = sympcode::distill::cat_code::<f64>();
    let mut max_defect = 0.0f64;
    for p in [0.0f64, 0.1, 0.3] {
        let dist = ErrorDistribution::<f64>::bit_flip(p)?.power(2)?;
        let report = fe_pauli_closed_form(&cat, &dist)?;
        max_defect = max_defect.max((report.simulated - (1.0 - p)).abs());
        max_defect = max_defect.max(report.discrepancy);
        for row in report.per_syndrome.values() {
            max_defect = max_defect.max((row - (1.0 - p)).abs());
        }
    }
    checks.push(check(
        "cat code bit-flip fidelity equals 1 - p",
        max_defect,
        1e-10,
    ));
    Ok(SuiteReport::new("coset-law", seed, checks))
}

/// Syndrome-averaged law for arbitrary channels: the average fidelity equals
/// the twirled-error coset sum per relative syndrome (1e-9), and the summed
/// version matches the correctable-set probability.
pub fn suite_average_law(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let mut rng = substream(seed, "suite.average_law");
    let mut checks = Vec::new();
    let configs: Vec<(u8, usize, usize, usize)> = match (ov.d, ov.n, ov.k) {
        (Some(d), Some(n), Some(k)) => vec![(d, n, k, ov.seeds.unwrap_or(20))],
        _ => vec![
            (2, 2, 1, ov.seeds.unwrap_or(20)),
            (2, 3, 1, ov.seeds.unwrap_or(5)),
            (2, 3, 2, ov.seeds.unwrap_or(5)),
        ],
    };
    for (d, n, k, count) in configs {
        let mut max_defect = 0.0f64;
        for _ in 0..count {
            let l = random_self_orthogonal(n, k, d, rng.random())?;
            let code = build_code::<f64>(&l, rng.random())?;
            let rank = rng.random_range(2..=4);
            let ch = random_tpcp::<f64>(d, n, rank, rng.random())?;
            let report = average_fidelity_check(&code, &ch)?;
            max_defect = max_defect.max(report.discrepancy);
        }
        checks.push(check(
            format!("average-fidelity law d={d} n={n} k={k} ({count} channels)"),
            max_defect,
            1e-9,
        ));
    }
    Ok(SuiteReport::new("average-law", seed, checks))
}

/// One-way protocol equivalence: the full bipartite protocol fidelity equals
/// the syndrome-averaged code fidelity to 1e-9.
pub fn suite_oneway(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let count = ov.seeds.unwrap_or(10);
    let mut rng = substream(seed, "suite.oneway");
    let mut max_defect = 0.0f64;
    for i in 0..count {
        let code = if i % 2 == 0 {
            sympcode::distill::cat_code::<f64>()
        } else {
            let l = random_self_orthogonal(2, 1, 2, rng.random())?;
            build_code::<f64>(&l, rng.random())?
        };
        let ch = random_tpcp::<f64>(2, 2, rng.random_range(2..=4), rng.random())?;
        let protocol = sympcode::distill::one_way_protocol(&ch, &code)?;
        let report = average_fidelity_check(&code, &ch)?;
        max_defect = max_defect.max((protocol - report.simulated).abs());
    }
    let checks = vec![check(
        format!("protocol fidelity equals syndrome average ({count} channels)"),
        max_defect,
        1e-9,
    )];
    Ok(SuiteReport::new("oneway", seed, checks))
}

/// Two-way round: density-matrix oracle vs label recurrence to 1e-10, plus
/// the Werner trajectory facts.
pub fn suite_twoway(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let count = ov.seeds.unwrap_or(100);
    let mut rng = substream(seed, "suite.twoway");
    let accept = vec![vec![0u8]];
    let mut max_defect = 0.0f64;
    for _ in 0..count {
        let mut w: Vec<f64> = (0..16).map(|_| rng.random_range(0.0f64..1.0)).collect();
        let total: f64 = w.iter().sum();
        w.iter_mut().for_each(|x| *x /= total);
        let state = BellDiagonalState::new(ErrorDistribution::new(2, 2, w)?)?;
        let round = two_way_cat_round(&state, &accept)?;
        max_defect = max_defect.max(round.oracle_discrepancy);
    }
    let mut checks = vec![check(
        format!("two-way oracle agreement ({count} Bell-diagonal inputs)"),
        max_defect,
        1e-10,
    )];

    let werner75 = BellDiagonalState::new(ErrorDistribution::werner(0.75)?)?;
    let traj = iterate_two_way(&werner75, 3, &accept, None)?;
    let increasing = traj
        .points
        .windows(2)
        .all(|w| w[1].fidelity > w[0].fidelity);
    checks.push(check_bool(
        "Werner F=0.75 fidelity strictly increases over 3 rounds",
        increasing,
    ));

    let werner25 = BellDiagonalState::new(ErrorDistribution::werner(0.25)?)?;
    let traj = iterate_two_way(&werner25, 3, &accept, None)?;
    let not_increasing = traj.points.last().unwrap().fidelity <= traj.points[0].fidelity + 1e-9;
    checks.push(check_bool(
        "Werner F=0.25 fidelity does not increase",
        not_increasing,
    ));
    Ok(SuiteReport::new("twoway", seed, checks))
}

/// Exponent minimization: grid oracle vs tilted line search to 1e-3,
/// positivity exactly below the entropy threshold, monotonicity in the rate.
pub fn suite_exponent(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let mut rng = substream(seed, "suite.exponent");
    let mut checks = Vec::new();

    let agreements = ov.seeds.unwrap_or(25);
    let mut max_defect = 0.0f64;
    for _ in 0..agreements {
        let p = random_distribution(2, 1, &mut rng);
        let rate = rng.random_range(0.0f64..1.0);
        let grid = exponent_grid(rate, &p)?;
        let line = exponent_line_search(rate, &p)?;
        max_defect = max_defect.max((grid.value - line.value).abs());
    }
    checks.push(check(
        format!("grid oracle vs line search ({agreements} instances)"),
        max_defect,
        1e-3,
    ));

    let mut tested = 0usize;
    let mut ok = true;
    while tested < 50 {
        let p = random_distribution(2, 1, &mut rng);
        let thr = threshold_rate(&p);
        if !(0.1..0.9).contains(&thr) {
            continue;
        }
        tested += 1;
        let below = exponent_line_search(thr - 0.05, &p)?;
        let above = exponent_line_search(thr + 0.05, &p)?;
        ok &= below.value > 1e-6 && above.value.abs() < 1e-9;
    }
    checks.push(check_bool(
        "positivity matches threshold with margin 0.05 (50 instances)",
        ok,
    ));

    let mut monotone = true;
    for _ in 0..10 {
        let p = random_distribution(2, 1, &mut rng);
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let v = exponent_line_search(i as f64 / 10.0, &p)?.value;
            monotone &= v <= prev + 1e-9;
            prev = v;
        }
    }
    checks.push(check_bool(
        "exponent nonincreasing on an 11-point rate grid",
        monotone,
    ));
    Ok(SuiteReport::new("exponent", seed, checks))
}

/// Exact inequality sweeps: the threshold entropy bound and the
/// basis-average fidelity bound.
pub fn suite_inequalities(seed: u64, ov: Overrides) -> Result<SuiteReport> {
    let count = ov.seeds.unwrap_or(100);
    let mut rng = substream(seed, "suite.inequalities");
    let mut checks = Vec::new();

    let mut max_violation = 0.0f64;
    for i in 0..count {
        let m = 1 + i % 2;
        let p = random_distribution(2, m, &mut rng);
        let report = entropy_lower_bound_check(&p)?;
        max_violation = max_violation.max((report.lower_bound - report.threshold).max(0.0));
    }
    checks.push(check(
        format!("threshold entropy bound ({count} distributions)"),
        max_violation,
        1e-10,
    ));

    let mut max_violation = 0.0f64;
    for _ in 0..count {
        let ch = random_tpcp::<f64>(2, 2, rng.random_range(1..=3), rng.random())?;
        let dd = ch.dims.dim();
        let g = Matrix::from_fn(dd, 2, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let q = g.qr().q();
        let basis: Vec<StateVector<f64>> = (0..2)
            .map(|j| StateVector {
                dims: ch.dims,
                amps: q.column(j).into_owned(),
            })
            .collect();
        let report = fidelity_inequalities_check(&basis, &ch, rng.random())?;
        max_violation = max_violation
            .max((report.entanglement_fidelity - report.average_basis_fidelity).max(0.0));
    }
    checks.push(check(
        format!("entanglement vs basis-average fidelity ({count} subspaces)"),
        max_violation,
        1e-10,
    ));
    Ok(SuiteReport::new("inequalities", seed, checks))
}

/// Every suite in sequence.
pub fn suite_all(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        suite_weyl(seed, Overrides::default())?,
        suite_bell(seed, Overrides::default())?,
        suite_twirl(seed, Overrides::default())?,
        suite_choi(seed, Overrides::default())?,
        suite_coset_law(seed, Overrides::default())?,
        suite_average_law(seed, Overrides::default())?,
        suite_oneway(seed, Overrides::default())?,
        suite_twoway(seed, Overrides::default())?,
        suite_exponent(seed, Overrides::default())?,
        suite_inequalities(seed, Overrides::default())?,
    ])
}

pub fn run_suite(name: &str, seed: u64, ov: Overrides) -> Result<Vec<SuiteReport>> {
    match name {
        "weyl" => Ok(vec![suite_weyl(seed, ov)?]),
        "bell" => Ok(vec![suite_bell(seed, ov)?]),
        "twirl" => Ok(vec![suite_twirl(seed, ov)?]),
        "choi" => Ok(vec![suite_choi(seed, ov)?]),
        "coset-law" => Ok(vec![suite_coset_law(seed, ov)?]),
        "average-law" => Ok(vec![suite_average_law(seed, ov)?]),
        "oneway" => Ok(vec![suite_oneway(seed, ov)?]),
        "twoway" => Ok(vec![suite_twoway(seed, ov)?]),
        "exponent" => Ok(vec![suite_exponent(seed, ov)?]),
        "inequalities" => Ok(vec![suite_inequalities(seed, ov)?]),
        "all" => suite_all(seed),
        other => Err(sympcode::Error::InvalidParameter(format!(
            "unknown suite {other:?}; expected weyl, bell, twirl, choi, coset-law, \
             average-law, oneway, twoway, exponent, inequalities or all"
        ))),
    }
}
