//! Entanglement distillation built on symplectic codes.
//!
//! The one-way protocol simulates the full bipartite story: Alice measures
//! the conjugated code projectors on the reference half of the Choi state,
//! Bob runs the recovery map for her outcome, both apply relabeling
//! unitaries, and the fidelity to the maximally entangled target of
//! dimension d^k is averaged over outcomes. That number must equal the
//! syndrome-averaged code fidelity computed by the coset law — the protocol
//! and the code are the same object viewed twice.
//!
//! The two-way round uses the [[2,1]] cat code (stabilizer label span of
//! (0,1,0,1)): both parties measure the syndrome, keep outcomes in the
//! accept set, and undo the representative error. Bell-diagonal inputs stay
//! Bell-diagonal, so the round is tracked two independent ways — a full
//! 16×16 bipartite density-matrix simulation and an exact label-algebra
//! recurrence — and the two must agree to 1e-10.

use crate::channels::{choi, ErrorDistribution, KrausChannel};
use crate::codes::{build_code, SymplecticCodeFamily};
use crate::error::{Error, Result};
use crate::fflin::{expand_in_frame, label_index, syndrome_of, FSubspace, FVector};
use crate::scalar::{CMat, CVec, Real, C};
use crate::weyl::{bell_vector, Dims, WeylLabel};

/// A Bell-diagonal bipartite state Σ_y P(y)|Ψ_y⟩⟨Ψ_y|, tracked by its
/// weight distribution.
#[derive(Clone, Debug)]
pub struct BellDiagonalState<R: Real> {
    pub weights: ErrorDistribution<R>,
}

impl<R: Real> BellDiagonalState<R> {
    pub fn new(weights: ErrorDistribution<R>) -> Result<Self> {
        let total = weights.total().to64();
        if (total - 1.0).abs() > crate::scalar::scaled_tol::<R>(1e-12) {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { weights })
    }

    pub fn dims(&self) -> Result<Dims> {
        Dims::new(self.weights.modulus(), self.weights.digits())
    }

    /// Overlap with the ideal maximally entangled state: the zero-label
    /// weight.
    pub fn fidelity(&self) -> R {
        let d = self.weights.modulus();
        let m = self.weights.digits();
        self.weights.prob(&FVector::zero(d, 2 * m))
    }

    /// Dense bipartite density matrix Σ_y P(y)|Ψ_y⟩⟨Ψ_y|.
    pub fn dense(&self) -> Result<CMat<R>> {
        let dims = self.dims()?;
        dims.guard_bipartite()?;
        let side = dims.bipartite_dim();
        let mut rho = CMat::<R>::zeros(side, side);
        for (y, p) in self.weights.iter() {
            if p.to64() > 0.0 {
                let v = bell_vector::<R>(&WeylLabel::new(y));
                rho += (&v.amps * v.amps.adjoint()).map(|z| z.scale(p));
            }
        }
        Ok(rho)
    }

    /// Admit a general bipartite state by discrete twirling: only the Bell
    /// diagonal survives, which is exactly the state the two-way engine
    /// tracks. Bell-diagonal inputs pass through unchanged.
    pub fn from_bipartite(state: &crate::channels::ChoiState<R>) -> Result<Self> {
        let weights = crate::channels::bell_diagonal_weights(state);
        Self::new(ErrorDistribution::new_raw(
            state.dims.d(),
            state.dims.n(),
            weights,
        )?)
    }
}

/// The maximally entangled target d^{−k/2} Σ_u |dbar(0,u)⟩ ⊗ |bar(0,u)⟩ on
/// the bipartite space of the code.
fn entangled_target<R: Real>(code: &SymplecticCodeFamily<R>) -> CVec<R> {
    let dd = code.dims().dim();
    let k = code.k();
    let d = code.dims().d();
    let scale = R::from64(1.0 / (code.code_dim() as f64).sqrt());
    let zero_s = vec![0u8; code.n() - k];
    let mut target = CVec::<R>::zeros(dd * dd);
    for ui in 0..code.code_dim() {
        let u = crate::fflin::label_from_index(d, k, ui);
        let v = &code
            .basis_vector(&{
                let mut l = zero_s.clone();
                l.extend_from_slice(&u);
                l
            })
            .amps;
        for i in 0..dd {
            for j in 0..dd {
                target[i * dd + j] += (v[i].conj() * v[j]).scale(scale);
            }
        }
    }
    target
}

/// Alice/Bob relabeling unitaries for outcome s: Bob's side translates the
/// barred basis by −(s, 0), Alice's side is its complex conjugate.
fn relabel_pair<R: Real>(code: &SymplecticCodeFamily<R>, s: &[u8]) -> (CMat<R>, CMat<R>) {
    let mut pad = s.to_vec();
    pad.extend(std::iter::repeat_n(0u8, code.k()));
    let u_b = code
        .product_action(code.frame().h(), &pad)
        .adjoint()
        .dense();
    let u_a = u_b.map(|z| z.conj());
    (u_a, u_b)
}

/// Full bipartite simulation of the one-way symplectic distillation
/// protocol: returns the outcome-averaged fidelity to the d^k-dimensional
/// maximally entangled target. Equals the syndrome-averaged code fidelity
/// for the same channel.
pub fn one_way_protocol<R: Real>(b: &KrausChannel<R>, code: &SymplecticCodeFamily<R>) -> Result<R> {
    if b.dims != code.dims() {
        return Err(Error::Dimension(
            "channel dimensions do not match the code".into(),
        ));
    }
    let dd = code.dims().dim();
    let lambda = choi(b)?;
    let id = CMat::<R>::identity(dd, dd);
    let target = entangled_target(code);
    let mut fidelity = R::zero();
    for s in code.syndrome_labels() {
        let proj_alice = code.projector(&s).mat.map(|z| z.conj());
        let pa = proj_alice.kronecker(&id);
        let measured = &pa * &lambda.mat * pa.adjoint();
        let recovery = code.recovery(&s);
        let dd2 = dd * dd;
        let mut recovered = CMat::<R>::zeros(dd2, dd2);
        for (_, r) in &recovery.components {
            let lift = id.kronecker(r);
            recovered += &lift * &measured * lift.adjoint();
        }
        let (u_a, u_b) = relabel_pair(code, &s);
        let w = u_a.kronecker(&u_b);
        let relabeled = &w * recovered * w.adjoint();
        fidelity += (target.adjoint() * &relabeled * &target)[(0, 0)].re;
    }
    Ok(fidelity)
}

/// One accepted round of the two-way cat-code procedure.
#[derive(Clone, Debug)]
pub struct TwoWayRound<R: Real> {
    /// Accepted relative syndromes.
    pub accept: Vec<Vec<u8>>,
    /// Two-pair Bell-diagonal input.
    pub input: BellDiagonalState<R>,
    /// Post-selected single-pair Bell-diagonal output.
    pub output: BellDiagonalState<R>,
    /// Probability that the measured relative syndrome lands in the accept
    /// set.
    pub success_probability: R,
    /// Largest deviation between the density-matrix oracle and the
    /// label-algebra recurrence.
    pub oracle_discrepancy: f64,
}

/// The [[2,1]] cat-code subspace label span{(0,1,0,1)} over F_2^4.
pub fn cat_code_subspace() -> FSubspace {
    FSubspace::span(
        2,
        4,
        &[FVector::new(2, vec![0, 1, 0, 1]).expect("valid vector")],
    )
    .expect("valid span")
}

/// Build the cat code with the fixed internal seed used by the two-way
/// recursion.
pub fn cat_code<R: Real>() -> SymplecticCodeFamily<R> {
    build_code(&cat_code_subspace(), 0x2718).expect("cat code always builds")
}

/// Label-algebra recurrence for one round: classify every two-pair error
/// label by its relative syndrome and residual logical action.
fn recurrence<R: Real>(
    code: &SymplecticCodeFamily<R>,
    input: &ErrorDistribution<R>,
    accept: &[Vec<u8>],
) -> (Vec<R>, R) {
    let d = code.dims().d();
    let n = code.n();
    let k = code.k();
    let frame = code.frame();
    let accept_idx: std::collections::BTreeSet<usize> =
        accept.iter().map(|t| label_index(d, t)).collect();
    let mut out = vec![R::zero(); usize::from(d).pow(2 * k as u32)];
    let mut success = R::zero();
    for (y, p) in input.iter() {
        if p.to64() == 0.0 {
            continue;
        }
        let t = syndrome_of(&y, code.subspace().basis());
        if !accept_idx.contains(&label_index(d, &t)) {
            continue;
        }
        let residual = y.sub(code.transversal_rep(&t)).expect("dims match");
        let (w, z) = expand_in_frame(&residual, frame);
        // Residual logical operator X̄^{z_log} Z̄^{w_log} acts on the logical
        // pair as N_{(−z_log, w_log)} up to phase.
        let mut coords = Vec::with_capacity(2 * k);
        for i in n - k..n {
            coords.push((d - z[i] % d) % d);
            coords.push(w[i] % d);
        }
        let label = FVector::new(d, coords).expect("valid label");
        out[label.index()] += p;
        success += p;
    }
    (out, success)
}

/// Density-matrix oracle for one round: project, recover, relabel, extract
/// the logical pair, and read the Bell diagonal.
fn dense_round<R: Real>(
    code: &SymplecticCodeFamily<R>,
    input: &BellDiagonalState<R>,
    accept: &[Vec<u8>],
) -> Result<(Vec<R>, R, f64)> {
    let dims = code.dims();
    let dd = dims.dim();
    let rho = input.dense()?;
    let id = CMat::<R>::identity(dd, dd);
    let d = dims.d();
    let k = code.k();
    let code_dim = code.code_dim();
    let zero_s = vec![0u8; code.n() - k];

    // Extraction isometry onto the logical pair in the relabeled bases:
    // row (u,v) is the bra ⟨dbar(0,u)| ⊗ ⟨bar(0,v)|, and the reference-side
    // basis is the conjugate of the code basis.
    let mut extract = CMat::<R>::zeros(code_dim * code_dim, dd * dd);
    for ui in 0..code_dim {
        let u = crate::fflin::label_from_index(d, k, ui);
        let mut lu = zero_s.clone();
        lu.extend_from_slice(&u);
        let bar_u = code.basis_vector(&lu).amps.clone();
        for vi in 0..code_dim {
            let v = crate::fflin::label_from_index(d, k, vi);
            let mut lv = zero_s.clone();
            lv.extend_from_slice(&v);
            let bar_v = &code.basis_vector(&lv).amps;
            for i in 0..dd {
                for j in 0..dd {
                    extract[(ui * code_dim + vi, i * dd + j)] = bar_u[i] * bar_v[j].conj();
                }
            }
        }
    }

    let mut logical = CMat::<R>::zeros(code_dim * code_dim, code_dim * code_dim);
    let accept_set: std::collections::BTreeSet<Vec<u8>> = accept.iter().cloned().collect();
    for s in code.syndrome_labels() {
        let pa = code.projector(&s).mat.map(|z| z.conj()).kronecker(&id);
        let measured = &pa * &rho * pa.adjoint();
        let recovery = code.recovery(&s);
        let (u_a, u_b) = relabel_pair(code, &s);
        let w = u_a.kronecker(&u_b);
        for (t, r) in &recovery.components {
            if !accept_set.contains(t) {
                continue;
            }
            let lift = id.kronecker(r);
            let recovered = &lift * &measured * lift.adjoint();
            let relabeled = &w * recovered * w.adjoint();
            logical += &extract * relabeled * extract.adjoint();
        }
    }

    let success = logical.trace().re;
    let logical_dims = Dims::new(d, k)?;
    let mut weights = vec![R::zero(); usize::from(d).pow(2 * k as u32)];
    let mut off_diag = 0.0f64;
    for (yi, y) in crate::fflin::enumerate_vectors(d, 2 * k).enumerate() {
        let v = bell_vector::<R>(&WeylLabel::new(y));
        debug_assert_eq!(v.dims, logical_dims);
        weights[yi] = (v.amps.adjoint() * &logical * &v.amps)[(0, 0)].re;
        for y2 in crate::fflin::enumerate_vectors(d, 2 * k) {
            if y2.index() != yi {
                let v2 = bell_vector::<R>(&WeylLabel::new(y2));
                let cross: C<R> = (v.amps.adjoint() * &logical * &v2.amps)[(0, 0)];
                off_diag = off_diag.max(cross.norm().to64());
            }
        }
    }
    Ok((weights, success, off_diag))
}

/// One two-way round on a two-pair Bell-diagonal state with the cat code.
/// Both the 16×16 density-matrix oracle and the exact label recurrence run;
/// a disagreement beyond 1e-10 is an error.
pub fn two_way_cat_round<R: Real>(
    input: &BellDiagonalState<R>,
    accept: &[Vec<u8>],
) -> Result<TwoWayRound<R>> {
    if accept.is_empty() {
        return Err(Error::EmptyAcceptSet);
    }
    if input.weights.modulus() != 2 || input.weights.digits() != 2 {
        return Err(Error::Dimension(
            "the two-way round expects a two-pair qubit state (d = 2, n = 2)".into(),
        ));
    }
    let code = cat_code::<R>();
    for t in accept {
        if t.len() != 1 || t[0] >= 2 {
            return Err(Error::InvalidParameter(format!(
                "accept label {t:?} is not a 1-digit binary syndrome"
            )));
        }
    }

    let (rec_weights, rec_success) = recurrence(&code, &input.weights, accept);
    let (dm_weights, dm_success, off_diag) = dense_round(&code, input, accept)?;

    let mut disc = (rec_success.to64() - dm_success.to64()).abs().max(off_diag);
    for (a, b) in rec_weights.iter().zip(&dm_weights) {
        disc = disc.max((a.to64() - b.to64()).abs());
    }
    if disc > 1e-10 {
        return Err(Error::IdentityViolation(format!(
            "two-way oracle disagreement {disc:.3e} exceeds 1e-10"
        )));
    }

    if rec_success.to64() < 1e-15 {
        return Err(Error::InvalidParameter(
            "post-selection accepts with probability zero".into(),
        ));
    }
    let inv = R::one() / rec_success;
    let out = ErrorDistribution::new(2, 1, rec_weights.iter().map(|&w| w * inv).collect())?;
    Ok(TwoWayRound {
        accept: accept.to_vec(),
        input: input.clone(),
        output: BellDiagonalState::new(out)?,
        success_probability: rec_success,
        oracle_discrepancy: disc,
    })
}

/// One point of a distillation trajectory.
#[derive(Clone, Copy, Debug)]
pub struct TrajectoryPoint<R: Real> {
    pub round: usize,
    pub fidelity: R,
    pub success_probability: R,
    /// Expected surviving-pair fraction relative to the input supply.
    pub expected_yield: R,
}

/// Optional concluding one-way stage.
#[derive(Clone, Copy, Debug)]
pub struct FinalStage<R: Real> {
    pub n: usize,
    pub k: usize,
    pub fidelity: R,
    pub expected_yield: R,
}

#[derive(Clone, Debug)]
pub struct Trajectory<R: Real> {
    pub points: Vec<TrajectoryPoint<R>>,
    pub final_stage: Option<FinalStage<R>>,
}

/// The random-bilateral-rotation average: any single-pair Bell-diagonal
/// state becomes the isotropic (Werner) state with the same zero-label
/// weight. This is the symmetrization step of the recursive protocol; the
/// discrete Weyl twirl alone is a no-op on Bell-diagonal states and cannot
/// rebalance the undetected error type between rounds.
pub fn werner_twirl<R: Real>(state: &BellDiagonalState<R>) -> Result<BellDiagonalState<R>> {
    if state.weights.modulus() != 2 || state.weights.digits() != 1 {
        return Err(Error::Dimension(
            "the isotropic twirl tracks a single qubit pair (d = 2, m = 1)".into(),
        ));
    }
    BellDiagonalState::new(ErrorDistribution::werner(state.fidelity())?)
}

/// Iterate the two-way cat-code round on a single-pair Bell-diagonal state,
/// re-pairing survivors each round (adjacent pairing; the tracked marginal
/// is pairing-invariant) with the isotropic twirl between rounds, optionally
/// finishing with a one-way symplectic stage whose fidelity is the
/// correctable-coset probability of the product distribution.
///
/// Without the inter-round symmetrization the fixed syndrome direction stops
/// detecting the error type it leaves behind and the fidelity recursion
/// stalls; the twirl restores the cited recursive behavior while preserving
/// the per-round fidelity exactly.
pub fn iterate_two_way<R: Real>(
    p0: &BellDiagonalState<R>,
    rounds: usize,
    accept: &[Vec<u8>],
    final_code: Option<&SymplecticCodeFamily<R>>,
) -> Result<Trajectory<R>> {
    if p0.weights.modulus() != 2 || p0.weights.digits() != 1 {
        return Err(Error::Dimension(
            "two-way trajectories track a single qubit pair (d = 2, m = 1)".into(),
        ));
    }
    let mut state = p0.clone();
    let mut expected_yield = R::one();
    let mut points = vec![TrajectoryPoint {
        round: 0,
        fidelity: state.fidelity(),
        success_probability: R::one(),
        expected_yield,
    }];
    for round in 1..=rounds {
        let symmetrized = werner_twirl(&state)?;
        let joint = BellDiagonalState::new(symmetrized.weights.product(&symmetrized.weights)?)?;
        let result = two_way_cat_round(&joint, accept)?;
        expected_yield = expected_yield * result.success_probability * R::from64(0.5);
        state = result.output;
        points.push(TrajectoryPoint {
            round,
            fidelity: state.fidelity(),
            success_probability: result.success_probability,
            expected_yield,
        });
    }
    let final_stage = match final_code {
        None => None,
        Some(code) => {
            if code.dims().d() != 2 {
                return Err(Error::Dimension(
                    "the final one-way stage must be a qubit code".into(),
                ));
            }
            let n = code.n();
            let k = code.k();
            let product = state.weights.power(n)?;
            let fidelity = code.transversal().iter().fold(R::zero(), |acc, rep| {
                acc + product.coset_sum(rep, code.subspace())
            });
            let rate = R::from64(k as f64 / n as f64);
            Some(FinalStage {
                n,
                k,
                fidelity,
                expected_yield: expected_yield * rate,
            })
        }
    };
    Ok(Trajectory {
        points,
        final_stage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{random_tpcp, weyl_channel};
    use crate::fidelity::average_fidelity_check;
    use crate::scalar::max_abs_diff;

    fn accept_zero() -> Vec<Vec<u8>> {
        vec![vec![0]]
    }

    fn werner(f: f64) -> BellDiagonalState<f64> {
        BellDiagonalState::new(ErrorDistribution::werner(f).unwrap()).unwrap()
    }

    #[test]
    fn one_way_identity_channel_is_perfect() {
        let code = cat_code::<f64>();
        let ch = KrausChannel::identity(code.dims());
        let f = one_way_protocol(&ch, &code).unwrap();
        assert!((f - 1.0).abs() < 1e-11);
    }

    #[test]
    fn one_way_matches_coset_sum_for_bit_flip() {
        let code = cat_code::<f64>();
        for p in [0.05, 0.2] {
            let dist = ErrorDistribution::<f64>::bit_flip(p)
                .unwrap()
                .power(2)
                .unwrap();
            let ch = weyl_channel(&dist).unwrap();
            let f = one_way_protocol(&ch, &code).unwrap();
            assert!((f - (1.0 - p)).abs() < 1e-10, "p = {p}: got {f}");
        }
    }

    #[test]
    fn one_way_equals_average_fidelity_for_random_channels() {
        let code = cat_code::<f64>();
        for seed in 0..6 {
            let ch = random_tpcp::<f64>(2, 2, 3, 2000 + seed).unwrap();
            let protocol = one_way_protocol(&ch, &code).unwrap();
            let report = average_fidelity_check(&code, &ch).unwrap();
            assert!(
                (protocol - report.simulated).abs() < 1e-9,
                "seed {seed}: protocol {protocol} vs average {}",
                report.simulated
            );
        }
    }

    #[test]
    fn relabeling_fixes_the_maximally_entangled_vector() {
        // (Ū ⊗ U)|Ψ⟩ = |Ψ⟩ for the basis-change and translation unitaries.
        let code = cat_code::<f64>();
        let psi = bell_vector::<f64>(&WeylLabel::new(FVector::zero(2, 4)));
        let candidates = vec![code.basis_unitary(), {
            let (_, u_b) = relabel_pair(&code, &[1]);
            u_b
        }];
        for u in candidates {
            let w = u.map(|z| z.conj()).kronecker(&u);
            let out = &w * &psi.amps;
            assert!((out - &psi.amps).norm() < 1e-12);
        }
    }

    #[test]
    fn perfect_input_survives_the_round() {
        let delta: BellDiagonalState<f64> =
            BellDiagonalState::new(ErrorDistribution::delta(&FVector::zero(2, 2))).unwrap();
        let joint = BellDiagonalState::new(delta.weights.product(&delta.weights).unwrap()).unwrap();
        let round = two_way_cat_round(&joint, &accept_zero()).unwrap();
        assert!((round.success_probability - 1.0).abs() < 1e-14);
        assert!((round.output.fidelity() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn werner_round_reproduces_hand_computed_values() {
        // F = 3/4, accept {0}: success 13/18, output fidelity 41/52.
        let w = werner(0.75);
        let joint = BellDiagonalState::new(w.weights.product(&w.weights).unwrap()).unwrap();
        let round = two_way_cat_round(&joint, &accept_zero()).unwrap();
        assert!((round.success_probability - 13.0 / 18.0).abs() < 1e-12);
        assert!((round.output.fidelity() - 41.0 / 52.0).abs() < 1e-12);
        assert!(round.oracle_discrepancy < 1e-10);
    }

    #[test]
    fn complementary_accept_sets_partition_probability() {
        let w = werner(0.6);
        let joint = BellDiagonalState::new(w.weights.product(&w.weights).unwrap()).unwrap();
        let keep0 = two_way_cat_round(&joint, &accept_zero()).unwrap();
        let keep1 = two_way_cat_round(&joint, &[vec![1]]).unwrap();
        assert!((keep0.success_probability + keep1.success_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_agreement_on_random_bell_diagonal_inputs() {
        use rand::Rng;
        let mut rng = crate::seeding::substream(5, "distill.tests.random_inputs");
        for _ in 0..40 {
            let mut raw: Vec<f64> = (0..16).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            raw.iter_mut().for_each(|x| *x /= total);
            let state = BellDiagonalState::new(ErrorDistribution::new(2, 2, raw).unwrap()).unwrap();
            let round = two_way_cat_round(&state, &accept_zero()).unwrap();
            assert!(round.oracle_discrepancy < 1e-10);
        }
    }

    #[test]
    fn pairing_order_does_not_matter_for_product_inputs() {
        use rand::Rng;
        let mut rng = crate::seeding::substream(6, "distill.tests.pairing");
        let mut raw: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        raw.iter_mut().for_each(|x| *x /= total);
        let p = ErrorDistribution::<f64>::new(2, 1, raw).unwrap();
        let joint = p.product(&p).unwrap();
        // Swapping which copy is pair one reindexes the joint; for identical
        // marginals the reindexed weights are the same function.
        let mut swapped = vec![0.0; 16];
        for (y, w) in joint.iter() {
            let c = y.coords();
            let flip = FVector::new(2, vec![c[2], c[3], c[0], c[1]]).unwrap();
            swapped[flip.index()] = w;
        }
        let swapped = ErrorDistribution::<f64>::new(2, 2, swapped).unwrap();
        for (a, b) in joint.probs().iter().zip(swapped.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
        let r1 =
            two_way_cat_round(&BellDiagonalState::new(joint).unwrap(), &accept_zero()).unwrap();
        let r2 =
            two_way_cat_round(&BellDiagonalState::new(swapped).unwrap(), &accept_zero()).unwrap();
        for (a, b) in r1
            .output
            .weights
            .probs()
            .iter()
            .zip(r2.output.weights.probs())
        {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_rounds_returns_input() {
        let w = werner(0.8);
        let traj = iterate_two_way(&w, 0, &accept_zero(), None).unwrap();
        assert_eq!(traj.points.len(), 1);
        assert!((traj.points[0].fidelity - 0.8).abs() < 1e-15);
        assert!(traj.final_stage.is_none());
    }

    #[test]
    fn werner_three_quarters_improves_each_round() {
        let traj = iterate_two_way(&werner(0.75), 3, &accept_zero(), None).unwrap();
        assert_eq!(traj.points.len(), 4);
        for pair in traj.points.windows(2) {
            assert!(
                pair[1].fidelity > pair[0].fidelity + 1e-6,
                "round {} did not improve: {} -> {}",
                pair[1].round,
                pair[0].fidelity,
                pair[1].fidelity
            );
        }
    }

    #[test]
    fn werner_quarter_does_not_improve() {
        let traj = iterate_two_way(&werner(0.25), 3, &accept_zero(), None).unwrap();
        let first = traj.points.first().unwrap().fidelity;
        let last = traj.points.last().unwrap().fidelity;
        assert!(
            last <= first + 1e-9,
            "below-threshold input must not distill"
        );
    }

    #[test]
    fn yield_accounting_multiplies_success_over_halvings() {
        let traj = iterate_two_way(&werner(0.75), 2, &accept_zero(), None).unwrap();
        let expected =
            traj.points[1].success_probability / 2.0 * (traj.points[2].success_probability / 2.0);
        assert!((traj.points[2].expected_yield - expected).abs() < 1e-12);
    }

    #[test]
    fn final_one_way_stage_reports_coset_fidelity() {
        let code = cat_code::<f64>();
        let traj = iterate_two_way(&werner(0.9), 1, &accept_zero(), Some(&code)).unwrap();
        let stage = traj.final_stage.unwrap();
        assert_eq!(stage.n, 2);
        assert_eq!(stage.k, 1);
        // Recompute the marginal after one round and apply the closed form.
        let joint =
            BellDiagonalState::new(werner(0.9).weights.product(&werner(0.9).weights).unwrap())
                .unwrap();
        let after = two_way_cat_round(&joint, &accept_zero()).unwrap().output;
        let report =
            crate::fidelity::fe_pauli_closed_form(&code, &after.weights.power(2).unwrap()).unwrap();
        assert!((stage.fidelity - report.formula).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let w = werner(0.75);
        let joint = BellDiagonalState::new(w.weights.product(&w.weights).unwrap()).unwrap();
        assert!(matches!(
            two_way_cat_round(&joint, &[]),
            Err(Error::EmptyAcceptSet)
        ));
        assert!(two_way_cat_round(&w, &accept_zero()).is_err());
    }

    #[test]
    fn general_bipartite_inputs_enter_through_the_twirl() {
        // A non-Bell-diagonal state is projected onto its Bell diagonal; a
        // Bell-diagonal one round-trips exactly.
        let w = werner(0.7);
        let s = crate::channels::ChoiState::new(w.dims().unwrap(), w.dense().unwrap()).unwrap();
        let back = BellDiagonalState::from_bipartite(&s).unwrap();
        for (a, b) in w.weights.probs().iter().zip(back.weights.probs()) {
            assert!((a - b).abs() < 1e-13);
        }

        let ch = random_tpcp::<f64>(2, 1, 3, 999).unwrap();
        let s = crate::channels::choi(&ch).unwrap();
        let projected = BellDiagonalState::from_bipartite(&s).unwrap();
        let overlaps = crate::channels::bell_overlaps(&s);
        for (a, b) in overlaps.iter().zip(projected.weights.probs()) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((projected.weights.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_diagonal_dense_matches_definition() {
        let w = werner(0.7);
        let rho = w.dense().unwrap();
        let mut expected = CMat::<f64>::zeros(4, 4);
        for (y, p) in w.weights.iter() {
            let v = bell_vector::<f64>(&WeylLabel::new(y));
            expected += (&v.amps * v.amps.adjoint()).map(|z| z.scale(p));
        }
        assert!(max_abs_diff(&rho, &expected) < 1e-15);
    }
}
