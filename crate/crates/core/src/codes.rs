//! Symplectic (stabilizer) code families: the d^{n−k} joint eigenspaces of a
//! commuting Weyl family, their projectors, syndrome-indexed recovery maps,
//! and logical actions.
//!
//! Construction: a self-orthogonal L ⊂ F_d^{2n} is completed to a hyperbolic
//! frame (g_i, h_i); a unit joint eigenvector of {N_{g_i}} with all
//! eigenvalues one is extracted with the group-average projector
//! Π_i (d^{−1} Σ_c N_{g_i}^c); the orthonormal barred basis is generated by
//! the commuting translations X̄^s = Π_i (N_{h_i})^{s_i}. The code subspace
//! with syndrome s is spanned by the basis vectors whose first n−k label
//! digits equal s.

use nalgebra::Complex;
use rand_distr::{Distribution as _, StandardNormal};

use crate::channels::ErrorDistribution;
use crate::error::{Error, Result};
use crate::fflin::{
    hyperbolic_complete, label_from_index, label_index, min_syndrome_transversal, syndrome_of,
    FSubspace, FVector, HyperbolicFrame,
};
use crate::scalar::{CMat, CVec, Real};
use crate::seeding::substream;
use crate::weyl::{weyl_action, DenseOperator, Dims, PhaseConvention, StateVector, WeylLabel};

/// How the coset representatives x̂(t) are picked.
#[derive(Clone, Copy, Debug)]
pub enum TransversalPolicy<'a, R: Real> {
    /// Earliest vector of each syndrome coset in enumeration order.
    Lexicographic,
    /// Highest-probability vector of each syndrome coset under the supplied
    /// distribution, ties broken by enumeration order.
    MostLikely(&'a ErrorDistribution<R>),
}

/// A frozen symplectic code family: frame, barred basis, and transversal.
#[derive(Clone, Debug)]
pub struct SymplecticCodeFamily<R: Real> {
    dims: Dims,
    subspace: FSubspace,
    frame: HyperbolicFrame,
    k: usize,
    basis: Vec<StateVector<R>>,
    transversal: Vec<FVector>,
}

impl<R: Real> SymplecticCodeFamily<R> {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn subspace(&self) -> &FSubspace {
        &self.subspace
    }

    pub fn frame(&self) -> &HyperbolicFrame {
        &self.frame
    }

    /// Logical digit count k.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.dims.n()
    }

    /// Dimension d^k of each code subspace.
    pub fn code_dim(&self) -> usize {
        usize::from(self.dims.d()).pow(self.k as u32)
    }

    /// Number of code subspaces d^{n−k}.
    pub fn syndrome_count(&self) -> usize {
        usize::from(self.dims.d()).pow((self.dims.n() - self.k) as u32)
    }

    /// All syndrome labels in label order.
    pub fn syndrome_labels(&self) -> Vec<Vec<u8>> {
        let len = self.dims.n() - self.k;
        (0..self.syndrome_count())
            .map(|i| label_from_index(self.dims.d(), len, i))
            .collect()
    }

    /// The barred basis vector |m̄⟩ for a full label m ∈ F^n.
    pub fn basis_vector(&self, label: &[u8]) -> &StateVector<R> {
        &self.basis[label_index(self.dims.d(), label)]
    }

    /// All d^n barred basis vectors in label order.
    pub fn basis_vectors(&self) -> &[StateVector<R>] {
        &self.basis
    }

    /// Computational index of the pair label (s, u).
    pub fn pair_index(&self, s: &[u8], u: &[u8]) -> usize {
        debug_assert_eq!(s.len(), self.dims.n() - self.k);
        debug_assert_eq!(u.len(), self.k);
        let mut label = s.to_vec();
        label.extend_from_slice(u);
        label_index(self.dims.d(), &label)
    }

    /// Current transversal, indexed by syndrome label.
    pub fn transversal(&self) -> &[FVector] {
        &self.transversal
    }

    pub fn transversal_rep(&self, t: &[u8]) -> &FVector {
        &self.transversal[label_index(self.dims.d(), t)]
    }

    /// The correctable set J = ∪_t (x̂(t) + L), sorted in enumeration order.
    pub fn correctable_set(&self) -> Vec<FVector> {
        let mut j = Vec::new();
        for rep in &self.transversal {
            for e in self.subspace.elements() {
                j.push(e.add(rep).expect("dims match"));
            }
        }
        j.sort_by_key(FVector::index);
        j
    }

    /// Rank-d^k orthogonal projector onto the code subspace C^{(s)}.
    pub fn projector(&self, s: &[u8]) -> DenseOperator<R> {
        let d = self.dims.d();
        let dd = self.dims.dim();
        let mut mat = CMat::<R>::zeros(dd, dd);
        for u in 0..self.code_dim() {
            let v = &self.basis[self.pair_index(s, &label_from_index(d, self.k, u))].amps;
            mat += v * v.adjoint();
        }
        DenseOperator {
            dims: self.dims,
            mat,
        }
    }

    /// X̄^z = Π_i (N_{h_i})^{z_i} for a full-length exponent z ∈ F^n.
    pub fn logical_x(&self, z: &[u8]) -> CMat<R> {
        debug_assert_eq!(z.len(), self.dims.n());
        self.product_action(self.frame.h(), z).dense()
    }

    /// Z̄^w = Π_i (N_{g_i})^{w_i} for a full-length exponent w ∈ F^n.
    pub fn logical_z(&self, w: &[u8]) -> CMat<R> {
        debug_assert_eq!(w.len(), self.dims.n());
        self.product_action(self.frame.g(), w).dense()
    }

    pub(crate) fn product_action(
        &self,
        gens: &[FVector],
        exps: &[u8],
    ) -> crate::weyl::WeylAction<R> {
        let mut acc = identity_action::<R>(self.dims);
        for (gen, &e) in gens.iter().zip(exps) {
            let a = weyl_action::<R>(&WeylLabel::new(gen.clone()), PhaseConvention::Hermitian);
            for _ in 0..e {
                acc = a.compose(&acc);
            }
        }
        acc
    }

    /// Recovery map for the code with syndrome s: Kraus components
    /// R_t = N_{x̂(t)}† Π_{t+s}, one per relative syndrome t.
    pub fn recovery(&self, s: &[u8]) -> RecoveryOperator<R> {
        let d = self.dims.d();
        let len = self.dims.n() - self.k;
        let mut components = Vec::with_capacity(self.syndrome_count());
        for ti in 0..self.syndrome_count() {
            let t = label_from_index(d, len, ti);
            let shifted: Vec<u8> = t.iter().zip(s).map(|(&a, &b)| (a + b) % d).collect();
            let proj = self.projector(&shifted);
            let n_dag = weyl_action::<R>(
                &WeylLabel::new(self.transversal_rep(&t).clone()),
                PhaseConvention::Hermitian,
            )
            .adjoint()
            .dense();
            components.push((t, n_dag * proj.mat));
        }
        RecoveryOperator {
            dims: self.dims,
            syndrome: s.to_vec(),
            components,
        }
    }

    /// Replace the transversal. `MostLikely` picks the argmax-probability
    /// vector of each syndrome coset, ties broken by enumeration order.
    pub fn choose_transversal(&mut self, policy: TransversalPolicy<'_, R>) -> Result<()> {
        match policy {
            TransversalPolicy::Lexicographic => {
                self.transversal = min_syndrome_transversal(&self.subspace);
                Ok(())
            }
            TransversalPolicy::MostLikely(p) => {
                if p.modulus() != self.dims.d() || p.digits() != self.dims.n() {
                    return Err(Error::Dimension(
                        "distribution alphabet does not match the code".into(),
                    ));
                }
                let d = self.dims.d();
                let count = self.syndrome_count();
                let mut best: Vec<Option<(R, FVector)>> = vec![None; count];
                for (x, px) in p.iter() {
                    let idx = label_index(d, &syndrome_of(&x, self.subspace.basis()));
                    let better = match &best[idx] {
                        None => true,
                        Some((bp, _)) => px > *bp,
                    };
                    if better {
                        best[idx] = Some((px, x));
                    }
                }
                self.transversal = best
                    .into_iter()
                    .map(|b| b.expect("syndrome map is onto").1)
                    .collect();
                Ok(())
            }
        }
    }

    /// Install an explicit transversal; entry i must carry the syndrome with
    /// label index i.
    pub fn set_transversal(&mut self, reps: Vec<FVector>) -> Result<()> {
        if reps.len() != self.syndrome_count() {
            return Err(Error::Dimension(format!(
                "transversal has {} entries, expected {}",
                reps.len(),
                self.syndrome_count()
            )));
        }
        let d = self.dims.d();
        for (i, rep) in reps.iter().enumerate() {
            if rep.modulus() != d || rep.len() != 2 * self.dims.n() {
                return Err(Error::Dimension(format!(
                    "transversal entry {i} does not live in the code's ambient space"
                )));
            }
            let idx = label_index(d, &syndrome_of(rep, self.subspace.basis()));
            if idx != i {
                return Err(Error::InvalidParameter(format!(
                    "transversal entry {i} has syndrome index {idx}"
                )));
            }
        }
        self.transversal = reps;
        Ok(())
    }

    /// The unitary sending the computational basis |l⟩ to the barred basis
    /// |l̄⟩ (basis vectors as columns).
    pub fn basis_unitary(&self) -> CMat<R> {
        let dd = self.dims.dim();
        let mut u = CMat::<R>::zeros(dd, dd);
        for (j, v) in self.basis.iter().enumerate() {
            u.set_column(j, &v.amps);
        }
        u
    }
}

fn identity_action<R: Real>(dims: Dims) -> crate::weyl::WeylAction<R> {
    let dd = dims.dim();
    crate::weyl::WeylAction {
        dims,
        perm: (0..dd).collect(),
        phase: vec![Complex::new(R::one(), R::zero()); dd],
    }
}

/// Kraus components of the recovery map D^{(s)} = Σ_t D^{(s,t)}.
#[derive(Clone, Debug)]
pub struct RecoveryOperator<R: Real> {
    pub dims: Dims,
    pub syndrome: Vec<u8>,
    /// Relative syndrome t paired with the partial isometry
    /// R_t = N_{x̂(t)}† Π_{t+s}.
    pub components: Vec<(Vec<u8>, CMat<R>)>,
}

impl<R: Real> RecoveryOperator<R> {
    pub fn kraus_list(&self) -> Vec<CMat<R>> {
        self.components.iter().map(|(_, m)| m.clone()).collect()
    }

    pub fn component(&self, t: &[u8]) -> &CMat<R> {
        let idx = label_index(self.dims.d(), t);
        &self.components[idx].1
    }

    /// Max-modulus defect of Σ_t R_t† R_t − I.
    pub fn completeness_defect(&self) -> f64 {
        let dd = self.dims.dim();
        let mut acc = CMat::<R>::zeros(dd, dd);
        for (_, r) in &self.components {
            acc += r.adjoint() * r;
        }
        crate::scalar::max_abs_diff(&acc, &CMat::<R>::identity(dd, dd))
    }
}

/// Build the code family for a self-orthogonal subspace. Deterministic per
/// seed; the transversal defaults to the lexicographic policy.
pub fn build_code<R: Real>(l: &FSubspace, seed: u64) -> Result<SymplecticCodeFamily<R>> {
    let d = l.modulus();
    let n = l.ambient_digits();
    let dims = Dims::new(d, n)?;
    dims.guard_bipartite()?;
    let frame = hyperbolic_complete(l, seed)?;
    let k = frame.code_k();

    // Joint +1 eigenvector of all N_{g_i} by group averaging.
    let dd = dims.dim();
    let g_actions: Vec<_> = frame
        .g()
        .iter()
        .map(|g| weyl_action::<R>(&WeylLabel::new(g.clone()), PhaseConvention::Hermitian))
        .collect();
    let mut rng = substream(seed, "codes.joint_eigenvector");
    let mut root: Option<CVec<R>> = None;
    for _attempt in 0..64 {
        let mut v = CVec::<R>::from_fn(dd, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex::new(R::from64(re), R::from64(im))
        });
        v /= Complex::new(v.norm(), R::zero());
        for act in &g_actions {
            // (d^{-1} Σ_c N^c) v with the c = 0 term being v itself
            let mut acc = v.clone();
            let mut power = v.clone();
            for _ in 1..d {
                power = act.apply_vec(&power);
                acc += &power;
            }
            v = acc / Complex::new(R::from64(f64::from(d)), R::zero());
        }
        if v.norm().to64() > 1e-6 {
            v /= Complex::new(v.norm(), R::zero());
            root = Some(v);
            break;
        }
    }
    let mut root = root.ok_or_else(|| {
        Error::Construction("joint eigenvector projector annihilated every seed vector".into())
    })?;

    // Global phase: first significant amplitude real positive.
    let pivot_tol = crate::scalar::scaled_tol::<R>(1e-8);
    let pivot = (0..dd)
        .find(|&i| root[i].norm().to64() > pivot_tol)
        .ok_or_else(|| Error::Construction("joint eigenvector is numerically zero".into()))?;
    let ph = root[pivot].conj().unscale(root[pivot].norm());
    root *= ph;

    // Barred basis |m̄⟩ = X̄^m |0̄⟩ in label order.
    let h_actions: Vec<_> = frame
        .h()
        .iter()
        .map(|h| weyl_action::<R>(&WeylLabel::new(h.clone()), PhaseConvention::Hermitian))
        .collect();
    let mut basis = Vec::with_capacity(dd);
    for idx in 0..dd {
        let label = label_from_index(d, n, idx);
        let mut v = root.clone();
        for (act, &e) in h_actions.iter().zip(&label) {
            for _ in 0..e {
                v = act.apply_vec(&v);
            }
        }
        basis.push(StateVector { dims, amps: v });
    }

    let transversal = min_syndrome_transversal(l);
    Ok(SymplecticCodeFamily {
        dims,
        subspace: l.clone(),
        frame,
        k,
        basis,
        transversal,
    })
}

/// Verification report for the barred-basis translation and phase laws.
#[derive(Clone, Copy, Debug)]
pub struct LogicalActionReport {
    pub checks: usize,
    pub max_translation_defect: f64,
    pub max_phase_defect: f64,
}

/// Verify X̄^z|l̄⟩ = |l+z‾⟩ and Z̄^w|l̄⟩ = ω^{Σ w_i l_i}|l̄⟩ as matrix
/// identities over every basis vector and exponent. Defects beyond 1e-9
/// signal a construction bug and return an error.
pub fn logical_actions<R: Real>(code: &SymplecticCodeFamily<R>) -> Result<LogicalActionReport> {
    let d = code.dims().d();
    let n = code.n();
    let dd = code.dims().dim();
    let mut checks = 0usize;
    let mut max_x = 0.0f64;
    let mut max_z = 0.0f64;
    for e_idx in 0..dd {
        let exp = label_from_index(d, n, e_idx);
        let xbar = code.logical_x(&exp);
        let zbar = code.logical_z(&exp);
        for l_idx in 0..dd {
            let l = label_from_index(d, n, l_idx);
            let v = &code.basis_vector(&l).amps;
            // translation law
            let shifted: Vec<u8> = l.iter().zip(&exp).map(|(&a, &b)| (a + b) % d).collect();
            let got = &xbar * v;
            let want = &code.basis_vector(&shifted).amps;
            max_x = max_x.max((got - want).norm().to64());
            // phase law
            let phase_exp: i64 = l
                .iter()
                .zip(&exp)
                .map(|(&li, &wi)| i64::from(li) * i64::from(wi))
                .sum();
            let want = v * crate::scalar::root_of_unity::<R>(d, phase_exp);
            let got = &zbar * v;
            max_z = max_z.max((got - want).norm().to64());
            checks += 2;
        }
    }
    let report = LogicalActionReport {
        checks,
        max_translation_defect: max_x,
        max_phase_defect: max_z,
    };
    if max_x > 1e-9 || max_z > 1e-9 {
        return Err(Error::IdentityViolation(format!(
            "logical action defects {max_x:.3e} / {max_z:.3e} exceed 1e-9"
        )));
    }
    Ok(report)
}

/// Operationally certify that the family corrects N_J: for every x ∈ J and
/// every syndrome s, applying N_x followed by the recovery map restores the
/// maximally entangled test state on C^{(s)} with unit entanglement fidelity
/// (tolerance 1e-9).
///
/// J must be a union of stabilizer cosets hitting each dual coset at most
/// once; a violating pair is reported as an error.
pub fn verify_correctable<R: Real>(code: &SymplecticCodeFamily<R>, j: &[FVector]) -> Result<bool> {
    let d = code.dims().d();
    let two_n = 2 * code.n();
    let l = code.subspace();
    let mut by_syndrome: std::collections::BTreeMap<usize, Vec<FVector>> = Default::default();
    for x in j {
        if x.modulus() != d || x.len() != two_n {
            return Err(Error::Dimension(
                "correctable-set vector does not match the code ambient space".into(),
            ));
        }
        by_syndrome
            .entry(label_index(d, &syndrome_of(x, l.basis())))
            .or_default()
            .push(x.clone());
    }
    let l_elements = l.elements();
    for group in by_syndrome.values() {
        // All members of a syndrome class must form one coset of L.
        let rep = &group[0];
        for x in group.iter().skip(1) {
            if !l.contains(&x.sub(rep).expect("dims match")) {
                return Err(Error::MalformedCorrectableSet {
                    x: rep.label(),
                    y: x.label(),
                });
            }
        }
        let coset: std::collections::BTreeSet<usize> = l_elements
            .iter()
            .map(|e| e.add(rep).expect("dims match").index())
            .collect();
        let present: std::collections::BTreeSet<usize> = group.iter().map(FVector::index).collect();
        if coset != present {
            return Err(Error::InvalidParameter(
                "correctable set is not closed under stabilizer shifts".into(),
            ));
        }
    }

    // Dense certification.
    let dd = code.dims().dim();
    let inv_codedim = R::from64(1.0 / code.code_dim() as f64);
    for s in code.syndrome_labels() {
        let recovery = code.recovery(&s);
        let pi = code.projector(&s).mat.map(|z| z.scale(inv_codedim));
        // π·R_t once per component, then O(D) traces per error.
        let pre: Vec<CMat<R>> = recovery.components.iter().map(|(_, r)| &pi * r).collect();
        for x in j {
            let act = weyl_action::<R>(&WeylLabel::new(x.clone()), PhaseConvention::Hermitian);
            let mut fe = 0.0f64;
            for a in &pre {
                let mut tr = Complex::new(R::zero(), R::zero());
                for row in 0..dd {
                    tr += a[(row, act.perm[row])] * act.phase[row];
                }
                fe += tr.norm_sqr().to64();
            }
            if (fe - 1.0).abs() > 1e-9 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
