//! Quantum channels as Kraus collections, Choi-state construction and
//! inversion, discrete twirling, and the Weyl-error distribution of a
//! channel.
//!
//! Normalization convention: the stored Choi state is [Id ⊗ B](|Ψ⟩⟨Ψ|) with
//! |Ψ⟩ the maximally entangled unit vector, so trace-preserving channels map
//! to unit-trace states; the d^n factor of the unnormalized Choi matrix
//! enters only in channel reconstruction.

use nalgebra::Complex;
use rand_distr::{Distribution as _, StandardNormal};

use crate::error::{Error, Result};
use crate::fflin::{FSubspace, FVector};
use crate::scalar::{hermitian_defect, max_abs_diff, CMat, CVec, Real, C};
use crate::seeding::substream;
use crate::weyl::{all_labels, weyl_action, DenseOperator, Dims, PhaseConvention, WeylLabel};

/// A completely positive map given by an explicit Kraus collection.
#[derive(Clone, Debug)]
pub struct KrausChannel<R: Real> {
    pub dims: Dims,
    pub kraus: Vec<CMat<R>>,
    pub trace_preserving: bool,
}

impl<R: Real> KrausChannel<R> {
    /// Build a channel, validating shapes and measuring trace preservation
    /// (Σ K†K = I to 1e-10 sets the flag).
    pub fn new(dims: Dims, kraus: Vec<CMat<R>>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidParameter(
                "channel needs at least one Kraus operator".into(),
            ));
        }
        let dd = dims.dim();
        for k in &kraus {
            if k.nrows() != dd || k.ncols() != dd {
                return Err(Error::Dimension(format!(
                    "Kraus operator is {}x{}, expected {dd}x{dd}",
                    k.nrows(),
                    k.ncols()
                )));
            }
        }
        let mut ch = Self {
            dims,
            kraus,
            trace_preserving: false,
        };
        ch.trace_preserving = ch.completeness_defect() <= crate::scalar::scaled_tol::<R>(1e-10);
        Ok(ch)
    }

    pub fn identity(dims: Dims) -> Self {
        let dd = dims.dim();
        Self {
            dims,
            kraus: vec![CMat::<R>::identity(dd, dd)],
            trace_preserving: true,
        }
    }

    /// Max-modulus defect of Σ K†K − I.
    pub fn completeness_defect(&self) -> f64 {
        let dd = self.dims.dim();
        let mut acc = CMat::<R>::zeros(dd, dd);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        max_abs_diff(&acc, &CMat::<R>::identity(dd, dd))
    }

    /// Kraus action Σ K ρ K†. Preserves the trace iff the channel does.
    pub fn apply(&self, rho: &DenseOperator<R>) -> Result<DenseOperator<R>> {
        if rho.dims != self.dims {
            return Err(Error::Dimension(format!(
                "state dims d={} n={} do not match channel d={} n={}",
                rho.dims.d(),
                rho.dims.n(),
                self.dims.d(),
                self.dims.n()
            )));
        }
        let dd = self.dims.dim();
        let mut out = CMat::<R>::zeros(dd, dd);
        for k in &self.kraus {
            out += k * &rho.mat * k.adjoint();
        }
        DenseOperator::new(self.dims, out)
    }

    /// Tensor product channel acting on the concatenated digit string.
    pub fn tensor(&self, other: &KrausChannel<R>) -> Result<KrausChannel<R>> {
        if self.dims.d() != other.dims.d() {
            return Err(Error::ModulusMismatch {
                lhs: self.dims.d(),
                rhs: other.dims.d(),
            });
        }
        let dims = Dims::new(self.dims.d(), self.dims.n() + other.dims.n())?;
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kronecker(b));
            }
        }
        KrausChannel::new(dims, kraus)
    }
}

/// A positive semi-definite operator on the bipartite space encoding a CP
/// map.
#[derive(Clone, Debug)]
pub struct ChoiState<R: Real> {
    pub dims: Dims,
    pub mat: CMat<R>,
}

impl<R: Real> ChoiState<R> {
    pub fn new(dims: Dims, mat: CMat<R>) -> Result<Self> {
        let dd2 = dims.bipartite_dim();
        if mat.nrows() != dd2 || mat.ncols() != dd2 {
            return Err(Error::Dimension(format!(
                "Choi matrix is {}x{}, expected {dd2}x{dd2}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = hermitian_defect(&mat);
        if defect > crate::scalar::scaled_tol::<R>(1e-10) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { dims, mat })
    }

    pub fn trace(&self) -> C<R> {
        self.mat.trace()
    }
}

/// Choi state of a channel: [Id ⊗ B](|Ψ⟩⟨Ψ|). Unit trace iff B is
/// trace-preserving.
pub fn choi<R: Real>(b: &KrausChannel<R>) -> Result<ChoiState<R>> {
    b.dims.guard_bipartite()?;
    let dd = b.dims.dim();
    let scale = R::from64(1.0 / (dd as f64).sqrt());
    let mut acc = CMat::<R>::zeros(dd * dd, dd * dd);
    for k in &b.kraus {
        // (I ⊗ K)|Ψ⟩ indexed l·D + m carries K[m, l]/√D.
        let mut v = CVec::<R>::zeros(dd * dd);
        for l in 0..dd {
            for m in 0..dd {
                v[l * dd + m] = k[(m, l)].scale(scale);
            }
        }
        acc += &v * v.adjoint();
    }
    ChoiState::new(b.dims, acc)
}

/// Reconstruct a Kraus realization from a Choi state by spectral
/// decomposition of the rescaled matrix. Eigenvalues below −1e-8 reject the
/// input as not completely positive; small negatives are clipped to zero.
pub fn channel_from_choi<R: Real>(s: &ChoiState<R>) -> Result<KrausChannel<R>> {
    let dd = s.dims.dim();
    let eig = nalgebra::linalg::SymmetricEigen::new(s.mat.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let mut kraus = Vec::new();
    let reject = crate::scalar::scaled_tol::<R>(1e-8);
    let drop = crate::scalar::scaled_tol::<R>(1e-12);
    for &j in &order {
        let lambda = eig.eigenvalues[j].to64();
        if lambda < -reject {
            return Err(Error::NotCompletelyPositive(lambda));
        }
        if lambda <= drop {
            continue;
        }
        let col = eig.eigenvectors.column(j);
        // Fix the eigenvector phase: largest-modulus entry real positive.
        let pivot = (0..col.len())
            .max_by(|&a, &b| {
                col[a]
                    .norm()
                    .partial_cmp(&col[b].norm())
                    .expect("finite amplitudes")
            })
            .expect("nonempty eigenvector");
        let piv = col[pivot];
        let rot = piv.conj().unscale(piv.norm());
        let coef = R::from64((lambda * dd as f64).sqrt());
        let mut k = CMat::<R>::zeros(dd, dd);
        for l in 0..dd {
            for m in 0..dd {
                k[(m, l)] = (col[l * dd + m] * rot).scale(coef);
            }
        }
        kraus.push(k);
    }
    if kraus.is_empty() {
        return Err(Error::NotCompletelyPositive(0.0));
    }
    KrausChannel::new(s.dims, kraus)
}

/// Raw Bell-basis diagonal ⟨Ψ_y|S|Ψ_y⟩ in label enumeration order, computed
/// in O(D⁴) through the permutation structure of the Weyl basis. Real parts
/// only (the matrix is Hermitian); no clipping.
pub fn bell_overlaps<R: Real>(s: &ChoiState<R>) -> Vec<R> {
    let dd = s.dims.dim();
    let inv_d = R::from64(1.0 / dd as f64);
    all_labels(s.dims)
        .map(|y| {
            let act = weyl_action::<R>(&y, PhaseConvention::Hermitian);
            let mut acc = Complex::new(R::zero(), R::zero());
            for l in 0..dd {
                let row = l * dd + act.perm[l];
                for l2 in 0..dd {
                    let col = l2 * dd + act.perm[l2];
                    acc += act.phase[l].conj() * act.phase[l2] * s.mat[(row, col)];
                }
            }
            acc.re * inv_d
        })
        .collect()
}

/// Bell-diagonal weights of a (nearly) PSD state: the overlaps with
/// rounding-level negatives clipped to zero.
pub fn bell_diagonal_weights<R: Real>(s: &ChoiState<R>) -> Vec<R> {
    bell_overlaps(s)
        .into_iter()
        .map(|p| if p < R::zero() { R::zero() } else { p })
        .collect()
}

/// Discrete twirl of a bipartite state: the projection of its matrix onto
/// the Bell diagonal. Equals the d^{2n}-term conjugation average by
/// [`twirl_conjugation_average`], which this implementation avoids for cost.
pub fn twirl_choi<R: Real>(s: &ChoiState<R>) -> ChoiState<R> {
    let dd = s.dims.dim();
    let weights = bell_overlaps(s);
    let inv_d = R::from64(1.0 / dd as f64);
    let mut out = CMat::<R>::zeros(dd * dd, dd * dd);
    for (y, w) in all_labels(s.dims).zip(&weights) {
        let act = weyl_action::<R>(&y, PhaseConvention::Hermitian);
        for l in 0..dd {
            let row = l * dd + act.perm[l];
            for l2 in 0..dd {
                let col = l2 * dd + act.perm[l2];
                out[(row, col)] += (act.phase[l] * act.phase[l2].conj()).scale(*w * inv_d);
            }
        }
    }
    ChoiState {
        dims: s.dims,
        mat: out,
    }
}

/// The literal twirling average d^{−2n} Σ_x (N̄_x ⊗ N_x) S (N̄_x ⊗ N_x)†,
/// kept fully dense as an independent cross-check of [`twirl_choi`].
pub fn twirl_conjugation_average<R: Real>(s: &ChoiState<R>) -> Result<ChoiState<R>> {
    s.dims.guard_bipartite()?;
    let dd = s.dims.dim();
    let dd2 = dd * dd;
    let mut acc = CMat::<R>::zeros(dd2, dd2);
    for y in all_labels(s.dims) {
        let n = crate::weyl::weyl::<R>(&y).mat;
        let w = n.map(|z| z.conj()).kronecker(&n);
        acc += &w * &s.mat * w.adjoint();
    }
    let scale = R::from64(1.0 / (dd2 as f64));
    ChoiState::new(s.dims, acc.map(|z| z.scale(scale)))
}

/// A probability mass function on F_d^{2m}, stored densely in enumeration
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorDistribution<R: Real> {
    d: u8,
    m: usize,
    probs: Vec<R>,
}

impl<R: Real> ErrorDistribution<R> {
    /// Strict constructor: entries nonnegative (to −1e-12, clipped) and
    /// summing to one within 1e-12.
    pub fn new(d: u8, m: usize, probs: Vec<R>) -> Result<Self> {
        let dist = Self::new_raw(d, m, probs)?;
        let total = dist.total().to64();
        if (total - 1.0).abs() > crate::scalar::scaled_tol::<R>(1e-12) {
            return Err(Error::NotNormalized(total));
        }
        Ok(dist)
    }

    /// Tolerant constructor for trace-decreasing contexts: validates the
    /// alphabet size and nonnegativity but not the total mass.
    pub fn new_raw(d: u8, m: usize, mut probs: Vec<R>) -> Result<Self> {
        crate::fflin::check_modulus(d)?;
        let len = usize::from(d).pow(2 * m as u32);
        if probs.len() != len {
            return Err(Error::Dimension(format!(
                "distribution has {} entries, expected d^(2m) = {len}",
                probs.len()
            )));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            let v = p.to64();
            if v < -1e-12 {
                return Err(Error::NegativeProbability(
                    v,
                    FVector::from_index(d, 2 * m, i).label(),
                ));
            }
            if v < 0.0 {
                *p = R::zero();
            }
        }
        Ok(Self { d, m, probs })
    }

    /// Point mass at a single error pattern.
    pub fn delta(x: &FVector) -> Self {
        let d = x.modulus();
        let m = x.digits();
        let mut probs = vec![R::zero(); usize::from(d).pow(2 * m as u32)];
        probs[x.index()] = R::one();
        Self { d, m, probs }
    }

    pub fn uniform(d: u8, m: usize) -> Result<Self> {
        crate::fflin::check_modulus(d)?;
        let len = usize::from(d).pow(2 * m as u32);
        Ok(Self {
            d,
            m,
            probs: vec![R::from64(1.0 / len as f64); len],
        })
    }

    /// Single-digit qubit bit-flip distribution: X with probability p.
    pub fn bit_flip(p: R) -> Result<Self> {
        Self::new(2, 1, vec![R::one() - p, p, R::zero(), R::zero()])
    }

    /// Single-pair Werner weights: fidelity f on the zero label, the rest
    /// uniform over the other three (d = 2, m = 1).
    pub fn werner(f: R) -> Result<Self> {
        let third = R::from64(1.0 / 3.0);
        let rest = (R::one() - f) * third;
        Self::new(2, 1, vec![f, rest, rest, rest])
    }

    pub fn modulus(&self) -> u8 {
        self.d
    }

    /// Digit count m of the alphabet F_d^{2m}.
    pub fn digits(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[R] {
        &self.probs
    }

    pub fn total(&self) -> R {
        self.probs.iter().fold(R::zero(), |a, &b| a + b)
    }

    pub fn prob(&self, x: &FVector) -> R {
        self.probs[x.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (FVector, R)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (FVector::from_index(self.d, 2 * self.m, i), p))
    }

    /// Product distribution on the concatenated alphabet.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::ModulusMismatch {
                lhs: self.d,
                rhs: other.d,
            });
        }
        let m = self.m + other.m;
        let mut probs = vec![R::zero(); usize::from(self.d).pow(2 * m as u32)];
        for (x, px) in self.iter() {
            for (y, py) in other.iter() {
                let mut coords = x.coords().to_vec();
                coords.extend_from_slice(y.coords());
                let joint = FVector::new(self.d, coords).expect("valid coords");
                probs[joint.index()] = px * py;
            }
        }
        Ok(Self {
            d: self.d,
            m,
            probs,
        })
    }

    /// n-fold product with itself.
    pub fn power(&self, n: usize) -> Result<Self> {
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.product(self)?;
        }
        Ok(acc)
    }

    /// Σ_{x ∈ shift + L} P(x).
    pub fn coset_sum(&self, shift: &FVector, l: &FSubspace) -> R {
        l.elements().into_iter().fold(R::zero(), |acc, e| {
            acc + self.prob(&e.add(shift).expect("dims match"))
        })
    }
}

/// The Weyl-error distribution of a channel: P_B(x) = ⟨Ψ_x|Λ(B)|Ψ_x⟩.
/// For trace-decreasing input the weights are still computed and sum to the
/// Choi trace rather than one.
pub fn weyl_error_distribution<R: Real>(b: &KrausChannel<R>) -> Result<ErrorDistribution<R>> {
    let s = choi(b)?;
    let weights = bell_diagonal_weights(&s);
    if b.trace_preserving {
        ErrorDistribution::new(b.dims.d(), b.dims.n(), weights)
    } else {
        ErrorDistribution::new_raw(b.dims.d(), b.dims.n(), weights)
    }
}

/// The Weyl channel σ ↦ Σ P(x) N_x σ N_x† with Kraus operators √P(x)·N_x
/// over the support of P.
pub fn weyl_channel<R: Real>(p: &ErrorDistribution<R>) -> Result<KrausChannel<R>> {
    let total = p.total().to64();
    if (total - 1.0).abs() > crate::scalar::scaled_tol::<R>(1e-12) {
        return Err(Error::NotNormalized(total));
    }
    let dims = Dims::new(p.modulus(), p.digits())?;
    let mut kraus = Vec::new();
    for (x, px) in p.iter() {
        if px > R::zero() {
            let w = crate::weyl::weyl::<R>(&WeylLabel::new(x));
            let amp = R::from64(px.to64().sqrt());
            kraus.push(w.mat.map(|z| z.scale(amp)));
        }
    }
    KrausChannel::new(dims, kraus)
}

/// The twirl of a channel: the Weyl channel carrying its error
/// distribution. Computed through the Choi diagonal rather than the
/// d^{2n}-term conjugation average; the two constructions are compared in
/// tests.
pub fn twirled_channel<R: Real>(b: &KrausChannel<R>) -> Result<KrausChannel<R>> {
    weyl_channel(&weyl_error_distribution(b)?)
}

/// Seeded Haar-style random trace-preserving channel: a random isometry from
/// H to H ⊗ C^rank sliced into `rank` Kraus operators.
pub fn random_tpcp<R: Real>(
    d: u8,
    n: usize,
    kraus_rank: usize,
    seed: u64,
) -> Result<KrausChannel<R>> {
    if kraus_rank == 0 {
        return Err(Error::InvalidParameter("kraus_rank must be ≥ 1".into()));
    }
    let dims = Dims::new(d, n)?;
    let dd = dims.dim();
    let mut rng = substream(seed, "channels.random_tpcp");
    let g = CMat::<R>::from_fn(dd * kraus_rank, dd, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex::new(R::from64(re), R::from64(im))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Phase-fix the columns so the isometry is Haar rather than QR-biased.
    for j in 0..dd {
        let rjj = r[(j, j)];
        if rjj.norm() > R::zero() {
            let ph = rjj.unscale(rjj.norm());
            for i in 0..q.nrows() {
                q[(i, j)] *= ph;
            }
        }
    }
    let kraus: Vec<CMat<R>> = (0..kraus_rank)
        .map(|i| q.rows(i * dd, dd).into_owned())
        .collect();
    let ch = KrausChannel::new(dims, kraus)?;
    debug_assert!(ch.trace_preserving);
    Ok(ch)
}
