//! Dense unitary realization of the Weyl ray representation of F_d^{2n} and
//! the generalized Bell basis.
//!
//! Single-digit generators act on the computational basis as
//! X|a⟩ = |a−1⟩ and Z|a⟩ = ω^a|a⟩ with ω = exp(2πi/d). A label
//! (a, b) ∈ F_d^2 realizes i^{ab} X^a Z^b for d = 2 (the Hermitian Pauli
//! convention) and X^a Z^b for d > 2; multi-digit operators are tensor
//! products in digit order with digit 1 leftmost. Every Weyl operator is a
//! generalized permutation matrix, which the implementation exploits, but
//! all identities are also verifiable against fully dense arithmetic.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::fflin::{symplectic_form, FVector};
use crate::scalar::{c_re, root_of_unity, CMat, CVec, Real, C};

/// System shape: n digits of prime dimension d, Hilbert dimension D = d^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dims {
    d: u8,
    n: usize,
}

impl Dims {
    pub fn new(d: u8, n: usize) -> Result<Self> {
        crate::fflin::check_modulus(d)?;
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        Ok(Self { d, n })
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Hilbert dimension D = d^n.
    pub fn dim(&self) -> usize {
        usize::from(self.d).pow(self.n as u32)
    }

    /// Bipartite dimension D² = d^{2n}.
    pub fn bipartite_dim(&self) -> usize {
        self.dim() * self.dim()
    }

    /// Refuse to build d^{2n}-sized objects beyond the configured limit.
    pub fn guard_bipartite(&self) -> Result<()> {
        let limit = max_bipartite_dim();
        if self.bipartite_dim() > limit {
            return Err(Error::DimensionGuard(self.bipartite_dim(), limit));
        }
        Ok(())
    }

    /// Computational index of a digit string (digit 1 most significant),
    /// matching |l_1⟩ ⊗ ⋯ ⊗ |l_n⟩.
    pub fn index_of(&self, digits: &[u8]) -> usize {
        debug_assert_eq!(digits.len(), self.n);
        digits
            .iter()
            .fold(0usize, |acc, &c| acc * usize::from(self.d) + usize::from(c))
    }

    /// Digit string of a computational index.
    pub fn digits_of(&self, mut idx: usize) -> Vec<u8> {
        let mut digits = vec![0u8; self.n];
        for c in digits.iter_mut().rev() {
            *c = (idx % usize::from(self.d)) as u8;
            idx /= usize::from(self.d);
        }
        digits
    }
}

/// Default ceiling on d^{2n}; override with the SYMPCODE_MAX_DIM environment
/// variable (read once per process).
pub const DEFAULT_MAX_BIPARTITE_DIM: usize = 4096;

pub fn max_bipartite_dim() -> usize {
    use std::sync::OnceLock;
    static LIMIT: OnceLock<usize> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var("SYMPCODE_MAX_DIM")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_MAX_BIPARTITE_DIM)
    })
}

/// Phase convention for the single-digit operators at d = 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PhaseConvention {
    /// i^{ab} X^a Z^b at d = 2: the operators are the Hermitian Pauli
    /// matrices and all stabilizer eigenvalue lists can be taken to one.
    /// Required by code construction.
    #[default]
    Hermitian,
    /// Plain X^a Z^b at every d. At d = 2 the product XZ has eigenvalues ±i,
    /// so joint +1 eigenspaces need not exist; exposed for experiments only.
    Plain,
}

/// Label of a Weyl operator: a vector in F_d^{2n}.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylLabel(FVector);

impl WeylLabel {
    pub fn new(v: FVector) -> Self {
        WeylLabel(v)
    }

    pub fn vector(&self) -> &FVector {
        &self.0
    }

    pub fn dims(&self) -> Dims {
        Dims {
            d: self.0.modulus(),
            n: self.0.digits(),
        }
    }
}

impl From<FVector> for WeylLabel {
    fn from(v: FVector) -> Self {
        WeylLabel(v)
    }
}

/// A Weyl operator in generalized-permutation form: N|l⟩ = phase[l]·|perm[l]⟩.
#[derive(Clone, Debug)]
pub struct WeylAction<R: Real> {
    pub dims: Dims,
    pub perm: Vec<usize>,
    pub phase: Vec<C<R>>,
}

impl<R: Real> WeylAction<R> {
    /// Dense matrix with entries N[perm[l], l] = phase[l].
    pub fn dense(&self) -> CMat<R> {
        let dd = self.dims.dim();
        let mut m = CMat::<R>::zeros(dd, dd);
        for l in 0..dd {
            m[(self.perm[l], l)] = self.phase[l];
        }
        m
    }

    pub fn apply_vec(&self, v: &CVec<R>) -> CVec<R> {
        let dd = self.dims.dim();
        let mut out = CVec::<R>::zeros(dd);
        for l in 0..dd {
            out[self.perm[l]] += self.phase[l] * v[l];
        }
        out
    }

    /// Action of the composition: self ∘ other.
    pub fn compose(&self, other: &WeylAction<R>) -> WeylAction<R> {
        let dd = self.dims.dim();
        let mut perm = vec![0usize; dd];
        let mut phase = vec![Complex::new(R::zero(), R::zero()); dd];
        for l in 0..dd {
            perm[l] = self.perm[other.perm[l]];
            phase[l] = other.phase[l] * self.phase[other.perm[l]];
        }
        WeylAction {
            dims: self.dims,
            perm,
            phase,
        }
    }

    /// Action of the adjoint (inverse, since Weyl operators are unitary).
    pub fn adjoint(&self) -> WeylAction<R> {
        let dd = self.dims.dim();
        let mut perm = vec![0usize; dd];
        let mut phase = vec![Complex::new(R::zero(), R::zero()); dd];
        for l in 0..dd {
            perm[self.perm[l]] = l;
            phase[self.perm[l]] = self.phase[l].conj();
        }
        WeylAction {
            dims: self.dims,
            perm,
            phase,
        }
    }
}

/// Build the action of the labeled Weyl operator under a phase convention.
pub fn weyl_action<R: Real>(y: &WeylLabel, convention: PhaseConvention) -> WeylAction<R> {
    let dims = y.dims();
    let d = dims.d;
    let dd = dims.dim();
    let v = y.vector();
    let mut perm = vec![0usize; dd];
    let mut phase = vec![Complex::new(R::zero(), R::zero()); dd];
    for l in 0..dd {
        let digits = dims.digits_of(l);
        let mut ph: C<R> = c_re(1.0);
        let mut shifted = vec![0u8; dims.n];
        for i in 0..dims.n {
            let (a, b) = (v.x(i), v.z(i));
            // (phase) X^a Z^b |c⟩ = (phase) ω^{bc} |c−a⟩
            ph *= root_of_unity::<R>(d, i64::from(b) * i64::from(digits[i]));
            if d == 2 && convention == PhaseConvention::Hermitian && a == 1 && b == 1 {
                ph *= Complex::new(R::zero(), R::one()); // i^{ab}
            }
            shifted[i] =
                ((u16::from(digits[i]) + u16::from(d) - u16::from(a)) % u16::from(d)) as u8;
        }
        perm[l] = dims.index_of(&shifted);
        phase[l] = ph;
    }
    WeylAction { dims, perm, phase }
}

/// Single-digit Weyl operator as a dense d×d matrix.
pub fn single_weyl<R: Real>(a: u8, b: u8, d: u8) -> Result<DenseOperator<R>> {
    let label = WeylLabel::new(FVector::new(d, vec![a % d, b % d])?);
    Ok(weyl(&label))
}

/// Dense d^n × d^n Weyl operator for a label, Hermitian convention.
pub fn weyl<R: Real>(y: &WeylLabel) -> DenseOperator<R> {
    weyl_with::<R>(y, PhaseConvention::Hermitian)
}

/// Dense Weyl operator under an explicit phase convention.
pub fn weyl_with<R: Real>(y: &WeylLabel, convention: PhaseConvention) -> DenseOperator<R> {
    let action = weyl_action::<R>(y, convention);
    DenseOperator {
        dims: action.dims,
        mat: action.dense(),
    }
}

/// Commutation exponent: N_y N_y′ = ω^{⟨y,y′⟩} N_y′ N_y as a matrix identity.
pub fn commutation_phase(y: &WeylLabel, y2: &WeylLabel) -> Result<u8> {
    Ok(symplectic_form(y.vector(), y2.vector())?.value())
}

/// The unique unit scalar c with N_y N_y′ = c · N_{y+y′}, determined by
/// comparing the two generalized permutations entry by entry.
pub fn product_phase<R: Real>(y: &WeylLabel, y2: &WeylLabel) -> Result<C<R>> {
    let sum = WeylLabel::new(y.vector().add(y2.vector())?);
    let prod = weyl_action::<R>(y, PhaseConvention::Hermitian)
        .compose(&weyl_action::<R>(y2, PhaseConvention::Hermitian));
    let target = weyl_action::<R>(&sum, PhaseConvention::Hermitian);
    if prod.perm != target.perm {
        return Err(Error::Internal(
            "product of Weyl operators is not proportional to the sum label".into(),
        ));
    }
    let c = prod.phase[0] * target.phase[0].conj(); // |target phase| = 1
    let tol = R::from64(1e-10);
    for l in 0..prod.perm.len() {
        if (prod.phase[l] - c * target.phase[l]).norm() > tol {
            return Err(Error::Internal(
                "product of Weyl operators is not a scalar multiple of the sum label".into(),
            ));
        }
    }
    Ok(c)
}

/// A dense operator on (H_d)^{⊗n}.
#[derive(Clone, Debug)]
pub struct DenseOperator<R: Real> {
    pub dims: Dims,
    pub mat: CMat<R>,
}

impl<R: Real> DenseOperator<R> {
    pub fn new(dims: Dims, mat: CMat<R>) -> Result<Self> {
        if mat.nrows() != dims.dim() || mat.ncols() != dims.dim() {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, expected {}x{} for d={} n={}",
                mat.nrows(),
                mat.ncols(),
                dims.dim(),
                dims.dim(),
                dims.d,
                dims.n
            )));
        }
        Ok(Self { dims, mat })
    }

    pub fn identity(dims: Dims) -> Self {
        Self {
            dims,
            mat: CMat::<R>::identity(dims.dim(), dims.dim()),
        }
    }

    /// Max-modulus defect of U U† − I.
    pub fn unitarity_defect(&self) -> f64 {
        let dd = self.dims.dim();
        let prod = &self.mat * self.mat.adjoint();
        crate::scalar::max_abs_diff(&prod, &CMat::<R>::identity(dd, dd))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

/// A complex amplitude vector over (H_d)^{⊗n} or its bipartite double.
#[derive(Clone, Debug)]
pub struct StateVector<R: Real> {
    pub dims: Dims,
    pub amps: CVec<R>,
}

impl<R: Real> StateVector<R> {
    pub fn norm(&self) -> f64 {
        self.amps.norm().to64()
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// ⟨self|other⟩ with the conjugation on `self`.
    pub fn overlap(&self, other: &StateVector<R>) -> C<R> {
        self.amps.dotc(&other.amps)
    }
}

/// Generalized Bell vector |Ψ_y⟩ = d^{−n/2} Σ_l |l⟩ ⊗ N_y|l⟩ on the
/// bipartite space, equal to (I ⊗ N_y)|Ψ_0⟩. The first tensor factor is the
/// more significant index block.
pub fn bell_vector<R: Real>(y: &WeylLabel) -> StateVector<R> {
    let action = weyl_action::<R>(y, PhaseConvention::Hermitian);
    let dims = action.dims;
    let dd = dims.dim();
    let scale = R::from64(1.0 / (dd as f64).sqrt());
    let mut amps = CVec::<R>::zeros(dd * dd);
    for l in 0..dd {
        amps[l * dd + action.perm[l]] = action.phase[l].scale(scale);
    }
    StateVector { dims, amps }
}

/// Enumerate all d^{2n} Weyl labels in enumeration order.
pub fn all_labels(dims: Dims) -> impl Iterator<Item = WeylLabel> {
    crate::fflin::enumerate_vectors(dims.d, 2 * dims.n).map(WeylLabel::new)
}
