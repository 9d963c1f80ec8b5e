//! Prime-dimension qudit symplectic (stabilizer) codes over exact finite
//! fields, dense quantum channels via Choi matrices, entanglement-fidelity
//! identities, entanglement distillation, and random-coding exponents.
//!
//! The layering is bottom-up:
//!
//! - [`fflin`] — exact symplectic linear algebra over F_d (d prime ≤ 13):
//!   duals, self-orthogonality, hyperbolic frames, syndromes, coset arrays.
//! - [`weyl`] — the dense unitary Weyl representation of F_d^{2n}, its phase
//!   algebra, and the generalized Bell basis.
//! - [`channels`] — Kraus channels, Choi states, discrete twirling, and the
//!   Weyl-error distribution of a channel.
//! - [`codes`] — code subspaces of a symplectic code, projectors,
//!   syndrome-indexed recovery maps, and logical actions.
//! - [`fidelity`] — entanglement fidelity by simulation and by closed-form
//!   coset sums, plus subspace fidelity inequalities.
//! - [`distill`] — one-way symplectic distillation and the recursive two-way
//!   cat-code protocol with a full bipartite oracle.
//! - [`exponent`] — the random-coding exponent, its positivity threshold,
//!   and two-stage rate arithmetic.
//!
//! Everything dense is generic over the real scalar type through
//! [`scalar::Real`]; the aliases below fix the working `f64` precision that
//! all documented tolerances refer to.

pub mod channels;
pub mod codes;
pub mod distill;
pub mod error;
pub mod exponent;
pub mod fflin;
pub mod fidelity;
pub mod formats;
pub mod scalar;
pub mod seeding;
pub mod weyl;

pub use error::{Error, Result};
pub use scalar::Real;

/// Working-precision complex scalar.
pub type C64 = nalgebra::Complex<f64>;
/// Working-precision dense complex matrix.
pub type Matrix = scalar::CMat<f64>;
/// Working-precision dense complex vector.
pub type Vector = scalar::CVec<f64>;
/// Working-precision dense operator on (H_d)^{⊗n}.
pub type Operator = weyl::DenseOperator<f64>;
/// Working-precision state vector.
pub type State = weyl::StateVector<f64>;
/// Working-precision Kraus channel.
pub type Channel = channels::KrausChannel<f64>;
/// Working-precision Choi state.
pub type Choi = channels::ChoiState<f64>;
/// Working-precision error distribution on F_d^{2m}.
pub type Distribution = channels::ErrorDistribution<f64>;
/// Working-precision symplectic code family.
pub type CodeFamily = codes::SymplecticCodeFamily<f64>;
