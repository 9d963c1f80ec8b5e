//! Scalar abstraction for the dense numeric core.
//!
//! Everything that touches complex matrices or probabilities is generic over
//! a real scalar `R: Real`. `f64` is the working precision (the tolerances
//! used throughout assume it); `f32` instantiations compile and are exercised
//! by a smoke test, nothing more.

use nalgebra::Complex;

/// Floating-point scalar usable by the dense linear-algebra core: f32 or f64.
pub trait Real: nalgebra::RealField + num_traits::Float + num_traits::FromPrimitive + Copy {
    /// Lossy conversion from `f64` (identity for `f64`).
    fn from64(x: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(x).expect("f64 conversion")
    }

    /// Widening conversion to `f64`.
    fn to64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("f64 conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a generic real scalar.
pub type C<R> = Complex<R>;

/// Dense column-major complex matrix.
pub type CMat<R> = nalgebra::DMatrix<Complex<R>>;

/// Dense complex vector.
pub type CVec<R> = nalgebra::DVector<Complex<R>>;

pub(crate) fn c_re<R: Real>(x: f64) -> C<R> {
    Complex::new(R::from64(x), R::zero())
}

/// ω^e with ω = exp(2πi/d), the principal primitive d-th root of unity.
pub fn root_of_unity<R: Real>(d: u8, e: i64) -> C<R> {
    let e = e.rem_euclid(i64::from(d));
    let angle = 2.0 * std::f64::consts::PI * (e as f64) / f64::from(d);
    Complex::new(R::from64(angle.cos()), R::from64(angle.sin()))
}

/// Widen an f64-calibrated tolerance for lower-precision scalars. The
/// documented thresholds apply verbatim at f64; below that precision the
/// floor grows to √ε/10 so structural validations (trace preservation,
/// Hermiticity, eigenvalue clipping) still classify correctly.
pub(crate) fn scaled_tol<R: Real>(base: f64) -> f64 {
    let eps = <R as num_traits::Float>::epsilon().to64();
    if eps <= f64::EPSILON {
        base
    } else {
        base.max(eps.sqrt() * 0.1)
    }
}

/// Max-modulus difference between two matrices of equal shape.
pub fn max_abs_diff<R: Real>(a: &CMat<R>, b: &CMat<R>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in comparison");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm().to64())
        .fold(0.0, f64::max)
}

/// Max-modulus of the Hermitian defect `a - a†`.
pub fn hermitian_defect<R: Real>(a: &CMat<R>) -> f64 {
    max_abs_diff(a, &a.adjoint())
}
