//! Exact linear and symplectic algebra over F_d = Z/dZ with d a small prime.
//!
//! Vectors live in F_d^{2n} with interleaved coordinates
//! (x_1, z_1, …, x_n, z_n); this coordinate order is normative across the
//! crate and all file formats. The symplectic bilinear form
//! ⟨y, y′⟩ = Σ_i x_i z′_i − z_i x′_i governs everything downstream: operator
//! commutation phases, syndromes, dual subspaces, and hyperbolic frames.

mod coset;
mod frame;
mod gauss;
mod subspace;

pub use coset::{
    coset_array, label_from_index, label_index, min_syndrome_transversal, random_self_orthogonal,
    syndrome_of, CosetArray,
};
pub use frame::{assemble_from_frame, expand_in_frame, hyperbolic_complete, HyperbolicFrame};
pub use subspace::FSubspace;

use crate::error::{Error, Result};

/// Supported moduli: the primes the dense side can afford.
pub const SUPPORTED_PRIMES: [u8; 6] = [2, 3, 5, 7, 11, 13];

pub(crate) fn check_modulus(d: u8) -> Result<()> {
    if SUPPORTED_PRIMES.contains(&d) {
        Ok(())
    } else {
        Err(Error::UnsupportedModulus(d))
    }
}

/// An element of F_d, carrying its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldScalar {
    value: u8,
    modulus: u8,
}

// Arithmetic is fallible (runtime moduli must match), so the std operator
// traits do not fit; named methods are intentional.
#[allow(clippy::should_implement_trait)]
impl FieldScalar {
    pub fn new(value: i64, modulus: u8) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Self {
            value: value.rem_euclid(i64::from(modulus)) as u8,
            modulus,
        })
    }

    pub fn value(self) -> u8 {
        self.value
    }

    pub fn modulus(self) -> u8 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    fn check_pair(self, other: Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                lhs: self.modulus,
                rhs: other.modulus,
            });
        }
        Ok(())
    }

    pub fn add(self, other: Self) -> Result<Self> {
        self.check_pair(other)?;
        Ok(Self {
            value: ((u16::from(self.value) + u16::from(other.value)) % u16::from(self.modulus))
                as u8,
            modulus: self.modulus,
        })
    }

    pub fn sub(self, other: Self) -> Result<Self> {
        self.check_pair(other)?;
        self.add(other.neg())
    }

    pub fn mul(self, other: Self) -> Result<Self> {
        self.check_pair(other)?;
        Ok(Self {
            value: ((u16::from(self.value) * u16::from(other.value)) % u16::from(self.modulus))
                as u8,
            modulus: self.modulus,
        })
    }

    pub fn neg(self) -> Self {
        Self {
            value: if self.value == 0 {
                0
            } else {
                self.modulus - self.value
            },
            modulus: self.modulus,
        }
    }

    /// Multiplicative inverse by Fermat's little theorem; `None` for zero.
    pub fn inv(self) -> Option<Self> {
        if self.value == 0 {
            return None;
        }
        Some(Self {
            value: pow_mod(self.value, u16::from(self.modulus) - 2, self.modulus),
            modulus: self.modulus,
        })
    }
}

pub(crate) fn pow_mod(base: u8, mut exp: u16, m: u8) -> u8 {
    let mut acc: u16 = 1;
    let mut b = u16::from(base) % u16::from(m);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % u16::from(m);
        }
        b = b * b % u16::from(m);
        exp >>= 1;
    }
    acc as u8
}

pub(crate) fn add_mod(a: u8, b: u8, d: u8) -> u8 {
    ((u16::from(a) + u16::from(b)) % u16::from(d)) as u8
}

pub(crate) fn sub_mod(a: u8, b: u8, d: u8) -> u8 {
    ((u16::from(a) + u16::from(d) - u16::from(b)) % u16::from(d)) as u8
}

pub(crate) fn mul_mod(a: u8, b: u8, d: u8) -> u8 {
    ((u16::from(a) * u16::from(b)) % u16::from(d)) as u8
}

pub(crate) fn inv_mod(a: u8, d: u8) -> u8 {
    debug_assert!(!a.is_multiple_of(d));
    pow_mod(a, u16::from(d) - 2, d)
}

/// An element of F_d^{2n} in interleaved coordinate order
/// (x_1, z_1, …, x_n, z_n).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FVector {
    d: u8,
    coords: Vec<u8>,
}

#[allow(clippy::should_implement_trait)]
impl FVector {
    pub fn new(d: u8, coords: Vec<u8>) -> Result<Self> {
        check_modulus(d)?;
        if !coords.len().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "vector length {} is odd; expected 2n interleaved coordinates",
                coords.len()
            )));
        }
        if let Some(bad) = coords.iter().find(|&&c| c >= d) {
            return Err(Error::InvalidParameter(format!(
                "coordinate {bad} out of range for modulus {d}"
            )));
        }
        Ok(Self { d, coords })
    }

    pub fn zero(d: u8, two_n: usize) -> Self {
        debug_assert!(two_n.is_multiple_of(2));
        Self {
            d,
            coords: vec![0; two_n],
        }
    }

    pub fn modulus(&self) -> u8 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn digits(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> u8 {
        self.coords[i]
    }

    /// X-component of digit `i` (0-based).
    pub fn x(&self, i: usize) -> u8 {
        self.coords[2 * i]
    }

    /// Z-component of digit `i` (0-based).
    pub fn z(&self, i: usize) -> u8 {
        self.coords[2 * i + 1]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    fn check_pair(&self, other: &Self) -> Result<()> {
        if self.d != other.d {
            return Err(Error::ModulusMismatch {
                lhs: self.d,
                rhs: other.d,
            });
        }
        if self.coords.len() != other.coords.len() {
            return Err(Error::Dimension(format!(
                "vector lengths differ: {} vs {}",
                self.coords.len(),
                other.coords.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        Ok(Self {
            d: self.d,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| add_mod(a, b, self.d))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_pair(other)?;
        Ok(Self {
            d: self.d,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| sub_mod(a, b, self.d))
                .collect(),
        })
    }

    pub fn neg(&self) -> Self {
        Self {
            d: self.d,
            coords: self.coords.iter().map(|&a| sub_mod(0, a, self.d)).collect(),
        }
    }

    pub fn scale(&self, c: u8) -> Self {
        Self {
            d: self.d,
            coords: self
                .coords
                .iter()
                .map(|&a| mul_mod(a, c % self.d, self.d))
                .collect(),
        }
    }

    /// Enumeration index: base-d integer with coordinate 1 least significant.
    /// This is the canonical deterministic order for transversals and
    /// distribution tables.
    pub fn index(&self) -> usize {
        let mut idx = 0usize;
        for &c in self.coords.iter().rev() {
            idx = idx * usize::from(self.d) + usize::from(c);
        }
        idx
    }

    /// Inverse of [`FVector::index`].
    pub fn from_index(d: u8, two_n: usize, mut idx: usize) -> Self {
        let mut coords = vec![0u8; two_n];
        for c in coords.iter_mut() {
            *c = (idx % usize::from(d)) as u8;
            idx /= usize::from(d);
        }
        Self { d, coords }
    }

    /// Comma-joined coordinate string, e.g. `"0,1,0,1"`.
    pub fn label(&self) -> String {
        self.coords
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_label(d: u8, label: &str) -> Result<Self> {
        let coords = label
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u8>()
                    .map_err(|e| Error::Format(format!("bad coordinate {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(d, coords)
    }
}

impl std::fmt::Display for FVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})", self.label())
    }
}

/// All of F_d^{two_n} in enumeration order.
pub fn enumerate_vectors(d: u8, two_n: usize) -> impl Iterator<Item = FVector> {
    let total = usize::from(d).pow(two_n as u32);
    (0..total).map(move |i| FVector::from_index(d, two_n, i))
}

/// The symplectic bilinear form ⟨y, y′⟩ = Σ_i x_i z′_i − z_i x′_i mod d.
pub fn symplectic_form(y: &FVector, y2: &FVector) -> Result<FieldScalar> {
    y.check_pair(y2)?;
    let d = y.d;
    let mut acc: u16 = 0;
    for i in 0..y.digits() {
        let pos = u16::from(mul_mod(y.x(i), y2.z(i), d));
        let neg = u16::from(mul_mod(y.z(i), y2.x(i), d));
        acc = (acc + pos + u16::from(d) - neg) % u16::from(d);
    }
    FieldScalar::new(i64::from(acc), d)
}

/// Unchecked form for internal use where moduli/lengths are already invariant.
pub(crate) fn form_u8(y: &FVector, y2: &FVector) -> u8 {
    debug_assert_eq!(y.d, y2.d);
    debug_assert_eq!(y.coords.len(), y2.coords.len());
    let d = y.d;
    let mut acc: u16 = 0;
    for i in 0..y.digits() {
        let pos = u16::from(mul_mod(y.x(i), y2.z(i), d));
        let neg = u16::from(mul_mod(y.z(i), y2.x(i), d));
        acc = (acc + pos + u16::from(d) - neg) % u16::from(d);
    }
    acc as u8
}
