//! Subspaces of F_d^{2n} with canonical reduced-row-echelon bases.

use super::gauss::{nullspace, reduce_against, rref};
use super::{form_u8, FVector};
use crate::error::{Error, Result};

/// A subspace of F_d^{2n}, stored as a reduced-row-echelon basis so that
/// equal subspaces compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSubspace {
    d: u8,
    two_n: usize,
    basis: Vec<FVector>,
    pivots: Vec<usize>,
}

impl FSubspace {
    /// Span of the given vectors (need not be independent).
    pub fn span(d: u8, two_n: usize, vectors: &[FVector]) -> Result<Self> {
        super::check_modulus(d)?;
        if !two_n.is_multiple_of(2) {
            return Err(Error::Dimension(format!("ambient length {two_n} is odd")));
        }
        for v in vectors {
            if v.modulus() != d {
                return Err(Error::ModulusMismatch {
                    lhs: d,
                    rhs: v.modulus(),
                });
            }
            if v.len() != two_n {
                return Err(Error::Dimension(format!(
                    "vector length {} does not match ambient {two_n}",
                    v.len()
                )));
            }
        }
        let rows: Vec<Vec<u8>> = vectors.iter().map(|v| v.coords().to_vec()).collect();
        let (rows, pivots) = rref(d, rows);
        let basis = rows
            .into_iter()
            .map(|r| FVector::new(d, r).expect("rref preserves range"))
            .collect();
        Ok(Self {
            d,
            two_n,
            basis,
            pivots,
        })
    }

    pub fn zero(d: u8, two_n: usize) -> Self {
        Self {
            d,
            two_n,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(d: u8, two_n: usize) -> Self {
        let vs: Vec<FVector> = (0..two_n)
            .map(|j| {
                let mut c = vec![0u8; two_n];
                c[j] = 1;
                FVector::new(d, c).unwrap()
            })
            .collect();
        Self::span(d, two_n, &vs).unwrap()
    }

    pub fn modulus(&self) -> u8 {
        self.d
    }

    /// Ambient dimension 2n.
    pub fn ambient_len(&self) -> usize {
        self.two_n
    }

    /// Number of digits n.
    pub fn ambient_digits(&self) -> usize {
        self.two_n / 2
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Canonical (RREF) basis rows.
    pub fn basis(&self) -> &[FVector] {
        &self.basis
    }

    pub fn contains(&self, v: &FVector) -> bool {
        if v.modulus() != self.d || v.len() != self.two_n {
            return false;
        }
        let rows: Vec<Vec<u8>> = self.basis.iter().map(|b| b.coords().to_vec()).collect();
        let mut work = v.coords().to_vec();
        reduce_against(self.d, &rows, &self.pivots, &mut work);
        work.iter().all(|&c| c == 0)
    }

    /// Every element of the subspace, in the enumeration order of the
    /// coefficient tuples. d^dim entries.
    pub fn elements(&self) -> Vec<FVector> {
        let d = usize::from(self.d);
        let total = d.pow(self.dim() as u32);
        (0..total)
            .map(|mut idx| {
                let mut acc = FVector::zero(self.d, self.two_n);
                for b in &self.basis {
                    let c = (idx % d) as u8;
                    idx /= d;
                    if c != 0 {
                        acc = acc.add(&b.scale(c)).unwrap();
                    }
                }
                acc
            })
            .collect()
    }

    /// The symplectic dual L^⊥ = { y : ⟨x, y⟩ = 0 for all x ∈ L }.
    pub fn symplectic_dual(&self) -> FSubspace {
        // ⟨b, y⟩ = 0 is the linear condition (J b) · y = 0.
        let m: Vec<Vec<u8>> = self.basis.iter().map(symplectic_gram_row).collect();
        let ns = nullspace(self.d, &m, self.two_n);
        let vs: Vec<FVector> = ns
            .into_iter()
            .map(|r| FVector::new(self.d, r).unwrap())
            .collect();
        FSubspace::span(self.d, self.two_n, &vs).unwrap()
    }

    /// True iff L ⊆ L^⊥, i.e. the form vanishes on all basis pairs.
    pub fn is_self_orthogonal(&self) -> bool {
        self.basis
            .iter()
            .enumerate()
            .all(|(i, a)| self.basis[i..].iter().all(|b| form_u8(a, b) == 0))
    }
}

/// Row of the symplectic Gram map: coefficients of y ↦ ⟨b, y⟩ as a linear
/// functional in y's coordinates.
pub(crate) fn symplectic_gram_row(b: &FVector) -> Vec<u8> {
    let d = b.modulus();
    let mut row = vec![0u8; b.len()];
    for i in 0..b.digits() {
        // ⟨b, y⟩ = Σ b_x y_z − b_z y_x
        row[2 * i + 1] = b.x(i) % d;
        row[2 * i] = super::sub_mod(0, b.z(i), d);
    }
    row
}

/// Convenience check used by operations with a self-orthogonality
/// precondition.
pub(crate) fn require_self_orthogonal(l: &FSubspace) -> Result<()> {
    if l.is_self_orthogonal() {
        Ok(())
    } else {
        Err(Error::NotSelfOrthogonal)
    }
}
