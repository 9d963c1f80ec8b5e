//! Hyperbolic completion: extend a self-orthogonal basis to a full symplectic
//! frame by a constructive Gram–Schmidt sweep, O(n³) field operations.

use rand::Rng;

use super::gauss::{nullspace, solve};
use super::subspace::{require_self_orthogonal, symplectic_gram_row};
use super::{form_u8, FSubspace, FVector};
use crate::error::{Error, Result};
use crate::seeding::substream;

/// Ordered hyperbolic pairs (g_i, h_i), i = 1..n, with
/// ⟨g_i, h_j⟩ = δ_ij, ⟨g_i, g_j⟩ = 0, ⟨h_i, h_j⟩ = 0, whose first n−k
/// g-vectors span the self-orthogonal subspace the frame was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperbolicFrame {
    d: u8,
    n: usize,
    code_k: usize,
    g: Vec<FVector>,
    h: Vec<FVector>,
}

impl HyperbolicFrame {
    pub fn modulus(&self) -> u8 {
        self.d
    }

    pub fn digits(&self) -> usize {
        self.n
    }

    /// Logical digit count k: the first n−k g's span the input subspace.
    pub fn code_k(&self) -> usize {
        self.code_k
    }

    pub fn g(&self) -> &[FVector] {
        &self.g
    }

    pub fn h(&self) -> &[FVector] {
        &self.h
    }

    /// Checks all 3n² frame relations; `Err` names the first violation.
    pub fn validate(&self) -> Result<()> {
        for (i, gi) in self.g.iter().enumerate() {
            for (j, hj) in self.h.iter().enumerate() {
                let want = u8::from(i == j);
                if form_u8(gi, hj) != want {
                    return Err(Error::Construction(format!(
                        "frame relation <g_{}, h_{}> = {} expected {}",
                        i + 1,
                        j + 1,
                        form_u8(gi, hj),
                        want
                    )));
                }
            }
        }
        for (i, a) in self.g.iter().enumerate() {
            for (j, b) in self.g.iter().enumerate().skip(i) {
                if form_u8(a, b) != 0 {
                    return Err(Error::Construction(format!(
                        "frame relation <g_{}, g_{}> /= 0",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (i, a) in self.h.iter().enumerate() {
            for (j, b) in self.h.iter().enumerate().skip(i) {
                if form_u8(a, b) != 0 {
                    return Err(Error::Construction(format!(
                        "frame relation <h_{}, h_{}> /= 0",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Solve the affine system `rows · x = rhs` and return the particular
/// solution shifted by a seeded random nullspace combination.
fn solve_random(
    d: u8,
    two_n: usize,
    rows: &[Vec<u8>],
    rhs: &[u8],
    rng: &mut impl Rng,
) -> Result<FVector> {
    let x0 = solve(d, rows, rhs, two_n)
        .ok_or_else(|| Error::Internal("hyperbolic completion hit an unsolvable system".into()))?;
    let ns = nullspace(d, rows, two_n);
    let mut x = x0;
    for b in &ns {
        let c: u8 = rng.random_range(0..d);
        if c != 0 {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi = (*xi + super::mul_mod(c, *bi, d)) % d;
            }
        }
    }
    FVector::new(d, x)
}

/// Extend a self-orthogonal subspace L (dim n−k) to a full hyperbolic frame
/// whose first n−k g-vectors are the canonical basis of L. Deterministic for
/// a fixed seed; the free choices are drawn from a labeled substream.
pub fn hyperbolic_complete(l: &FSubspace, seed: u64) -> Result<HyperbolicFrame> {
    require_self_orthogonal(l)?;
    let d = l.modulus();
    let two_n = l.ambient_len();
    let n = l.ambient_digits();
    if l.dim() > n {
        return Err(Error::InvalidParameter(format!(
            "self-orthogonal subspace of dim {} exceeds n = {}",
            l.dim(),
            n
        )));
    }
    let code_k = n - l.dim();
    let mut rng = substream(seed, "fflin.hyperbolic_complete");

    let mut g: Vec<FVector> = l.basis().to_vec();
    let mut h: Vec<FVector> = Vec::with_capacity(n);

    while h.len() < n {
        let i = h.len();
        if i == g.len() {
            // Need a fresh g in the symplectic complement of everything so far.
            // Any nonzero solution is automatically outside span(g, h): a
            // combination Σ a_j g_j + b_j h_j orthogonal to every g_j and h_j
            // has all coefficients zero by the frame relations.
            let rows: Vec<Vec<u8>> = g.iter().chain(h.iter()).map(symplectic_gram_row).collect();
            let rhs = vec![0u8; rows.len()];
            let v = loop {
                let v = solve_random(d, two_n, &rows, &rhs, &mut rng)?;
                if !v.is_zero() {
                    break v;
                }
            };
            g.push(v);
        }
        // h_i: ⟨g_j, x⟩ = δ_ij for all current g, ⟨h_j, x⟩ = 0 for j < i.
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(g.len() + i);
        let mut rhs: Vec<u8> = Vec::with_capacity(g.len() + i);
        for (j, gj) in g.iter().enumerate() {
            rows.push(symplectic_gram_row(gj));
            rhs.push(u8::from(j == i));
        }
        for hj in &h {
            rows.push(symplectic_gram_row(hj));
            rhs.push(0);
        }
        h.push(solve_random(d, two_n, &rows, &rhs, &mut rng)?);
    }

    let frame = HyperbolicFrame { d, n, code_k, g, h };
    frame.validate()?;
    Ok(frame)
}

/// Expand x = Σ_i (w_i g_i + z_i h_i) in the frame. The coefficients are
/// recovered as w_i = ⟨x, h_i⟩ and z_i = ⟨g_i, x⟩.
pub fn expand_in_frame(x: &FVector, frame: &HyperbolicFrame) -> (Vec<u8>, Vec<u8>) {
    let w: Vec<u8> = frame.h.iter().map(|hi| form_u8(x, hi)).collect();
    let z: Vec<u8> = frame.g.iter().map(|gi| form_u8(gi, x)).collect();
    (w, z)
}

/// Rebuild Σ_i (w_i g_i + z_i h_i); inverse of [`expand_in_frame`].
pub fn assemble_from_frame(frame: &HyperbolicFrame, w: &[u8], z: &[u8]) -> FVector {
    let d = frame.d;
    let mut acc = FVector::zero(d, 2 * frame.n);
    for (i, (gi, hi)) in frame.g.iter().zip(&frame.h).enumerate() {
        if !w[i].is_multiple_of(d) {
            acc = acc.add(&gi.scale(w[i])).unwrap();
        }
        if !z[i].is_multiple_of(d) {
            acc = acc.add(&hi.scale(z[i])).unwrap();
        }
    }
    acc
}
