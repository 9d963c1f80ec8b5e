//! Syndromes, coset transversals, and the coset array of a self-orthogonal
//! subspace.

use rand::Rng;

use super::gauss::nullspace;
use super::subspace::{require_self_orthogonal, symplectic_gram_row};
use super::{enumerate_vectors, form_u8, FSubspace, FVector};
use crate::error::{Error, Result};
use crate::seeding::substream;

/// Syndrome s_i = ⟨g_i, x⟩ against an ordered basis. Constant on cosets of
/// the dual and additive in x.
pub fn syndrome_of(x: &FVector, basis: &[FVector]) -> Vec<u8> {
    basis.iter().map(|g| form_u8(g, x)).collect()
}

/// Big-endian index of a syndrome/logical label (first digit most
/// significant), matching the tensor-factor convention of the dense side.
pub fn label_index(d: u8, label: &[u8]) -> usize {
    label
        .iter()
        .fold(0usize, |acc, &c| acc * usize::from(d) + usize::from(c))
}

/// Inverse of [`label_index`].
pub fn label_from_index(d: u8, len: usize, mut idx: usize) -> Vec<u8> {
    let mut label = vec![0u8; len];
    for c in label.iter_mut().rev() {
        *c = (idx % usize::from(d)) as u8;
        idx /= usize::from(d);
    }
    label
}

/// For each syndrome label s (in label order), the earliest vector of
/// F_d^{2n} in enumeration order with that syndrome. d^{n−k} entries.
pub fn min_syndrome_transversal(l: &FSubspace) -> Vec<FVector> {
    let d = l.modulus();
    let count = usize::from(d).pow(l.dim() as u32);
    let mut reps: Vec<Option<FVector>> = vec![None; count];
    let mut found = 0usize;
    for v in enumerate_vectors(d, l.ambient_len()) {
        let idx = label_index(d, &syndrome_of(&v, l.basis()));
        if reps[idx].is_none() {
            reps[idx] = Some(v);
            found += 1;
            if found == count {
                break;
            }
        }
    }
    reps.into_iter()
        .map(|r| r.expect("syndrome map is onto"))
        .collect()
}

/// A coset array of a self-orthogonal L: rows are the d^{n−k} cosets of L^⊥
/// in F^{2n}, columns the d^{2k} cosets of L in L^⊥; entry (s, u) is the
/// coset y_s + x_u + L.
#[derive(Clone, Debug)]
pub struct CosetArray {
    subspace: FSubspace,
    dual: FSubspace,
    x_reps: Vec<FVector>,
    y_reps: Vec<FVector>,
}

impl CosetArray {
    pub fn subspace(&self) -> &FSubspace {
        &self.subspace
    }

    pub fn dual(&self) -> &FSubspace {
        &self.dual
    }

    /// Transversal of L in L^⊥; d^{2k} entries in enumeration order.
    pub fn x_reps(&self) -> &[FVector] {
        &self.x_reps
    }

    /// Transversal of L^⊥ in F^{2n}; d^{n−k} entries in syndrome-label order.
    pub fn y_reps(&self) -> &[FVector] {
        &self.y_reps
    }

    /// The coset y_s + x_u + L as explicit vectors.
    pub fn entry(&self, s: usize, u: usize) -> Vec<FVector> {
        let shift = self.y_reps[s].add(&self.x_reps[u]).unwrap();
        self.subspace
            .elements()
            .into_iter()
            .map(|e| e.add(&shift).unwrap())
            .collect()
    }
}

/// Build the coset array with deterministic (enumeration-order) transversals.
pub fn coset_array(l: &FSubspace) -> Result<CosetArray> {
    require_self_orthogonal(l)?;
    let d = l.modulus();
    let dual = l.symplectic_dual();

    // Transversal of L inside L^⊥: earliest representative of each L-coset
    // in enumeration order.
    let expected = usize::from(d).pow((dual.dim() - l.dim()) as u32);
    let mut x_reps: Vec<FVector> = Vec::with_capacity(expected);
    let mut seen: Vec<bool> = vec![false; usize::from(d).pow(l.ambient_len() as u32)];
    let l_elements = l.elements();
    let mut dual_elements = dual.elements();
    dual_elements.sort_by_key(FVector::index);
    for v in dual_elements {
        if !seen[v.index()] {
            for e in &l_elements {
                seen[e.add(&v).unwrap().index()] = true;
            }
            x_reps.push(v);
        }
    }
    debug_assert_eq!(x_reps.len(), expected);

    let y_reps = min_syndrome_transversal(l);
    Ok(CosetArray {
        subspace: l.clone(),
        dual,
        x_reps,
        y_reps,
    })
}

/// A seeded self-orthogonal subspace of F_d^{2n} with dim n−k, built by a
/// random maximal chain inside successive symplectic complements.
pub fn random_self_orthogonal(n: usize, k: usize, d: u8, seed: u64) -> Result<FSubspace> {
    super::check_modulus(d)?;
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let two_n = 2 * n;
    let mut rng = substream(seed, "fflin.random_self_orthogonal");
    let mut basis: Vec<FVector> = Vec::with_capacity(n - k);
    while basis.len() < n - k {
        let rows: Vec<Vec<u8>> = basis.iter().map(symplectic_gram_row).collect();
        let complement = nullspace(d, &rows, two_n);
        let span_so_far = FSubspace::span(d, two_n, &basis)?;
        // Random vector orthogonal to the current span, outside it.
        let v = loop {
            let mut coords = vec![0u8; two_n];
            let mut nonzero = false;
            for b in &complement {
                let c: u8 = rng.random_range(0..d);
                if c != 0 {
                    nonzero = true;
                    for (x, bi) in coords.iter_mut().zip(b) {
                        *x = (*x + super::mul_mod(c, *bi, d)) % d;
                    }
                }
            }
            if nonzero {
                let v = FVector::new(d, coords)?;
                if !v.is_zero() && !span_so_far.contains(&v) {
                    break v;
                }
            }
        };
        basis.push(v);
    }
    FSubspace::span(d, two_n, &basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fv(d: u8, c: &[u8]) -> FVector {
        FVector::new(d, c.to_vec()).unwrap()
    }

    fn cat_code() -> FSubspace {
        FSubspace::span(2, 4, &[fv(2, &[0, 1, 0, 1])]).unwrap()
    }

    #[test]
    fn syndrome_examples() {
        let l = cat_code();
        // x in the dual has zero syndrome
        for v in l.symplectic_dual().elements() {
            assert_eq!(syndrome_of(&v, l.basis()), vec![0]);
        }
        // X on digit 1
        assert_eq!(syndrome_of(&fv(2, &[1, 0, 0, 0]), l.basis()), vec![1]);
    }

    #[test]
    fn syndrome_is_additive() {
        let l = cat_code();
        for a in enumerate_vectors(2, 4) {
            for b in enumerate_vectors(2, 4) {
                let lhs = syndrome_of(&a.add(&b).unwrap(), l.basis());
                let rhs: Vec<u8> = syndrome_of(&a, l.basis())
                    .iter()
                    .zip(syndrome_of(&b, l.basis()))
                    .map(|(&x, y)| (x + y) % 2)
                    .collect();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn cat_code_array_counts_and_partition() {
        let arr = coset_array(&cat_code()).unwrap();
        assert_eq!(arr.y_reps().len(), 2); // d^{n-k}
        assert_eq!(arr.x_reps().len(), 4); // d^{2k}
        let mut seen = [false; 16];
        for s in 0..2 {
            for u in 0..4 {
                let entry = arr.entry(s, u);
                assert_eq!(entry.len(), 2); // |L|
                for v in entry {
                    assert!(!seen[v.index()], "overlap at {v}");
                    seen[v.index()] = true;
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn rows_are_dual_cosets() {
        let arr = coset_array(&cat_code()).unwrap();
        let l = cat_code();
        for (s, y) in arr.y_reps().iter().enumerate() {
            let expected = label_from_index(2, 1, s);
            assert_eq!(syndrome_of(y, l.basis()), expected);
            // the whole row has this syndrome
            for u in 0..arr.x_reps().len() {
                for v in arr.entry(s, u) {
                    assert_eq!(syndrome_of(&v, l.basis()), expected);
                }
            }
        }
    }

    #[test]
    fn degenerate_zero_subspace_array() {
        // L = {0}, n = 1, k = 1: the dual is all of F^2, so there is a single
        // row of d^2 singleton cosets partitioning F^2.
        let l = FSubspace::zero(3, 2);
        let arr = coset_array(&l).unwrap();
        assert_eq!(arr.y_reps().len(), 1);
        assert_eq!(arr.x_reps().len(), 9);
        let mut seen = [false; 9];
        for u in 0..9 {
            let entry = arr.entry(0, u);
            assert_eq!(entry.len(), 1);
            for v in entry {
                assert!(!seen[v.index()]);
                seen[v.index()] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn random_self_orthogonal_shapes() {
        for seed in 0..20 {
            let l = random_self_orthogonal(3, 1, 2, seed).unwrap();
            assert_eq!(l.dim(), 2);
            assert!(l.is_self_orthogonal());
        }
        let trivial = random_self_orthogonal(2, 2, 5, 1).unwrap();
        assert_eq!(trivial.dim(), 0);
        assert!(random_self_orthogonal(2, 3, 2, 0).is_err());
    }
}
