//! Property suites for the exact symplectic algebra layer.

use proptest::prelude::*;

use sympcode::fflin::{
    assemble_from_frame, coset_array, enumerate_vectors, expand_in_frame, hyperbolic_complete,
    label_index, min_syndrome_transversal, random_self_orthogonal, symplectic_form, syndrome_of,
    FSubspace, FVector,
};

fn arb_dn() -> impl Strategy<Value = (u8, usize)> {
    (prop_oneof![Just(2u8), Just(3), Just(5)], 1..=4usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn form_is_antisymmetric((d, n) in arb_dn(), seed in 0u64..1000) {
        let mut vs = arb_two(d, n, seed);
        let a = vs.pop().unwrap();
        let b = vs.pop().unwrap();
        let ab = symplectic_form(&a, &b).unwrap().value();
        let ba = symplectic_form(&b, &a).unwrap().value();
        prop_assert_eq!((ab + ba) % d, 0);
        prop_assert_eq!(symplectic_form(&a, &a).unwrap().value(), 0);
    }

    #[test]
    fn form_is_bilinear((d, n) in arb_dn(), seed in 0u64..1000, c in 0u8..13) {
        let c = c % d;
        let [a, b, x] = three(d, n, seed);
        let lhs = symplectic_form(&a.add(&b.scale(c)).unwrap(), &x).unwrap().value();
        let rhs = (u16::from(symplectic_form(&a, &x).unwrap().value())
            + u16::from(c) * u16::from(symplectic_form(&b, &x).unwrap().value()))
            % u16::from(d);
        prop_assert_eq!(u16::from(lhs), rhs);
        // and in the second argument
        let lhs = symplectic_form(&x, &a.add(&b.scale(c)).unwrap()).unwrap().value();
        let rhs = (u16::from(symplectic_form(&x, &a).unwrap().value())
            + u16::from(c) * u16::from(symplectic_form(&x, &b).unwrap().value()))
            % u16::from(d);
        prop_assert_eq!(u16::from(lhs), rhs);
    }

    #[test]
    fn dual_dimensions_and_involution((d, n) in arb_dn(), k in 0usize..5, seed in 0u64..500) {
        let k = k.min(n);
        let l = random_self_orthogonal(n, k, d, seed).unwrap();
        let dual = l.symplectic_dual();
        prop_assert_eq!(l.dim() + dual.dim(), 2 * n);
        prop_assert_eq!(dual.symplectic_dual(), l.clone());
        prop_assert!(l.is_self_orthogonal());
        // self-orthogonality is containment in the dual
        for b in l.basis() {
            prop_assert!(dual.contains(b));
        }
    }

    #[test]
    fn completion_satisfies_frame_relations((d, n) in (prop_oneof![Just(2u8), Just(3), Just(5)], 1..=5usize), k in 0usize..6, seed in 0u64..500) {
        let k = k.min(n);
        let l = random_self_orthogonal(n, k, d, seed).unwrap();
        let frame = hyperbolic_complete(&l, seed ^ 0xabc).unwrap();
        prop_assert!(frame.validate().is_ok());
        prop_assert_eq!(frame.code_k(), k);
        // first n−k g rows span L
        let g_span = FSubspace::span(d, 2 * n, &frame.g()[..n - k]).unwrap();
        prop_assert_eq!(&g_span, &l);
    }

    #[test]
    fn expansion_roundtrip((d, n) in arb_dn(), k in 0usize..5, seed in 0u64..300, vseed in 0u64..1000) {
        let k = k.min(n);
        let l = random_self_orthogonal(n, k, d, seed).unwrap();
        let frame = hyperbolic_complete(&l, seed).unwrap();
        let total = usize::from(d).pow(2 * n as u32);
        let x = FVector::from_index(d, 2 * n, (vseed as usize) % total);
        let (w, z) = expand_in_frame(&x, &frame);
        prop_assert_eq!(assemble_from_frame(&frame, &w, &z), x);
    }

    #[test]
    fn syndrome_is_linear_and_counts_cosets((n, seed) in (1usize..=3, 0u64..300)) {
        let d = 2u8;
        let k = (seed as usize) % (n + 1);
        let l = random_self_orthogonal(n, k, d, seed).unwrap();
        let basis = l.basis();
        let a = FVector::from_index(d, 2 * n, (seed as usize * 7) % (1 << (2 * n)));
        let b = FVector::from_index(d, 2 * n, (seed as usize * 13) % (1 << (2 * n)));
        let sum: Vec<u8> = syndrome_of(&a, basis)
            .iter()
            .zip(syndrome_of(&b, basis))
            .map(|(&x, y)| (x + y) % d)
            .collect();
        prop_assert_eq!(syndrome_of(&a.add(&b).unwrap(), basis), sum);
    }
}

fn arb_two(d: u8, n: usize, seed: u64) -> Vec<FVector> {
    let total = usize::from(d).pow(2 * n as u32);
    vec![
        FVector::from_index(d, 2 * n, (seed as usize) % total),
        FVector::from_index(d, 2 * n, (seed as usize).wrapping_mul(2654435761) % total),
    ]
}

fn three(d: u8, n: usize, seed: u64) -> [FVector; 3] {
    let total = usize::from(d).pow(2 * n as u32);
    [
        FVector::from_index(d, 2 * n, (seed as usize) % total),
        FVector::from_index(d, 2 * n, (seed as usize).wrapping_mul(2654435761) % total),
        FVector::from_index(d, 2 * n, (seed as usize).wrapping_mul(40503) % total),
    ]
}

/// Exhaustive coset-array partition for every small self-orthogonal space.
#[test]
fn coset_array_partitions_small_spaces() {
    for (d, n) in [(2u8, 1usize), (2, 2), (2, 3), (3, 1), (3, 2)] {
        for k in 0..=n {
            for seed in 0..4u64 {
                let l = random_self_orthogonal(n, k, d, seed).unwrap();
                let arr = coset_array(&l).unwrap();
                let rows = usize::from(d).pow((n - k) as u32);
                let cols = usize::from(d).pow(2 * k as u32);
                assert_eq!(arr.y_reps().len(), rows);
                assert_eq!(arr.x_reps().len(), cols);
                let mut seen = vec![false; usize::from(d).pow(2 * n as u32)];
                for s in 0..rows {
                    for u in 0..cols {
                        for v in arr.entry(s, u) {
                            assert!(!seen[v.index()], "overlap at {v} (d={d} n={n} k={k})");
                            seen[v.index()] = true;
                        }
                    }
                }
                assert!(
                    seen.iter().all(|&b| b),
                    "missing vectors (d={d} n={n} k={k})"
                );
                // each row is exactly the dual coset with that syndrome
                for (s, y) in arr.y_reps().iter().enumerate() {
                    let syndrome = syndrome_of(y, l.basis());
                    assert_eq!(label_index(d, &syndrome), s);
                    let mut row: Vec<usize> = (0..cols)
                        .flat_map(|u| arr.entry(s, u).into_iter().map(|v| v.index()))
                        .collect();
                    row.sort_unstable();
                    let mut coset: Vec<usize> = arr
                        .dual()
                        .elements()
                        .into_iter()
                        .map(|v| v.add(y).unwrap().index())
                        .collect();
                    coset.sort_unstable();
                    assert_eq!(row, coset);
                }
            }
        }
    }
}

/// The syndrome map is a bijection between dual cosets and label tuples.
#[test]
fn syndrome_bijection_is_exhaustive() {
    for (d, n, k) in [(2u8, 2usize, 1usize), (2, 3, 1), (3, 2, 1)] {
        let l = random_self_orthogonal(n, k, d, 11).unwrap();
        let rows = usize::from(d).pow((n - k) as u32);
        let mut counts = vec![0usize; rows];
        for v in enumerate_vectors(d, 2 * n) {
            counts[label_index(d, &syndrome_of(&v, l.basis()))] += 1;
        }
        let dual_size = usize::from(d).pow((n + k) as u32);
        assert!(counts.iter().all(|&c| c == dual_size));
    }
}

/// Transversal representatives are the earliest coset members in
/// enumeration order and carry their own syndrome.
#[test]
fn transversal_minimality() {
    for seed in 0..10u64 {
        let l = random_self_orthogonal(2, 1, 2, seed).unwrap();
        let reps = min_syndrome_transversal(&l);
        for (idx, rep) in reps.iter().enumerate() {
            assert_eq!(label_index(2, &syndrome_of(rep, l.basis())), idx);
            for v in enumerate_vectors(2, 4) {
                if label_index(2, &syndrome_of(&v, l.basis())) == idx {
                    assert!(rep.index() <= v.index());
                    break;
                }
            }
        }
    }
}

/// Random self-orthogonal subspaces always complete to frames.
#[test]
fn random_subspaces_complete_for_many_seeds() {
    for seed in 0..100u64 {
        let n = 1 + (seed as usize % 4);
        let k = seed as usize % (n + 1);
        let d = [2u8, 3, 5][seed as usize % 3];
        let l = random_self_orthogonal(n, k, d, seed).unwrap();
        let frame = hyperbolic_complete(&l, seed).unwrap();
        frame.validate().unwrap();
    }
}
