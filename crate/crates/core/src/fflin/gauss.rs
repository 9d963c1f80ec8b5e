//! Gaussian elimination over F_d on plain `Vec<u8>` rows.

use super::{inv_mod, mul_mod, sub_mod};

/// Reduced row-echelon form. Returns the nonzero rows and their pivot columns.
// In-place row elimination reads and writes disjoint rows; indexed loops
// keep the borrows simple.
#[allow(clippy::needless_range_loop)]
pub(crate) fn rref(d: u8, mut rows: Vec<Vec<u8>>) -> (Vec<Vec<u8>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..ncols {
        let Some(src) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, src);
        let inv = inv_mod(rows[r][col], d);
        for c in col..ncols {
            rows[r][c] = mul_mod(rows[r][c], inv, d);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][col] != 0 {
                let f = rows[i][col];
                for c in col..ncols {
                    let t = mul_mod(f, rows[r][c], d);
                    rows[i][c] = sub_mod(rows[i][c], t, d);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Reduce `v` against RREF rows in place; the residue is zero iff `v` is in
/// the row span. Returns the coefficients used per row.
pub(crate) fn reduce_against(d: u8, rows: &[Vec<u8>], pivots: &[usize], v: &mut [u8]) -> Vec<u8> {
    let mut coeffs = vec![0u8; rows.len()];
    for (row, (&p, coeff)) in rows.iter().zip(pivots.iter().zip(coeffs.iter_mut())) {
        let f = v[p];
        if f != 0 {
            *coeff = f;
            for (vc, rc) in v.iter_mut().zip(row.iter()) {
                *vc = sub_mod(*vc, mul_mod(f, *rc, d), d);
            }
        }
    }
    coeffs
}

/// One particular solution of `m x = b` in `ncols` unknowns, if any.
pub(crate) fn solve(d: u8, m: &[Vec<u8>], b: &[u8], ncols: usize) -> Option<Vec<u8>> {
    assert_eq!(m.len(), b.len());
    if m.is_empty() {
        return Some(vec![0u8; ncols]);
    }
    debug_assert!(m.iter().all(|r| r.len() == ncols));
    let aug: Vec<Vec<u8>> = m
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    let (rows, pivots) = rref(d, aug);
    // Inconsistent iff a pivot lands in the RHS column.
    if pivots.last().is_some_and(|&p| p == ncols) {
        return None;
    }
    let mut x = vec![0u8; ncols];
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[ncols];
    }
    Some(x)
}

/// Basis of the nullspace {x : m x = 0} in `ncols` unknowns.
pub(crate) fn nullspace(d: u8, m: &[Vec<u8>], ncols: usize) -> Vec<Vec<u8>> {
    debug_assert!(m.iter().all(|r| r.len() == ncols));
    if m.is_empty() {
        return (0..ncols)
            .map(|j| {
                let mut e = vec![0u8; ncols];
                e[j] = 1;
                e
            })
            .collect();
    }
    let (rows, pivots) = rref(d, m.to_vec());
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut x = vec![0u8; ncols];
            x[fc] = 1;
            for (row, &p) in rows.iter().zip(&pivots) {
                // pivot entry is 1, so x[p] = -row[fc]
                x[p] = sub_mod(0, row[fc], d);
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::add_mod;
    use super::*;

    #[test]
    fn empty_systems_use_explicit_width() {
        assert_eq!(solve(3, &[], &[], 4), Some(vec![0; 4]));
        assert_eq!(nullspace(3, &[], 2).len(), 2);
    }

    #[test]
    fn rref_and_solve() {
        let d = 5;
        let m = vec![vec![1, 2, 3], vec![2, 4, 1], vec![0, 1, 1]];
        let b = vec![1, 2, 3];
        let x = solve(d, &m, &b, 3).unwrap();
        for (row, &rhs) in m.iter().zip(&b) {
            let mut acc = 0u8;
            for (a, xi) in row.iter().zip(&x) {
                acc = add_mod(acc, mul_mod(*a, *xi, d), d);
            }
            assert_eq!(acc, rhs);
        }
    }

    #[test]
    fn nullspace_dimension() {
        let d = 3;
        let m = vec![vec![1, 1, 0, 2], vec![0, 0, 1, 1]];
        let ns = nullspace(d, &m, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let mut acc = 0u8;
                for (a, xi) in row.iter().zip(v) {
                    acc = add_mod(acc, mul_mod(*a, *xi, d), d);
                }
                assert_eq!(acc, 0);
            }
        }
    }

    #[test]
    fn inconsistent_system() {
        let d = 2;
        let m = vec![vec![1, 1], vec![1, 1]];
        assert!(solve(d, &m, &[0, 1], 2).is_none());
    }
}
