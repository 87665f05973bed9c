//! Linear operations on raw operators of an `n`-qubit register.
//!
//! Positions count from the most significant tensor factor (position 0).
//! These functions never renormalize, so they apply equally to density
//! matrices, unnormalized branch operators and Pauli basis elements.

use super::linalg::{CMatrix, ZERO};

#[inline]
fn bit(index: usize, pos: usize, n: usize) -> usize {
    (index >> (n - 1 - pos)) & 1
}

fn sub_index(index: usize, positions: &[usize], n: usize) -> usize {
    positions.iter().fold(0, |acc, &p| (acc << 1) | bit(index, p, n))
}

fn rest_mask(positions: &[usize], n: usize) -> usize {
    let full = (1usize << n) - 1;
    positions.iter().fold(full, |m, &p| m & !(1usize << (n - 1 - p)))
}

/// Lift a `2^k × 2^k` operator acting on `positions` to the whole register.
pub fn embed(op: &CMatrix, positions: &[usize], n: usize) -> CMatrix {
    let dim = 1usize << n;
    let mask = rest_mask(positions, n);
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let si = sub_index(i, positions, n);
        for j in 0..dim {
            if i & mask != j & mask {
                continue;
            }
            out[(i, j)] = op[(si, sub_index(j, positions, n))];
        }
    }
    out
}

/// U ρ U† with `u` acting on `positions`.
pub fn conjugate(rho: &CMatrix, u: &CMatrix, positions: &[usize], n: usize) -> CMatrix {
    let full = embed(u, positions, n);
    &full * rho * full.adjoint()
}

/// Σ K ρ K† with each Kraus operator acting on `positions`.
pub fn apply_kraus(rho: &CMatrix, kraus: &[CMatrix], positions: &[usize], n: usize) -> CMatrix {
    let dim = rho.nrows();
    kraus.iter().fold(CMatrix::zeros(dim, dim), |acc, k| {
        acc + conjugate(rho, k, positions, n)
    })
}

/// Trace out every qubit not listed in `keep` (kept qubits retain their relative order).
pub fn partial_trace(rho: &CMatrix, keep: &[usize], n: usize) -> CMatrix {
    let traced: Vec<usize> = (0..n).filter(|p| !keep.contains(p)).collect();
    let k = keep.len();
    let t = traced.len();
    let out_dim = 1usize << k;
    let mut out = CMatrix::from_element(out_dim, out_dim, ZERO);
    let compose = |a: usize, r: usize| -> usize {
        let mut idx = 0usize;
        for (pos_i, &p) in keep.iter().enumerate() {
            let b = (a >> (k - 1 - pos_i)) & 1;
            idx |= b << (n - 1 - p);
        }
        for (pos_i, &p) in traced.iter().enumerate() {
            let b = (r >> (t - 1 - pos_i)) & 1;
            idx |= b << (n - 1 - p);
        }
        idx
    };
    for a in 0..out_dim {
        for b in 0..out_dim {
            let mut s = ZERO;
            for r in 0..(1usize << t) {
                s += rho[(compose(a, r), compose(b, r))];
            }
            out[(a, b)] = s;
        }
    }
    out
}
