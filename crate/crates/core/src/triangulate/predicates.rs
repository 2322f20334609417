//! Determinant sign predicates with a floating-point filter, an exact
//! big-integer fallback and symbolic perturbation for exact zeros.
//!
//! Every `f64` is a dyadic rational, so a matrix of doubles has an exactly
//! computable determinant. Perturbable entries carry a global rank; entry
//! `(r, c)` is moved by `ε^(2^rank)`, which makes every sign non-zero and
//! consistent across calls. Lower ranks dominate.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::linalg;

/// Rank of a perturbable entry; `None` marks an entry that is never perturbed.
pub(crate) type Rank = Option<u32>;

// Masks are enumerated in increasing order until a non-zero term shows up.
// Realistic degeneracies resolve within the first few hundred.
const MAX_SOS_TERMS: u64 = 1 << 22;

/// Sign of `det(rows)` after symbolic perturbation. Never returns 0 when at
/// least one full transversal of perturbable entries exists.
pub(crate) fn perturbed_sign(rows: &[&[f64]], ranks: &[&[Rank]]) -> i8 {
    let s = filtered_sign(rows);
    if s != 0 {
        return s;
    }
    sos_sign(rows, ranks)
}

/// Exact sign of `det(rows)` without perturbation.
pub(crate) fn exact_sign(rows: &[&[f64]]) -> i8 {
    let s = filtered_sign(rows);
    if s != 0 {
        return s;
    }
    let dim = rows.len();
    let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    bareiss_sign(to_integers(&flat), dim)
}

/// Floating-point determinant with a conservative error threshold. Returns 0
/// when the sign cannot be certified.
pub(crate) fn filtered_sign(rows: &[&[f64]]) -> i8 {
    let dim = rows.len();
    let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let det = linalg::determinant(flat, dim);
    let hadamard: f64 = rows.iter().map(|r| linalg::norm(r)).product();
    let threshold = 32.0 * (dim * dim) as f64 * f64::EPSILON * hadamard;
    if det > threshold {
        1
    } else if det < -threshold {
        -1
    } else {
        0
    }
}

/// Floating-point determinant value, used only for ranking (never for signs).
pub(crate) fn approximate_det(rows: &[&[f64]]) -> f64 {
    let dim = rows.len();
    let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    linalg::determinant(flat, dim)
}

fn sos_sign(rows: &[&[f64]], ranks: &[&[Rank]]) -> i8 {
    let dim = rows.len();
    let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
    let base = to_integers(&flat);
    let s = bareiss_sign(base.clone(), dim);
    if s != 0 {
        return s;
    }

    let mut entries: Vec<(u32, usize, usize)> = Vec::new();
    for (r, row) in ranks.iter().enumerate() {
        for (c, rank) in row.iter().enumerate() {
            if let Some(rank) = rank {
                entries.push((*rank, r, c));
            }
        }
    }
    entries.sort_unstable();
    let count = entries.len().min(63);

    let mut term = 0u64;
    while term < MAX_SOS_TERMS {
        term += 1;
        if count < 64 && term >= (1u64 << count) {
            break;
        }
        let mut used_rows = 0u128;
        let mut used_cols = 0u128;
        let mut valid = true;
        let mut bits = term;
        let mut replaced: Vec<(usize, usize)> = Vec::new();
        while bits != 0 {
            let pos = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (_, r, c) = entries[pos];
            if used_rows & (1 << r) != 0 || used_cols & (1 << c) != 0 {
                valid = false;
                break;
            }
            used_rows |= 1 << r;
            used_cols |= 1 << c;
            replaced.push((r, c));
        }
        if !valid {
            continue;
        }
        let mut m = base.clone();
        for &(r, c) in &replaced {
            for j in 0..dim {
                m[r * dim + j] = if j == c { BigInt::from(1) } else { BigInt::zero() };
            }
        }
        let s = bareiss_sign(m, dim);
        if s != 0 {
            return s;
        }
    }
    log::warn!("symbolic perturbation did not resolve a degenerate determinant");
    1
}

/// Scales all entries by a common power of two so they become integers.
fn to_integers(values: &[f64]) -> Vec<BigInt> {
    let parts: Vec<(i64, i32)> = values.iter().map(|&v| decompose(v)).collect();
    let min_exp = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    parts
        .into_iter()
        .map(|(mantissa, exp)| {
            if mantissa == 0 {
                BigInt::zero()
            } else {
                BigInt::from(mantissa) << ((exp - min_exp) as usize)
            }
        })
        .collect()
}

// v == mantissa * 2^exp exactly.
fn decompose(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let exponent = ((bits >> 52) & 0x7ff) as i32;
    let fraction = (bits & 0x000f_ffff_ffff_ffff) as i64;
    let (mantissa, exp) = if exponent == 0 {
        (fraction, -1074)
    } else {
        (fraction | (1 << 52), exponent - 1075)
    };
    (sign * mantissa, exp)
}

fn bareiss_sign(mut m: Vec<BigInt>, dim: usize) -> i8 {
    let mut sign = 1i8;
    let mut prev = BigInt::from(1);
    for k in 0..dim {
        if m[k * dim + k].is_zero() {
            let Some(r) = (k + 1..dim).find(|&r| !m[r * dim + k].is_zero()) else {
                return 0;
            };
            for c in 0..dim {
                m.swap(k * dim + c, r * dim + c);
            }
            sign = -sign;
        }
        if k + 1 == dim {
            break;
        }
        for i in k + 1..dim {
            for j in k + 1..dim {
                let v = &m[i * dim + j] * &m[k * dim + k] - &m[i * dim + k] * &m[k * dim + j];
                m[i * dim + j] = v / &prev;
            }
        }
        prev = m[k * dim + k].clone();
    }
    let last = &m[dim * dim - 1];
    if last.is_zero() {
        0
    } else if last.is_positive() {
        sign
    } else {
        -sign
    }
}
