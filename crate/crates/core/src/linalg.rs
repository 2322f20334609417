//! Small dense linear algebra on row-major `Vec<f64>` buffers.

/// Solves `a · x = b` for square `a` (row-major, `dim × dim`) by Gaussian
/// elimination with partial pivoting.
///
/// Returns `None` when a pivot falls below `rel_tol` times the largest entry
/// of `a`.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>, dim: usize, rel_tol: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), dim * dim);
    debug_assert_eq!(b.len(), dim);
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return None;
    }
    let threshold = rel_tol * scale;
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r, &s| a[r * dim + col].abs().total_cmp(&a[s * dim + col].abs()))
            .unwrap();
        if a[pivot_row * dim + col].abs() <= threshold {
            return None;
        }
        if pivot_row != col {
            for c in 0..dim {
                a.swap(col * dim + c, pivot_row * dim + c);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * dim + col];
        for r in col + 1..dim {
            let factor = a[r * dim + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..dim {
                a[r * dim + c] -= factor * a[col * dim + c];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; dim];
    for r in (0..dim).rev() {
        let mut acc = b[r];
        for c in r + 1..dim {
            acc -= a[r * dim + c] * x[c];
        }
        x[r] = acc / a[r * dim + r];
    }
    Some(x)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<f64>, dim: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..dim {
        let pivot_row = (col..dim)
            .max_by(|&r, &s| a[r * dim + col].abs().total_cmp(&a[s * dim + col].abs()))
            .unwrap();
        let pivot = a[pivot_row * dim + col];
        if pivot == 0.0 {
            return 0.0;
        }
        if pivot_row != col {
            for c in 0..dim {
                a.swap(col * dim + c, pivot_row * dim + c);
            }
            det = -det;
        }
        det *= pivot;
        for r in col + 1..dim {
            let factor = a[r * dim + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col + 1..dim {
                a[r * dim + c] -= factor * a[col * dim + c];
            }
        }
    }
    det
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Circumcenter and squared circumradius of `dim + 1` points in `R^dim`.
pub fn circumsphere(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let dim = points.len() - 1;
    let origin = points[0];
    // 2 (p_i - p_0) · c' = |p_i - p_0|^2, with c = p_0 + c'.
    let mut a = Vec::with_capacity(dim * dim);
    let mut b = Vec::with_capacity(dim);
    for p in &points[1..] {
        let diff: Vec<f64> = p.iter().zip(origin).map(|(x, o)| x - o).collect();
        b.push(dot(&diff, &diff));
        a.extend(diff.iter().map(|v| 2.0 * v));
    }
    let offset = solve(a, b, dim, 1e-14)?;
    let r2 = dot(&offset, &offset);
    let center = origin.iter().zip(&offset).map(|(o, c)| o + c).collect();
    Some((center, r2))
}

/// Unsigned volume of the simplex spanned by `dim + 1` points in `R^dim`.
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    let dim = points.len() - 1;
    let origin = points[0];
    let mut a = Vec::with_capacity(dim * dim);
    for p in &points[1..] {
        a.extend(p.iter().zip(origin).map(|(x, o)| x - o));
    }
    let factorial: f64 = (1..=dim).map(|k| k as f64).product();
    determinant(a, dim).abs() / factorial
}
