//! Brute-force reference computations. Everything here is deliberately
//! naive and shares no code with the library it checks.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

fn matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

/// LU solve of a square system; `None` when (numerically) singular.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let lu = matrix(a).lu();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let u = lu.u();
    let min_pivot = (0..u.nrows()).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if scale == 0.0 || min_pivot <= 1e-12 * scale {
        return None;
    }
    lu.solve(&DVector::from_column_slice(b)).map(|x| x.iter().copied().collect())
}

pub fn det(rows: &[Vec<f64>]) -> f64 {
    matrix(rows).determinant()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

// ---------------------------------------------------------------- Delaunay

/// Circumcenter and circumradius of `d + 1` points in `R^d`.
pub fn circumsphere(points: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let p0 = points[0];
    let a: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, p0).iter().map(|v| 2.0 * v).collect()).collect();
    let b: Vec<f64> = points[1..]
        .iter()
        .map(|p| {
            let d = sub(p, p0);
            dot(&d, &d)
        })
        .collect();
    let offset = solve(&a, &b)?;
    let center: Vec<f64> = p0.iter().zip(&offset).map(|(x, o)| x + o).collect();
    Some((center, norm(&offset)))
}

/// Pairs `(simplex, point)` where `point` lies inside the circumsphere of
/// `simplex` by more than `rel_tol` times its radius.
pub fn circumsphere_violations(points: &[Vec<f64>], simplices: &[Vec<usize>], rel_tol: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (s, simplex) in simplices.iter().enumerate() {
        let verts: Vec<&[f64]> = simplex.iter().map(|&i| points[i].as_slice()).collect();
        let Some((center, r)) = circumsphere(&verts) else {
            out.push((s, usize::MAX));
            continue;
        };
        for (j, p) in points.iter().enumerate() {
            if simplex.contains(&j) {
                continue;
            }
            if norm(&sub(p, &center)) < r * (1.0 - rel_tol) {
                out.push((s, j));
            }
        }
    }
    out
}

/// Unsigned volume of a `d`-simplex in `R^d`.
pub fn simplex_volume(points: &[&[f64]]) -> f64 {
    let d = points.len() - 1;
    let rows: Vec<Vec<f64>> = points[1..].iter().map(|p| sub(p, points[0])).collect();
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    det(&rows).abs() / fact
}

/// Volume of the convex hull of points in `R^1`, `R^2` or `R^3` (general
/// position assumed in 3D).
pub fn convex_hull_volume(points: &[Vec<f64>]) -> f64 {
    match points[0].len() {
        1 => {
            let (lo, hi) = points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
            hi - lo
        }
        2 => polygon_area(&monotone_chain(points)),
        3 => hull_volume_3d(points),
        d => panic!("hull volume oracle supports up to 3 dimensions, got {d}"),
    }
}

fn cross2(o: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn monotone_chain(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross2(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(poly: &[Vec<f64>]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (&poly[i], &poly[(i + 1) % n]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

fn cross3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn hull_volume_3d(points: &[Vec<f64>]) -> f64 {
    let k = points.len();
    let centroid: Vec<f64> = (0..3).map(|c| points.iter().map(|p| p[c]).sum::<f64>() / k as f64).collect();
    let scale = points.iter().map(|p| norm(&sub(p, &centroid))).fold(0.0, f64::max);
    let mut volume = 0.0;
    for (i, j, l) in (0..k).tuple_combinations() {
        let normal = cross3(&sub(&points[j], &points[i]), &sub(&points[l], &points[i]));
        let nn = norm(&normal);
        if nn <= 1e-14 * scale * scale {
            continue;
        }
        let side = |p: &[f64]| dot(&normal, &sub(p, &points[i])) / nn;
        let tol = 1e-12 * scale;
        let (mut pos, mut neg) = (false, false);
        for (q, p) in points.iter().enumerate() {
            if q == i || q == j || q == l {
                continue;
            }
            let s = side(p);
            pos |= s > tol;
            neg |= s < -tol;
            if pos && neg {
                break;
            }
        }
        if !(pos && neg) {
            volume += (dot(&normal, &sub(&points[i], &centroid))).abs() / 6.0;
        }
    }
    volume
}

/// Number of downward facets of the points lifted onto `h = |x|^2`, by
/// testing every `(d+1)`-subset against all other points.
pub fn lower_hull_facet_count(points: &[Vec<f64>]) -> usize {
    let d = points[0].len();
    let lifted_h: Vec<f64> = points.iter().map(|p| dot(p, p)).collect();
    let scale = lifted_h.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    (0..points.len())
        .combinations(d + 1)
        .filter(|subset| {
            // Plane h = a·x + b through the subset.
            let a: Vec<Vec<f64>> = subset
                .iter()
                .map(|&i| {
                    let mut r = points[i].clone();
                    r.push(1.0);
                    r
                })
                .collect();
            let b: Vec<f64> = subset.iter().map(|&i| lifted_h[i]).collect();
            let Some(coef) = solve(&a, &b) else {
                return false;
            };
            (0..points.len()).filter(|j| !subset.contains(j)).all(|j| {
                let plane = dot(&coef[..d], &points[j]) + coef[d];
                lifted_h[j] - plane > -1e-12 * scale
            })
        })
        .count()
}

// ---------------------------------------------------------------- rays

/// Intersection of `origin + μ·dir` with the simplex `verts` (n points in
/// `R^n`), via Cramer-free LU and an explicit inside test.
pub fn ray_simplex(origin: &[f64], dir: &[f64], verts: &[Vec<f64>], tol: f64) -> Option<(f64, Vec<f64>)> {
    let n = origin.len();
    let a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row = vec![dir[i]];
            row.extend(verts[1..].iter().map(|q| verts[0][i] - q[i]));
            row
        })
        .collect();
    let b: Vec<f64> = (0..n).map(|i| verts[0][i] - origin[i]).collect();
    let x = solve(&a, &b)?;
    let (mu, lambda) = (x[0], x[1..].to_vec());
    let inside = mu >= -tol && lambda.iter().all(|&l| l >= -tol) && lambda.iter().sum::<f64>() <= 1.0 + tol;
    inside.then_some((mu, lambda))
}

// ---------------------------------------------------------------- LPs

/// `min c·z` s.t. `A_ub z ≤ b_ub`, `A_eq z = b_eq`, `z ≥ 0`.
#[derive(Debug, Clone)]
pub struct TinyLp {
    pub c: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

/// Optimal value by enumerating every basic solution; `None` when no
/// feasible vertex exists. Only valid for bounded problems.
pub fn vertex_enumeration(lp: &TinyLp, tol: f64) -> Option<f64> {
    let nv = lp.c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = lp.a_ub.iter().cloned().zip(lp.b_ub.iter().copied()).collect();
    for i in 0..nv {
        let mut r = vec![0.0; nv];
        r[i] = -1.0;
        rows.push((r, 0.0));
    }
    let eq: Vec<(Vec<f64>, f64)> = lp.a_eq.iter().cloned().zip(lp.b_eq.iter().copied()).collect();
    if eq.len() > nv {
        return None;
    }
    let feasible = |z: &[f64]| {
        rows.iter().all(|(a, b)| dot(a, z) <= b + tol) && eq.iter().all(|(a, b)| (dot(a, z) - b).abs() <= tol)
    };
    let mut best: Option<f64> = None;
    for tight in (0..rows.len()).combinations(nv - eq.len()) {
        let mut a: Vec<Vec<f64>> = eq.iter().map(|(r, _)| r.clone()).collect();
        let mut b: Vec<f64> = eq.iter().map(|(_, v)| *v).collect();
        for &t in &tight {
            a.push(rows[t].0.clone());
            b.push(rows[t].1);
        }
        let Some(z) = solve(&a, &b) else { continue };
        if feasible(&z) {
            let v = dot(&lp.c, &z);
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    }
    best
}

fn interpolate(verts: &[Vec<f64>], lambda: &[f64]) -> Vec<f64> {
    let mut y = verts[0].clone();
    for (q, l) in verts[1..].iter().zip(lambda) {
        for (yi, (qi, q0)) in y.iter_mut().zip(q.iter().zip(&verts[0])) {
            *yi += l * (qi - q0);
        }
    }
    y
}

/// Grid search for `min max_{i∈dist} |y_i − p_i|` over the triangle
/// `verts` (three joint points) restricted to `y_k = p_k`. The constraint
/// line is parametrized by one weight, solving for the other.
pub fn grid_closest(p: &[f64], verts: &[Vec<f64>], k: usize, dist: &[usize], step: f64) -> Option<f64> {
    assert_eq!(verts.len(), 3, "grid oracle handles triangles");
    let d = [verts[1][k] - verts[0][k], verts[2][k] - verts[0][k]];
    let c = p[k] - verts[0][k];
    let value = |lambda: &[f64]| {
        let y = interpolate(verts, lambda);
        dist.iter().map(|&i| (y[i] - p[i]).abs()).fold(0.0, f64::max)
    };
    let (dep, ind) = if d[0].abs() >= d[1].abs() { (0, 1) } else { (1, 0) };
    if d[dep].abs() < 1e-14 {
        if c.abs() > 1e-12 {
            return None;
        }
        return grid_triangle(step).map(|l| value(&l)).min_by(f64::total_cmp);
    }
    // λ_dep = α + β t with t = λ_ind.
    let (alpha, beta) = (c / d[dep], -d[ind] / d[dep]);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // α + β t ≥ 0 and (1 + β) t ≤ 1 − α.
    for (coef, rhs) in [(-beta, alpha), (1.0 + beta, 1.0 - alpha)] {
        if coef.abs() < 1e-15 {
            if rhs < -1e-12 {
                return None;
            }
        } else if coef > 0.0 {
            hi = hi.min(rhs / coef);
        } else {
            lo = lo.max(rhs / coef);
        }
    }
    if lo > hi + 1e-12 {
        return None;
    }
    let hi = hi.max(lo);
    let steps = ((hi - lo) / step).ceil() as usize;
    (0..=steps)
        .map(|s| (lo + s as f64 * step).min(hi))
        .map(|t| {
            let mut lambda = [0.0; 2];
            lambda[ind] = t;
            lambda[dep] = (alpha + beta * t).max(0.0);
            value(&lambda)
        })
        .min_by(f64::total_cmp)
}

fn grid_triangle(step: f64) -> impl Iterator<Item = [f64; 2]> {
    let steps = (1.0 / step).round() as usize;
    (0..=steps).flat_map(move |i| (0..=steps - i).map(move |j| [i as f64 * step, j as f64 * step]))
}

/// Componentwise min/max over grid points of the triangle that satisfy
/// `lower ≤ y ≤ upper`.
pub fn grid_bounding_box(verts: &[Vec<f64>], lower: &[f64], upper: &[f64], step: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    assert_eq!(verts.len(), 3, "grid oracle handles triangles");
    let dims = verts[0].len();
    let mut out: Option<(Vec<f64>, Vec<f64>)> = None;
    for lambda in grid_triangle(step) {
        let y = interpolate(verts, &lambda);
        if (0..dims).any(|i| y[i] < lower[i] || y[i] > upper[i]) {
            continue;
        }
        match &mut out {
            None => out = Some((y.clone(), y)),
            Some((lo, hi)) => {
                for i in 0..dims {
                    lo[i] = lo[i].min(y[i]);
                    hi[i] = hi[i].max(y[i]);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------- meshes

/// Distance from the origin to the segment `[a, b]`.
pub fn segment_min_norm(a: &[f64], b: &[f64]) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    let t = if len2 > 0.0 { (-dot(a, &ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm(&a.iter().zip(&ab).map(|(x, d)| x + t * d).collect::<Vec<_>>())
}

/// Distance from the origin to the triangle `abc` in `R^3`.
pub fn triangle_min_norm(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    let (e1, e2) = (sub(b, a), sub(c, a));
    // Closest point of the plane: a + s e1 + t e2 with gradient zero.
    let g = [vec![dot(&e1, &e1), dot(&e1, &e2)], vec![dot(&e1, &e2), dot(&e2, &e2)]];
    if let Some(st) = solve(&g, &[-dot(a, &e1), -dot(a, &e2)]) {
        let (s, t) = (st[0], st[1]);
        if s >= 0.0 && t >= 0.0 && s + t <= 1.0 {
            let q: Vec<f64> = (0..3).map(|i| a[i] + s * e1[i] + t * e2[i]).collect();
            return norm(&q);
        }
    }
    segment_min_norm(a, b).min(segment_min_norm(b, c)).min(segment_min_norm(a, c))
}

/// Chebyshev distance between two vectors over `dims`.
pub fn chebyshev(a: &[f64], b: &[f64], dims: impl IntoIterator<Item = usize>) -> f64 {
    dims.into_iter().map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_hull_and_circle() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0], vec![0.5, 0.5]];
        assert!((convex_hull_volume(&pts) - 1.0).abs() < 1e-15);
        let (c, r) = circumsphere(&[&pts[0], &pts[1], &pts[3]]).unwrap();
        assert!((c[0] - 0.5).abs() < 1e-15 && (r - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tetrahedron_volume() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.1, 0.2, 0.3],
        ];
        assert!((convex_hull_volume(&pts) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn vertex_enumeration_small() {
        // min −x − y s.t. x + 2y ≤ 4, 3x + y ≤ 6 → (1.6, 1.2), value −2.8.
        let lp = TinyLp {
            c: vec![-1.0, -1.0],
            a_ub: vec![vec![1.0, 2.0], vec![3.0, 1.0]],
            b_ub: vec![4.0, 6.0],
            a_eq: vec![],
            b_eq: vec![],
        };
        assert!((vertex_enumeration(&lp, 1e-9).unwrap() + 2.8).abs() < 1e-12);
    }

    #[test]
    fn triangle_distance() {
        let (a, b, c) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        assert!((triangle_min_norm(&a, &b, &c) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        let (a, b, c) = ([1.0, 1.0, 0.0], [2.0, 1.0, 0.0], [1.0, 2.0, 0.0]);
        assert!((triangle_min_norm(&a, &b, &c) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn grid_closest_on_the_corner_triangle() {
        let verts = vec![vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0, 2.0], vec![0.0, 0.0, 1.0, 3.0]];
        let d = grid_closest(&[1.0, 0.0, 0.0, 2.0], &verts, 3, &[0, 1, 2], 1e-3).unwrap();
        assert!((d - 0.5).abs() < 1e-3);
    }
}
