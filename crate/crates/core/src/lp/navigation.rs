//! The navigation LPs over barycentric variables `λ_1..λ_{n-1}` of one
//! simplex. Vertices are given in joint (objective then parameter)
//! coordinates; `vertices[0]` is `q^(0)`.
//!
//! Bound rows are emitted only for sides that some vertex violates. The
//! omitted rows are implied by convexity, and leaving them out keeps every
//! solve independent of bounds that cannot bind.

use crate::model::BoundingBox;

use super::simplex::{solve, LpProblem, LpStatus};

/// Minimizes the Chebyshev distance to `p` over the objectives `i ≠ k`,
/// subject to `y_k = p_k` on the simplex and optional joint bounds.
/// `p` holds at least the `n` objective values.
pub fn closest_on_hyperplane<V: AsRef<[f64]>>(
    p: &[f64],
    vertices: &[V],
    k: usize,
    bounds: Option<&BoundingBox>,
) -> Option<(f64, Vec<f64>)> {
    let n = vertices.len();
    debug_assert!(k < n);
    let dist: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    closest(p, vertices, k, &dist, bounds)
}

/// Minimizes the Chebyshev distance to `p` over all `n` objectives subject
/// to the parameter equality `y_k = p_k` (`k` a joint index `≥ n`).
pub fn closest_with_parameter<V: AsRef<[f64]>>(
    p: &[f64],
    vertices: &[V],
    k: usize,
    bounds: Option<&BoundingBox>,
) -> Option<(f64, Vec<f64>)> {
    let n = vertices.len();
    debug_assert!(k >= n && k < vertices[0].as_ref().len());
    let dist: Vec<usize> = (0..n).collect();
    closest(p, vertices, k, &dist, bounds)
}

/// Joint box of the part of the simplex inside `bounds`; `None` when that
/// part is empty.
pub fn simplex_bounding_box<V: AsRef<[f64]>>(vertices: &[V], bounds: Option<&BoundingBox>) -> Option<BoundingBox> {
    let vertex_box = BoundingBox::enclosing(vertices.iter().map(AsRef::as_ref)).expect("non-empty simplex");
    let Some(bounds) = bounds else {
        return Some(vertex_box);
    };
    let dims = vertex_box.dims();
    let n = vertices.len();
    let (a_ub, b_ub) = region_rows(vertices, bounds);
    if a_ub.len() == 1 {
        return Some(vertex_box);
    }
    let q0 = vertices[0].as_ref();
    let mut lower = vec![0.0; dims];
    let mut upper = vec![0.0; dims];
    for c in 0..dims {
        let coeffs: Vec<f64> = vertices[1..].iter().map(|q| q.as_ref()[c] - q0[c]).collect();
        for (sign, out) in [(1.0, &mut lower), (-1.0, &mut upper)] {
            let problem = LpProblem {
                objective: coeffs.iter().map(|v| sign * v).collect(),
                a_ub: a_ub.clone(),
                b_ub: b_ub.clone(),
                ..Default::default()
            };
            let sol = solve(&problem).expect("well-formed navigation LP");
            if sol.status != LpStatus::Optimal {
                return None;
            }
            let lambda = clean_lambda(&sol.z[..n - 1]);
            out[c] = q0[c] + coeffs.iter().zip(&lambda).map(|(a, l)| a * l).sum::<f64>();
        }
    }
    for c in 0..dims {
        let lo = vertex_box.lower[c].max(bounds.lower[c]);
        let hi = vertex_box.upper[c].min(bounds.upper[c]);
        lower[c] = lower[c].clamp(lo, hi.max(lo));
        upper[c] = upper[c].clamp(lo, hi.max(lo)).max(lower[c]);
    }
    Some(BoundingBox::new(lower, upper))
}

/// Rows `A λ ≤ b` for `Σλ ≤ 1` and the violated bound sides.
fn region_rows<V: AsRef<[f64]>>(vertices: &[V], bounds: &BoundingBox) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = vertices.len();
    let q0 = vertices[0].as_ref();
    let dims = q0.len();
    let mut a = vec![vec![1.0; n - 1]];
    let mut b = vec![1.0];
    for i in 0..dims {
        let coeffs: Vec<f64> = vertices[1..].iter().map(|q| q.as_ref()[i] - q0[i]).collect();
        if vertices.iter().any(|q| q.as_ref()[i] < bounds.lower[i]) {
            a.push(coeffs.iter().map(|v| -v).collect());
            b.push(q0[i] - bounds.lower[i]);
        }
        if vertices.iter().any(|q| q.as_ref()[i] > bounds.upper[i]) {
            a.push(coeffs);
            b.push(bounds.upper[i] - q0[i]);
        }
    }
    (a, b)
}

fn closest<V: AsRef<[f64]>>(
    p: &[f64],
    vertices: &[V],
    k: usize,
    dist: &[usize],
    bounds: Option<&BoundingBox>,
) -> Option<(f64, Vec<f64>)> {
    let n = vertices.len();
    let q0 = vertices[0].as_ref();
    let diff = |i: usize| -> Vec<f64> { vertices[1..].iter().map(|q| q.as_ref()[i] - q0[i]).collect() };
    // Variables: λ_1..λ_{n-1}, d.
    let with_d = |coeffs: Vec<f64>, d: f64| -> Vec<f64> {
        let mut row = coeffs;
        row.push(d);
        row
    };
    let (region_a, region_b) = match bounds {
        Some(b) => region_rows(vertices, b),
        None => (vec![vec![1.0; n - 1]], vec![1.0]),
    };
    let mut a_ub: Vec<Vec<f64>> = region_a.into_iter().map(|r| with_d(r, 0.0)).collect();
    let mut b_ub = region_b;
    for &i in dist {
        let c = diff(i);
        a_ub.push(with_d(c.clone(), -1.0));
        b_ub.push(p[i] - q0[i]);
        a_ub.push(with_d(c.iter().map(|v| -v).collect(), -1.0));
        b_ub.push(q0[i] - p[i]);
    }
    let mut objective = vec![0.0; n - 1];
    objective.push(1.0);
    let problem = LpProblem {
        objective,
        a_eq: vec![with_d(diff(k), 0.0)],
        b_eq: vec![p[k] - q0[k]],
        a_ub,
        b_ub,
        free: Vec::new(),
    };
    let sol = solve(&problem).expect("well-formed navigation LP");
    if sol.status != LpStatus::Optimal {
        return None;
    }
    Some((sol.z[n - 1].max(0.0), clean_lambda(&sol.z[..n - 1])))
}

/// Removes round-off below zero and above the unit sum.
fn clean_lambda(raw: &[f64]) -> Vec<f64> {
    let mut lambda: Vec<f64> = raw.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = lambda.iter().sum();
    if total > 1.0 {
        for l in &mut lambda {
            *l /= total;
        }
    }
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raytrace::interpolate;

    fn corners() -> Vec<Vec<f64>> {
        vec![vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0, 2.0], vec![0.0, 0.0, 1.0, 3.0]]
    }

    #[test]
    fn parameter_two_from_the_first_corner() {
        let (d, lambda) = closest_with_parameter(&[1.0, 0.0, 0.0, 2.0], &corners(), 3, None).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        let y = interpolate(&corners(), &lambda);
        for (a, b) in y.iter().zip([0.5, 0.0, 0.5, 2.0]) {
            assert!((a - b).abs() < 1e-12, "{y:?}");
        }
    }

    #[test]
    fn point_on_the_simplex_has_zero_distance() {
        let p = [0.2, 0.3, 0.5];
        let (d, lambda) = closest_on_hyperplane(&p, &corners(), 0, None).unwrap();
        assert!(d.abs() < 1e-12);
        let y = interpolate(&corners(), &lambda);
        for i in 0..3 {
            assert!((y[i] - p[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn unreachable_value_is_absent() {
        assert!(closest_on_hyperplane(&[1.5, 0.0, 0.0], &corners(), 0, None).is_none());
    }

    #[test]
    fn raised_third_lower_bound_shrinks_the_box() {
        let mut bounds = BoundingBox::new(vec![0.0, 0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0, 3.0]);
        bounds.lower[2] = 0.2;
        let bx = simplex_bounding_box(&corners(), Some(&bounds)).unwrap();
        assert!((bx.upper[0] - 0.8).abs() < 1e-12 && (bx.upper[1] - 0.8).abs() < 1e-12);
        assert!((bx.lower[2] - 0.2).abs() < 1e-12 && bx.upper[2] == 1.0);
        // The parameter is linear in λ: x = 1 + λ_1 + 2 λ_2, with f3 = λ_2 ≥ 0.2.
        assert!((bx.lower[3] - 1.4).abs() < 1e-12 && bx.upper[3] == 3.0);
    }

    #[test]
    fn unrestricted_box_is_the_vertex_box() {
        let bx = simplex_bounding_box(&corners(), None).unwrap();
        assert_eq!(bx, BoundingBox::new(vec![0.0, 0.0, 0.0, 1.0], vec![1.0, 1.0, 1.0, 3.0]));
        let loose = BoundingBox::new(vec![-1.0; 4], vec![5.0; 4]);
        assert_eq!(simplex_bounding_box(&corners(), Some(&loose)).unwrap(), bx);
    }

    #[test]
    fn cut_off_simplex_has_no_box() {
        let bounds = BoundingBox::new(vec![0.6, 0.6, 0.0, 0.0], vec![1.0, 1.0, 1.0, 3.0]);
        assert!(simplex_bounding_box(&corners(), Some(&bounds)).is_none());
    }
}
