//! Ray–box slab intersection and ray–simplex intersection.

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::model::BoundingBox;

/// Absolute tolerance on `μ` and on the barycentric coordinates.
pub const HIT_TOLERANCE: f64 = 1e-9;

// Pivots below this fraction of the largest matrix entry count as singular.
const SINGULAR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    pub origin: Vec<f64>,
    pub direction: Vec<f64>,
}

impl Ray {
    pub fn new(origin: Vec<f64>, direction: Vec<f64>) -> Self {
        debug_assert_eq!(origin.len(), direction.len());
        debug_assert!(direction.iter().any(|&d| d != 0.0), "zero ray direction");
        Self { origin, direction }
    }

    /// The selection ray `p + μ·e_{-k}` (or its reverse), where `e_{-k}` is
    /// all ones except a zero at `k`.
    pub fn selection(origin: Vec<f64>, k: usize, reverse: bool) -> Self {
        let s = if reverse { -1.0 } else { 1.0 };
        let direction = (0..origin.len()).map(|i| if i == k { 0.0 } else { s }).collect();
        Self::new(origin, direction)
    }

    pub fn at(&self, mu: f64) -> Vec<f64> {
        self.origin.iter().zip(&self.direction).map(|(o, d)| o + mu * d).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayHit {
    pub simplex_id: usize,
    pub mu: f64,
    /// Weights of `q^(1)..q^(n-1)` relative to `q^(0)`.
    pub lambda: Vec<f64>,
    pub point: Vec<f64>,
}

/// The `μ` interval (clipped to `μ ≥ 0`) over which `ray` lies in `bbox`.
pub fn ray_box(ray: &Ray, bbox: &BoundingBox) -> Option<(f64, f64)> {
    let mut lo = 0.0f64;
    let mut hi = f64::INFINITY;
    for i in 0..ray.origin.len() {
        let (o, d) = (ray.origin[i], ray.direction[i]);
        let (a, b) = (bbox.lower[i], bbox.upper[i]);
        if d == 0.0 {
            if o < a || o > b {
                return None;
            }
            continue;
        }
        let (t0, t1) = ((a - o) / d, (b - o) / d);
        let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        lo = lo.max(t0);
        hi = hi.min(t1);
        if lo > hi {
            return None;
        }
    }
    Some((lo, hi))
}

/// Intersects `ray` with the simplex spanned by `vertices` (`n` points in
/// `R^n`, `vertices[0]` being `q^(0)`). A singular system is a miss.
pub fn ray_simplex<V: AsRef<[f64]>>(ray: &Ray, vertices: &[V], simplex_id: usize) -> Option<RayHit> {
    let n = ray.origin.len();
    debug_assert_eq!(vertices.len(), n);
    let q0 = vertices[0].as_ref();
    // Unknowns (μ, λ_1..λ_{n-1}):  μ·dir − Σ λ_j (q_j − q_0) = q_0 − p.
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n] = ray.direction[i];
        for (j, q) in vertices.iter().enumerate().skip(1) {
            a[i * n + j] = q0[i] - q.as_ref()[i];
        }
    }
    let b: Vec<f64> = (0..n).map(|i| q0[i] - ray.origin[i]).collect();
    let sol = linalg::solve(a, b, n, SINGULAR_TOLERANCE)?;

    let mu = sol[0];
    let mut lambda = sol[1..].to_vec();
    if mu < -HIT_TOLERANCE || lambda.iter().any(|&l| l < -HIT_TOLERANCE) {
        return None;
    }
    for l in &mut lambda {
        *l = l.max(0.0);
    }
    let total: f64 = lambda.iter().sum();
    if total > 1.0 + HIT_TOLERANCE {
        return None;
    }
    if total > 1.0 {
        for l in &mut lambda {
            *l /= total;
        }
    }
    let mu = mu.max(0.0);
    Some(RayHit {
        simplex_id,
        mu,
        point: ray.at(mu),
        lambda,
    })
}

/// `q^(0) + Σ λ_j (q^(j) − q^(0))`.
pub fn interpolate<V: AsRef<[f64]>>(vertices: &[V], lambda: &[f64]) -> Vec<f64> {
    let q0 = vertices[0].as_ref();
    let mut y = q0.to_vec();
    for (q, &l) in vertices[1..].iter().zip(lambda) {
        if l == 0.0 {
            continue;
        }
        for (yi, (qi, q0i)) in y.iter_mut().zip(q.as_ref().iter().zip(q0)) {
            *yi += l * (qi - q0i);
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slab_test_worked_example() {
        let ray = Ray::new(vec![1.0, 2.0], vec![0.0, 1.0]);
        let bbox = BoundingBox::new(vec![0.0, 2.0], vec![2.0, 4.0]);
        assert_eq!(ray_box(&ray, &bbox), Some((0.0, 2.0)));
        let off = BoundingBox::new(vec![0.0, 0.0], vec![2.0, 1.0]);
        assert_eq!(ray_box(&Ray::new(vec![3.0, 0.5], vec![0.0, 1.0]), &off), None);
    }

    #[test]
    fn segment_worked_example() {
        let ray = Ray::new(vec![1.0, 2.0], vec![0.0, 1.0]);
        let hit = ray_simplex(&ray, &[[2.0, 2.0], [0.0, 3.0]], 4).unwrap();
        assert_eq!(hit.simplex_id, 4);
        assert!((hit.mu - 0.5).abs() <= 1e-12);
        assert!((hit.lambda[0] - 0.5).abs() <= 1e-12);
        assert!((hit.point[1] - 2.5).abs() <= 1e-12);
    }

    #[test]
    fn origin_on_a_vertex() {
        let verts = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let hit = ray_simplex(&Ray::selection(verts[0].to_vec(), 0, false), &verts, 0).unwrap();
        assert_eq!(hit.mu, 0.0);
        assert!(hit.lambda.iter().all(|&l| l.abs() <= 1e-15));
    }

    #[test]
    fn parallel_ray_misses() {
        // The ray runs inside the segment's supporting line.
        let ray = Ray::new(vec![0.0, 1.0], vec![1.0, -1.0]);
        assert!(ray_simplex(&ray, &[[1.0, 0.0], [0.0, 1.0]], 0).is_none());
    }

    #[test]
    fn behind_the_origin_misses() {
        let ray = Ray::new(vec![0.5, 1.0], vec![0.0, 1.0]);
        assert!(ray_simplex(&ray, &[[1.0, 0.0], [0.0, 1.0]], 0).is_none());
        let back = Ray::new(vec![0.5, 1.0], vec![0.0, -1.0]);
        let hit = ray_simplex(&back, &[[1.0, 0.0], [0.0, 1.0]], 0).unwrap();
        assert!((hit.mu - 0.5).abs() < 1e-15);
    }

    #[test]
    fn interpolation_reproduces_vertices() {
        let verts = [vec![1.0, 0.0, 5.0], vec![0.0, 1.0, 7.0]];
        assert_eq!(interpolate(&verts, &[0.0]), verts[0]);
        assert_eq!(interpolate(&verts, &[1.0]), verts[1]);
        assert_eq!(interpolate(&verts, &[0.5]), vec![0.5, 0.5, 6.0]);
    }
}
