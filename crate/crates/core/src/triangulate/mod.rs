//! Pareto front triangulation: project the points along `e = (1, ..., 1)`
//! onto an `(n-1)`-dimensional plane, Delaunay-triangulate the projections,
//! and reuse that connectivity on the original points.

mod hull;
pub(crate) mod predicates;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg;
use crate::model::{BoundingBox, ParetoSet};

/// Triangulation becomes impractically slow beyond ten objectives.
pub const MAX_OBJECTIVES: usize = 10;

/// Projected points closer than this (relative to the point cloud extent)
/// are considered the same site.
pub const COLLISION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TriangulationError {
    #[error("{0} objectives exceed the supported maximum of {MAX_OBJECTIVES}")]
    TooManyObjectives(usize),
    #[error("points {first} and {second} project onto the same site (front folds along e)")]
    ProjectionCollision { first: usize, second: usize },
    #[error("projected points are affinely dependent; no full-dimensional simplex exists")]
    AffinelyDependent,
    #[error("{points} points are too few for dimension {dims}")]
    TooFewPoints { points: usize, dims: usize },
}

/// An `(n-1)`-simplex `D_i` of the front, by indices into the Pareto set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simplex {
    pub id: usize,
    /// Ascending point indices; `vertex_ids[0]` plays the role of `q^(0)`.
    pub vertex_ids: Vec<usize>,
}

/// The triangulated front `D`, sharing its point set.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pareto_set: Arc<ParetoSet>,
    simplices: Vec<Simplex>,
    basis: Vec<Vec<f64>>,
    projected: Vec<Vec<f64>>,
}

/// JSON mesh export: `{"n":..,"m":..,"simplices":[[i0..i_{n-1}],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshExport {
    pub n: usize,
    pub m: usize,
    pub simplices: Vec<Vec<usize>>,
}

impl Triangulation {
    pub fn pareto_set(&self) -> &Arc<ParetoSet> {
        &self.pareto_set
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn projection_basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Projected site of every Pareto point, in point order.
    pub fn projected_points(&self) -> &[Vec<f64>] {
        &self.projected
    }

    /// Joint (objective then parameter) coordinates of the simplex vertices.
    pub fn joint_vertices(&self, simplex: usize) -> Vec<Vec<f64>> {
        self.simplices[simplex]
            .vertex_ids
            .iter()
            .map(|&v| self.pareto_set.joint(v))
            .collect()
    }

    /// Ideal/nadir box of the triangulation in joint coordinates.
    pub fn joint_bounds(&self) -> BoundingBox {
        self.pareto_set.joint_bounds()
    }

    /// Pairs `(simplex, point)` where a projected site lies inside the
    /// simplex's circumsphere by more than `rel_tol` of the radius. Empty for
    /// a Delaunay triangulation. Brute force over all sites.
    pub fn delaunay_violations(&self, rel_tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for s in &self.simplices {
            let verts: Vec<&[f64]> = s.vertex_ids.iter().map(|&v| self.projected[v].as_slice()).collect();
            let Some((center, r2)) = linalg::circumsphere(&verts) else {
                continue;
            };
            let limit = r2.sqrt() * (1.0 - rel_tol);
            for (j, p) in self.projected.iter().enumerate() {
                if s.vertex_ids.contains(&j) {
                    continue;
                }
                let d: Vec<f64> = p.iter().zip(&center).map(|(a, c)| a - c).collect();
                if linalg::norm(&d) < limit {
                    out.push((s.id, j));
                }
            }
        }
        out
    }

    pub fn export(&self) -> MeshExport {
        MeshExport {
            n: self.pareto_set.n(),
            m: self.pareto_set.m(),
            simplices: self.simplices.iter().map(|s| s.vertex_ids.clone()).collect(),
        }
    }
}

/// `n - 1` orthonormal vectors spanning the plane orthogonal to `e`.
///
/// Built from the Householder reflection that maps `e / sqrt(n)` onto the
/// last coordinate axis; its remaining rows span the complement.
pub fn projection_basis(n: usize) -> Vec<Vec<f64>> {
    assert!(n >= 2, "projection needs at least two objectives");
    let s = 1.0 / (n as f64).sqrt();
    let mut v = vec![s; n];
    v[n - 1] -= 1.0;
    let vtv = linalg::dot(&v, &v);
    (0..n - 1)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    delta - 2.0 * v[i] * v[j] / vtv
                })
                .collect()
        })
        .collect()
}

/// Coordinates of `f` in the projection plane.
pub fn project_point(basis: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
    basis.iter().map(|b| linalg::dot(b, f)).collect()
}

/// Projects every point of `ps`, rejecting sites that coincide.
pub fn project(ps: &ParetoSet, basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, TriangulationError> {
    let projected: Vec<Vec<f64>> = ps.points().iter().map(|p| project_point(basis, &p.f)).collect();
    if let Some((first, second)) = find_collision(&projected) {
        return Err(TriangulationError::ProjectionCollision { first, second });
    }
    Ok(projected)
}

fn find_collision(points: &[Vec<f64>]) -> Option<(usize, usize)> {
    let extent = BoundingBox::enclosing(points.iter().map(Vec::as_slice))
        .map(|b| b.widths().into_iter().fold(0.0, f64::max))
        .unwrap_or(0.0);
    let tol = COLLISION_TOLERANCE * extent.max(1.0);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a][0].total_cmp(&points[b][0]).then(a.cmp(&b)));
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if points[j][0] - points[i][0] > tol {
                break;
            }
            let dist2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b).powi(2)).sum();
            if dist2.sqrt() <= tol {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// Delaunay triangulation of `points` in `R^d` as sorted vertex index sets of
/// size `d + 1`, via the lower convex hull of the points lifted onto a
/// paraboloid. Output order is deterministic.
pub fn delaunay(points: &[Vec<f64>]) -> Result<Vec<Vec<usize>>, TriangulationError> {
    let k = points.len();
    let d = points.first().map_or(0, Vec::len);
    if k < d + 1 || d == 0 {
        return Err(TriangulationError::TooFewPoints { points: k, dims: d });
    }
    // Lifting around the centroid changes the heights by an affine function
    // only, which leaves the lower hull intact but keeps magnitudes small.
    let centroid: Vec<f64> = (0..d)
        .map(|c| points.iter().map(|p| p[c]).sum::<f64>() / k as f64)
        .collect();
    let centered: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&centroid).map(|(a, b)| a - b).collect())
        .collect();
    if affine_rank(&centered) < d {
        return Err(TriangulationError::AffinelyDependent);
    }
    if k == d + 1 {
        return Ok(vec![(0..k).collect()]);
    }
    Ok(hull::lower_hull_simplices(&centered))
}

fn affine_rank(points: &[Vec<f64>]) -> usize {
    let extent = BoundingBox::enclosing(points.iter().map(Vec::as_slice))
        .map(|b| b.widths().into_iter().fold(0.0, f64::max))
        .unwrap_or(0.0);
    if extent == 0.0 {
        return 0;
    }
    let tol = 1e-10 * extent;
    let origin = &points[0];
    let mut residuals: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    let mut rank = 0;
    loop {
        let Some((best, norm)) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, linalg::norm(r)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            return rank;
        };
        if norm <= tol {
            return rank;
        }
        rank += 1;
        let axis: Vec<f64> = residuals.swap_remove(best).iter().map(|v| v / norm).collect();
        for r in &mut residuals {
            let proj = linalg::dot(r, &axis);
            for (x, a) in r.iter_mut().zip(&axis) {
                *x -= proj * a;
            }
        }
    }
}

/// Builds the triangulation `D` of a Pareto set.
pub fn build_triangulation(ps: Arc<ParetoSet>) -> Result<Triangulation, TriangulationError> {
    let n = ps.n();
    if n > MAX_OBJECTIVES {
        return Err(TriangulationError::TooManyObjectives(n));
    }
    let basis = projection_basis(n);
    let projected = project(&ps, &basis)?;
    let simplices = delaunay(&projected)?
        .into_iter()
        .enumerate()
        .map(|(id, vertex_ids)| Simplex { id, vertex_ids })
        .collect();
    Ok(Triangulation {
        pareto_set: ps,
        simplices,
        basis,
        projected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ParetoPoint;

    fn set(points: &[&[f64]]) -> Arc<ParetoSet> {
        let pts = points
            .iter()
            .map(|f| ParetoPoint { f: f.to_vec(), x: vec![] })
            .collect();
        Arc::new(ParetoSet::from_points(pts, vec![], vec![]).unwrap().0)
    }

    #[test]
    fn basis_in_two_dimensions() {
        let b = projection_basis(2);
        assert_eq!(b.len(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((b[0][0].abs() - s).abs() < 1e-15);
        assert!((b[0][0] + b[0][1]).abs() < 1e-15);
    }

    #[test]
    fn basis_gram_is_identity() {
        for n in 2..=10 {
            let b = projection_basis(n);
            for i in 0..n - 1 {
                assert!(b[i].iter().sum::<f64>().abs() < 1e-14);
                for j in 0..n - 1 {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((linalg::dot(&b[i], &b[j]) - expected).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn unit_vectors_project_to_equilateral_triangle() {
        let ps = set(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let p = project(&ps, &projection_basis(3)).unwrap();
        let dist = |a: &[f64], b: &[f64]| linalg::norm(&[a[0] - b[0], a[1] - b[1]]);
        let (d01, d12, d02) = (dist(&p[0], &p[1]), dist(&p[1], &p[2]), dist(&p[0], &p[2]));
        assert!((d01 - d12).abs() < 1e-14 && (d01 - d02).abs() < 1e-14);
        assert!((d01 - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn points_differing_by_e_collide() {
        let ps = set(&[&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0], &[1.0, 0.0, 0.0]]);
        assert_eq!(
            project(&ps, &projection_basis(3)),
            Err(TriangulationError::ProjectionCollision { first: 0, second: 1 })
        );
    }

    #[test]
    fn square_gives_two_triangles() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let tris = delaunay(&pts).unwrap();
        assert_eq!(tris.len(), 2);
        // Both triangles share one diagonal.
        let shared: Vec<usize> = tris[0].iter().copied().filter(|v| tris[1].contains(v)).collect();
        assert_eq!(shared.len(), 2);
        assert!(shared == vec![0, 2] || shared == vec![1, 3]);
        assert_eq!(delaunay(&pts).unwrap(), tris);
    }

    #[test]
    fn minimal_and_degenerate_inputs() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(delaunay(&pts).unwrap(), vec![vec![0, 1, 2]]);
        let collinear = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        assert_eq!(delaunay(&collinear), Err(TriangulationError::AffinelyDependent));
    }

    #[test]
    fn collinear_hull_boundary_is_tiled() {
        // A 3x3 grid: cocircular quadruples and collinear hull edges.
        let mut pts = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                pts.push(vec![i as f64, j as f64]);
            }
        }
        let tris = delaunay(&pts).unwrap();
        assert_eq!(tris.len(), 8);
        let area: f64 = tris
            .iter()
            .map(|t| {
                let v: Vec<&[f64]> = t.iter().map(|&i| pts[i].as_slice()).collect();
                linalg::simplex_volume(&v)
            })
            .sum();
        assert!((area - 4.0).abs() < 1e-12);
    }

    #[test]
    fn two_objective_front_is_a_polyline() {
        let ps = set(&[&[0.0, 1.0], &[0.5, 0.4], &[1.0, 0.0], &[0.2, 0.7]]);
        let tri = build_triangulation(ps).unwrap();
        let edges: Vec<Vec<usize>> = tri.simplices().iter().map(|s| s.vertex_ids.clone()).collect();
        assert_eq!(edges, vec![vec![0, 3], vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn three_corners_make_one_simplex() {
        let ps = set(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let tri = build_triangulation(ps).unwrap();
        assert_eq!(tri.len(), 1);
        assert_eq!(tri.simplices()[0].vertex_ids, vec![0, 1, 2]);
    }

    #[test]
    fn refuses_more_than_ten_objectives() {
        let pts: Vec<Vec<f64>> = (0..11)
            .map(|i| (0..11).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(Vec::as_slice).collect();
        assert_eq!(
            build_triangulation(set(&refs)).unwrap_err(),
            TriangulationError::TooManyObjectives(11)
        );
    }
}
