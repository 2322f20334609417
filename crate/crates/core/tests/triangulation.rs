use std::sync::Arc;

use paretonav_core::model::{ParetoPoint, ParetoSet};
use paretonav_core::testproblems::{generate, GeneratorKind, GeneratorSpec};
use paretonav_core::triangulate::{build_triangulation, delaunay, project, project_point, projection_basis};
use paretonav_oracles as oracle;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn front(kind: GeneratorKind, n: usize, k: usize, seed: u64) -> Arc<ParetoSet> {
    Arc::new(generate(&GeneratorSpec { kind, n, m: None, k, seed }).unwrap())
}

fn unit(v: [f64; 3]) -> Vec<f64> {
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// Twelve points on the boundary arcs of the sphere octant plus three
/// interior points.
fn fifteen_point_front() -> Arc<ParetoSet> {
    let mut f = Vec::new();
    for axis in 0..3 {
        let mut corner = [0.0; 3];
        corner[axis] = 1.0;
        f.push(corner.to_vec());
        for t in [1.0, 2.0, 3.0] {
            let angle = t * std::f64::consts::PI / 8.0;
            let mut p = [0.0; 3];
            p[axis] = angle.cos();
            p[(axis + 1) % 3] = angle.sin();
            f.push(p.to_vec());
        }
    }
    f.push(unit([2.0, 1.0, 1.0]));
    f.push(unit([1.0, 2.0, 1.0]));
    f.push(unit([1.0, 1.0, 2.0]));
    let points = f.into_iter().map(|f| ParetoPoint { f, x: vec![] }).collect();
    Arc::new(ParetoSet::from_points(points, vec![], vec![]).unwrap().0)
}

#[test]
fn fifteen_points_give_sixteen_simplices() {
    let tri = build_triangulation(fifteen_point_front()).unwrap();
    assert_eq!(tri.len(), 16);
}

#[test]
fn random_planar_points_pass_the_circumcircle_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let pts: Vec<Vec<f64>> = (0..50).map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let tris = delaunay(&pts).unwrap();
    assert!(oracle::circumsphere_violations(&pts, &tris, 1e-9).is_empty());
    let area: f64 = tris
        .iter()
        .map(|t| oracle::simplex_volume(&t.iter().map(|&i| pts[i].as_slice()).collect::<Vec<_>>()))
        .sum();
    assert!((area - oracle::convex_hull_volume(&pts)).abs() <= 1e-9 * area);
}

#[test]
fn basis_preserves_norms_of_plane_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = projection_basis(5);
    for _ in 0..100 {
        let mut v: Vec<f64> = (0..5).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mean = v.iter().sum::<f64>() / 5.0;
        v.iter_mut().for_each(|x| *x -= mean);
        let coords = project_point(&b, &v);
        assert!((oracle::norm(&coords) - oracle::norm(&v)).abs() < 1e-14);
    }
}

#[test]
fn random_fronts_project_to_distinct_sites() {
    let ps = front(GeneratorKind::RandomConcave, 3, 15, 3);
    let sites = project(&ps, &projection_basis(3)).unwrap();
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            let d: Vec<f64> = sites[i].iter().zip(&sites[j]).map(|(a, b)| a - b).collect();
            assert!(oracle::norm(&d) > 1e-9);
        }
    }
}

#[test]
fn simplex_count_matches_brute_force_lifted_hull() {
    for (n, k, seed) in [(3, 40, 1u64), (4, 30, 2), (4, 30, 3)] {
        let tri = build_triangulation(front(GeneratorKind::RandomConcave, n, k, seed)).unwrap();
        assert_eq!(tri.len(), oracle::lower_hull_facet_count(tri.projected_points()), "n={n} seed={seed}");
    }
}

#[test]
fn cospherical_lattice_is_tiled() {
    // A 3D lattice: every unit cube has eight cospherical corners.
    let mut pts = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for l in 0..3 {
                pts.push(vec![i as f64, j as f64, l as f64]);
            }
        }
    }
    let simplices = delaunay(&pts).unwrap();
    let volume: f64 = simplices
        .iter()
        .map(|s| oracle::simplex_volume(&s.iter().map(|&i| pts[i].as_slice()).collect::<Vec<_>>()))
        .sum();
    assert!((volume - 8.0).abs() < 1e-12, "volume {volume}");
    assert!(oracle::circumsphere_violations(&pts, &simplices, 1e-9).is_empty());
}

fn check_delaunay(ps: Arc<ParetoSet>) {
    let tri = build_triangulation(Arc::clone(&ps)).unwrap();
    let sites = tri.projected_points();
    let simplices: Vec<Vec<usize>> = tri.simplices().iter().map(|s| s.vertex_ids.clone()).collect();
    assert!(oracle::circumsphere_violations(sites, &simplices, 1e-9).is_empty());
    let total: f64 = simplices
        .iter()
        .map(|s| oracle::simplex_volume(&s.iter().map(|&i| sites[i].as_slice()).collect::<Vec<_>>()))
        .sum();
    let hull = oracle::convex_hull_volume(sites);
    assert!((total - hull).abs() <= 1e-9 * hull, "simplices {total} vs hull {hull}");
    // Vertices project bitwise onto the sites used for triangulation.
    for s in tri.simplices() {
        for &v in &s.vertex_ids {
            assert_eq!(project_point(tri.projection_basis(), &ps.points()[v].f), sites[v]);
        }
    }
    let again = build_triangulation(ps).unwrap();
    assert_eq!(again.simplices(), tri.simplices());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn delaunay_properties_hold(seed in any::<u64>(), n in 2usize..=4, k in 10usize..=60, dtlz in any::<bool>()) {
        let kind = if dtlz { GeneratorKind::Dtlz2 } else { GeneratorKind::RandomConcave };
        check_delaunay(front(kind, n, k, seed));
    }
}

#[test]
fn built_meshes_report_no_delaunay_violations() {
    let tri = build_triangulation(front(GeneratorKind::Dtlz2, 4, 40, 9)).unwrap();
    assert!(tri.delaunay_violations(1e-9).is_empty());
}
