//! Quickhull-style convex hull of points lifted onto the paraboloid
//! `h = |x|^2`. The facets whose outward normal points down project to the
//! Delaunay triangulation of the input.
//!
//! All visibility decisions go through [`predicates::perturbed_sign`], so the
//! hull is built for a symbolically perturbed point set that is always in
//! general position. Perturbation ranks follow point index, heights first.

use std::collections::HashMap;

use log::warn;

use super::predicates::{self, Rank};

struct Facet {
    verts: Vec<u32>,
    // neighbors[j] shares every vertex except verts[j].
    neighbors: Vec<u32>,
    outside: Vec<(u32, f64)>,
    alive: bool,
}

struct LiftedHull {
    rows: Vec<Vec<f64>>,
    ranks: Vec<Vec<Rank>>,
    facets: Vec<Facet>,
    hull_dim: usize,
}

impl LiftedHull {
    fn new(points: &[Vec<f64>]) -> Self {
        let k = points.len() as u32;
        let d = points[0].len();
        let rows = points
            .iter()
            .map(|p| {
                let h = p.iter().map(|v| v * v).sum::<f64>();
                let mut row = p.clone();
                row.push(h);
                row.push(1.0);
                row
            })
            .collect();
        let ranks = (0..k)
            .map(|i| {
                let mut r: Vec<Rank> = (0..d as u32).map(|c| Some(k + i * d as u32 + c)).collect();
                r.push(Some(i));
                r.push(None);
                r
            })
            .collect();
        Self {
            rows,
            ranks,
            facets: Vec::new(),
            hull_dim: d + 1,
        }
    }

    /// Positive when `p` lies on the outer side of the oriented facet.
    fn orient(&self, verts: &[u32], p: u32) -> i8 {
        let rows: Vec<&[f64]> = verts
            .iter()
            .chain(std::iter::once(&p))
            .map(|&v| self.rows[v as usize].as_slice())
            .collect();
        let ranks: Vec<&[Rank]> = verts
            .iter()
            .chain(std::iter::once(&p))
            .map(|&v| self.ranks[v as usize].as_slice())
            .collect();
        predicates::perturbed_sign(&rows, &ranks)
    }

    fn approximate_height(&self, verts: &[u32], p: u32) -> f64 {
        let rows: Vec<&[f64]> = verts
            .iter()
            .chain(std::iter::once(&p))
            .map(|&v| self.rows[v as usize].as_slice())
            .collect();
        predicates::approximate_det(&rows).abs()
    }

    /// Picks `hull_dim + 1` well spread points; symbolic perturbation makes
    /// any choice valid, spread only helps the float filter.
    fn initial_simplex(&self) -> Vec<u32> {
        let k = self.rows.len();
        let dim = self.hull_dim;
        let coords = |i: usize| &self.rows[i][..dim];
        let first = (0..k)
            .min_by(|&a, &b| coords(a)[0].total_cmp(&coords(b)[0]).then(a.cmp(&b)))
            .unwrap();
        let mut chosen = vec![first];
        let mut basis: Vec<Vec<f64>> = Vec::new();
        while chosen.len() < dim + 1 {
            let mut best: Option<(usize, f64, Vec<f64>)> = None;
            for i in 0..k {
                if chosen.contains(&i) {
                    continue;
                }
                let mut r: Vec<f64> = coords(i).iter().zip(coords(first)).map(|(a, b)| a - b).collect();
                for b in &basis {
                    let proj = r.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                    for (x, y) in r.iter_mut().zip(b) {
                        *x -= proj * y;
                    }
                }
                let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
                if best.as_ref().is_none_or(|(_, n, _)| norm > *n) {
                    best = Some((i, norm, r));
                }
            }
            let (i, norm, r) = best.expect("enough points for an initial simplex");
            chosen.push(i);
            if norm > 0.0 {
                basis.push(r.into_iter().map(|v| v / norm).collect());
            }
        }
        chosen.into_iter().map(|i| i as u32).collect()
    }

    fn build(&mut self) {
        let simplex = self.initial_simplex();
        let dim = self.hull_dim;
        for j in 0..=dim {
            let mut verts: Vec<u32> = simplex.iter().copied().filter(|&v| v != simplex[j]).collect();
            let mut neighbors: Vec<u32> = verts
                .iter()
                .map(|v| simplex.iter().position(|s| s == v).unwrap() as u32)
                .collect();
            if self.orient(&verts, simplex[j]) > 0 {
                verts.swap(0, 1);
                neighbors.swap(0, 1);
            }
            self.facets.push(Facet {
                verts,
                neighbors,
                outside: Vec::new(),
                alive: true,
            });
        }
        for p in 0..self.rows.len() as u32 {
            if simplex.contains(&p) {
                continue;
            }
            let initial: Vec<u32> = (0..self.facets.len() as u32).collect();
            self.assign(p, &initial);
        }

        let mut stack: Vec<u32> = (0..self.facets.len() as u32)
            .filter(|&f| !self.facets[f as usize].outside.is_empty())
            .collect();
        let mut marks: Vec<u32> = vec![0; self.facets.len()];
        let mut stamp = 0u32;
        while let Some(f) = stack.pop() {
            let facet = &self.facets[f as usize];
            if !facet.alive || facet.outside.is_empty() {
                continue;
            }
            let apex = facet
                .outside
                .iter()
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                .unwrap()
                .0;

            // Classify the visible region around `f` (connected for a convex hull).
            stamp += 2;
            marks.resize(self.facets.len(), 0);
            let visible_mark = stamp;
            let hidden_mark = stamp + 1;
            marks[f as usize] = visible_mark;
            let mut visible = vec![f];
            let mut cursor = 0;
            while cursor < visible.len() {
                let v = visible[cursor] as usize;
                cursor += 1;
                for s in 0..dim {
                    let nb = self.facets[v].neighbors[s];
                    if marks[nb as usize] == visible_mark || marks[nb as usize] == hidden_mark {
                        continue;
                    }
                    if self.orient(&self.facets[nb as usize].verts, apex) > 0 {
                        marks[nb as usize] = visible_mark;
                        visible.push(nb);
                    } else {
                        marks[nb as usize] = hidden_mark;
                    }
                }
            }

            let first_new = self.facets.len() as u32;
            let mut ridges: HashMap<Vec<u32>, (u32, usize)> = HashMap::new();
            for &v in &visible {
                for s in 0..dim {
                    let nb = self.facets[v as usize].neighbors[s];
                    if marks[nb as usize] == visible_mark {
                        continue;
                    }
                    let id = self.facets.len() as u32;
                    let mut verts = self.facets[v as usize].verts.clone();
                    verts[s] = apex;
                    let mut neighbors = vec![u32::MAX; dim];
                    neighbors[s] = nb;
                    let slot = self.facets[nb as usize]
                        .neighbors
                        .iter()
                        .position(|&x| x == v)
                        .expect("adjacency is symmetric");
                    self.facets[nb as usize].neighbors[slot] = id;
                    for t in 0..dim {
                        if t == s {
                            continue;
                        }
                        let mut key: Vec<u32> = verts
                            .iter()
                            .enumerate()
                            .filter(|&(i, _)| i != t)
                            .map(|(_, &x)| x)
                            .collect();
                        key.sort_unstable();
                        if let Some((other, other_slot)) = ridges.remove(&key) {
                            neighbors[t] = other;
                            self.facets[other as usize].neighbors[other_slot] = id;
                        } else {
                            ridges.insert(key, (id, t));
                        }
                    }
                    self.facets.push(Facet {
                        verts,
                        neighbors,
                        outside: Vec::new(),
                        alive: true,
                    });
                }
            }
            debug_assert!(ridges.is_empty(), "horizon must close up");

            let new_facets: Vec<u32> = (first_new..self.facets.len() as u32).collect();
            let mut orphans = Vec::new();
            for &v in &visible {
                let facet = &mut self.facets[v as usize];
                facet.alive = false;
                orphans.extend(facet.outside.drain(..).map(|(p, _)| p).filter(|&p| p != apex));
            }
            for p in orphans {
                self.assign(p, &new_facets);
            }
            stack.extend(
                new_facets
                    .iter()
                    .copied()
                    .filter(|&g| !self.facets[g as usize].outside.is_empty()),
            );
        }
    }

    fn assign(&mut self, p: u32, candidates: &[u32]) {
        for &g in candidates {
            if self.orient(&self.facets[g as usize].verts, p) > 0 {
                let height = self.approximate_height(&self.facets[g as usize].verts, p);
                self.facets[g as usize].outside.push((p, height));
                return;
            }
        }
        warn!("point {p} fell inside the lifted hull and is not a Delaunay vertex");
    }

    /// Downward facets with non-zero projected volume.
    fn lower_facets(&self) -> Vec<Vec<usize>> {
        let d = self.hull_dim - 1;
        let mut out = Vec::new();
        for facet in self.facets.iter().filter(|f| f.alive) {
            // With rows [x, h, 1], the facet faces down exactly when the
            // projected orientation det[x, 1] of its vertices is positive.
            let projected: Vec<Vec<f64>> = facet
                .verts
                .iter()
                .map(|&v| {
                    let row = &self.rows[v as usize];
                    let mut r = row[..d].to_vec();
                    r.push(1.0);
                    r
                })
                .collect();
            let rows: Vec<&[f64]> = projected.iter().map(Vec::as_slice).collect();
            if predicates::exact_sign(&rows) > 0 {
                let mut ids: Vec<usize> = facet.verts.iter().map(|&v| v as usize).collect();
                ids.sort_unstable();
                out.push(ids);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Delaunay simplices of `points` (in general dimension, at least `d + 2`
/// points, affinely spanning `R^d`).
pub(crate) fn lower_hull_simplices(points: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut hull = LiftedHull::new(points);
    hull.build();
    hull.lower_facets()
}
