//! Seeded generators for desk-scale test fronts.

use std::f64::consts::FRAC_PI_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, ParetoPoint, ParetoSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// Points on the positive orthant of the unit sphere; parameters are the
    /// spherical angles. Sampling is uniform in angle space, not on the sphere.
    Dtlz2,
    /// The `n` unit vectors, parameter `j` of corner `i` set to `i + j + 1`.
    UnitSimplex,
    /// The three unit vectors in `R^3` with one parameter valued 1, 2, 3.
    Fig6,
    /// `f_i = 1 - w_i^2` for `w` uniform on the standard simplex; a
    /// non-convex front. Parameter `j` is `w_(j mod n)`.
    RandomConcave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    /// Parameter count; `None` picks the kind's natural default.
    pub m: Option<usize>,
    /// Point count; ignored by the fixed-corner kinds.
    pub k: usize,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

const CONCAVE_POWER: i32 = 2;

pub fn generate(spec: &GeneratorSpec) -> Result<ParetoSet, GenerateError> {
    let n = spec.n;
    if n < 2 {
        return Err(GenerateError::InvalidSpec(format!("n = {n} < 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let points = match spec.kind {
        GeneratorKind::Dtlz2 => {
            let m = spec.m.unwrap_or(n - 1);
            if m != n - 1 {
                return Err(GenerateError::InvalidSpec(format!(
                    "dtlz2 parameters are the {} spherical angles, got m = {m}",
                    n - 1
                )));
            }
            check_count(spec.k, n)?;
            (0..spec.k)
                .map(|_| {
                    let angles: Vec<f64> = (0..n - 1).map(|_| rng.gen::<f64>() * FRAC_PI_2).collect();
                    ParetoPoint {
                        f: dtlz2_objectives(&angles),
                        x: angles,
                    }
                })
                .collect()
        }
        GeneratorKind::UnitSimplex => {
            let m = spec.m.unwrap_or(1);
            corners(n, m)
        }
        GeneratorKind::Fig6 => {
            if n != 3 || spec.m.is_some_and(|m| m != 1) {
                return Err(GenerateError::InvalidSpec("fig6 is fixed at n = 3, m = 1".into()));
            }
            corners(3, 1)
        }
        GeneratorKind::RandomConcave => {
            let m = spec.m.unwrap_or(n - 1);
            check_count(spec.k, n)?;
            (0..spec.k)
                .map(|_| {
                    let w = simplex_sample(&mut rng, n);
                    ParetoPoint {
                        f: w.iter().map(|v| 1.0 - v.powi(CONCAVE_POWER)).collect(),
                        x: (0..m).map(|j| w[j % n]).collect(),
                    }
                })
                .collect()
        }
    };
    let names = |prefix: &str, count: usize| (1..=count).map(|i| format!("{prefix}{i}")).collect();
    let m = points.first().map_or(0, |p: &ParetoPoint| p.x.len());
    let (set, _) = ParetoSet::from_points(points, names("f", n), names("x", m))?;
    Ok(set)
}

fn check_count(k: usize, n: usize) -> Result<(), GenerateError> {
    if k < n {
        return Err(GenerateError::InvalidSpec(format!("K = {k} is below n = {n}")));
    }
    Ok(())
}

fn corners(n: usize, m: usize) -> Vec<ParetoPoint> {
    (0..n)
        .map(|i| ParetoPoint {
            f: (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect(),
            x: (0..m).map(|j| (i + j + 1) as f64).collect(),
        })
        .collect()
}

/// DTLZ2 objectives with `g = 0`: a point on the unit sphere.
pub fn dtlz2_objectives(angles: &[f64]) -> Vec<f64> {
    let n = angles.len() + 1;
    (0..n)
        .map(|i| {
            let mut v: f64 = angles[..n - 1 - i].iter().map(|a| a.cos()).product();
            if i > 0 {
                v *= angles[n - 1 - i].sin();
            }
            v
        })
        .collect()
}

fn simplex_sample<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|v| v / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: GeneratorKind, n: usize, k: usize, seed: u64) -> GeneratorSpec {
        GeneratorSpec { kind, n, m: None, k, seed }
    }

    #[test]
    fn dtlz2_points_are_on_the_unit_sphere() {
        let ps = generate(&spec(GeneratorKind::Dtlz2, 3, 20, 1)).unwrap();
        assert_eq!((ps.len(), ps.m()), (20, 2));
        for p in ps.points() {
            let norm = p.f.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-12);
            assert!(p.f.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn fig6_corners() {
        let ps = generate(&spec(GeneratorKind::Fig6, 3, 0, 0)).unwrap();
        let f: Vec<Vec<f64>> = ps.points().iter().map(|p| p.f.clone()).collect();
        assert_eq!(f, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let x: Vec<f64> = ps.points().iter().map(|p| p.x[0]).collect();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn seeded_generation_is_deterministic() {
        for kind in [GeneratorKind::Dtlz2, GeneratorKind::RandomConcave] {
            let a = generate(&spec(kind, 4, 30, 7)).unwrap();
            let b = generate(&spec(kind, 4, 30, 7)).unwrap();
            assert_eq!(a, b);
            let c = generate(&spec(kind, 4, 30, 8)).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn generated_fronts_are_non_dominated() {
        for kind in [GeneratorKind::Dtlz2, GeneratorKind::RandomConcave, GeneratorKind::UnitSimplex] {
            for n in 2..=5 {
                let ps = generate(&spec(kind, n, 40, n as u64)).unwrap();
                assert!(ps.validate_dominance().dominated_pairs.is_empty(), "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn invalid_counts_are_rejected() {
        assert!(generate(&spec(GeneratorKind::Dtlz2, 1, 10, 0)).is_err());
        assert!(generate(&spec(GeneratorKind::Dtlz2, 4, 3, 0)).is_err());
        let mut s = spec(GeneratorKind::Dtlz2, 3, 10, 0);
        s.m = Some(5);
        assert!(generate(&s).is_err());
        assert!(generate(&spec(GeneratorKind::Fig6, 4, 0, 0)).is_err());
    }
}
