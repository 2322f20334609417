//! Pareto point sets: ingestion, structural validation and ideal/nadir boxes.
//!
//! A [`ParetoSet`] holds `K` precomputed points, each an objective vector of
//! length `n` paired with a parameter vector of length `m`. Objectives are
//! minimized. The set is immutable once built and can be shared freely.

use std::collections::HashSet;
use std::io::Read;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("failed to parse input: {0}")]
    Parse(String),
    #[error("row {row} has {found} values, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("at least two objectives are required, found {0}")]
    TooFewObjectives(usize),
    #[error("{points} points cannot span a simplex with {objectives} objectives")]
    TooFewPoints { points: usize, objectives: usize },
    #[error("label count {found} does not match dimension {expected}")]
    LabelMismatch { expected: usize, found: usize },
    #[error("empty point set")]
    Empty,
}

/// Supported on-disk formats for Pareto point files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Json,
    Csv,
}

impl InputFormat {
    /// Guesses the format from a file extension, defaulting to JSON.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => InputFormat::Csv,
            _ => InputFormat::Json,
        }
    }
}

/// One Pareto point: objective values `f` and the parameters `x` producing them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub f: Vec<f64>,
    #[serde(default)]
    pub x: Vec<f64>,
}

/// Axis-aligned box `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        debug_assert_eq!(lower.len(), upper.len());
        Self { lower, upper }
    }

    /// The degenerate box containing just `p`.
    pub fn point(p: &[f64]) -> Self {
        Self::new(p.to_vec(), p.to_vec())
    }

    /// Box of all of space in `dims` dimensions.
    pub fn unbounded(dims: usize) -> Self {
        Self::new(vec![f64::NEG_INFINITY; dims], vec![f64::INFINITY; dims])
    }

    /// Smallest box containing every vector yielded by `points`.
    pub fn enclosing<'a, I>(points: I) -> Option<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = points.into_iter();
        let mut bx = Self::point(iter.next()?);
        for p in iter {
            bx.include(p);
        }
        Some(bx)
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn include(&mut self, p: &[f64]) {
        for (i, &v) in p.iter().enumerate() {
            if v < self.lower[i] {
                self.lower[i] = v;
            }
            if v > self.upper[i] {
                self.upper[i] = v;
            }
        }
    }

    pub fn union_with(&mut self, other: &BoundingBox) {
        for i in 0..self.dims() {
            self.lower[i] = self.lower[i].min(other.lower[i]);
            self.upper[i] = self.upper[i].max(other.upper[i]);
        }
    }

    pub fn contains(&self, p: &[f64], tol: f64) -> bool {
        p.iter()
            .enumerate()
            .all(|(i, &v)| v >= self.lower[i] - tol && v <= self.upper[i] + tol)
    }

    pub fn contains_box(&self, other: &BoundingBox, tol: f64) -> bool {
        (0..self.dims())
            .all(|i| other.lower[i] >= self.lower[i] - tol && other.upper[i] <= self.upper[i] + tol)
    }

    /// Closed-interval overlap test.
    pub fn intersects(&self, other: &BoundingBox) -> bool {
        (0..self.dims()).all(|i| self.lower[i] <= other.upper[i] && other.lower[i] <= self.upper[i])
    }

    pub fn is_valid(&self) -> bool {
        self.lower.len() == self.upper.len()
            && self.lower.iter().zip(&self.upper).all(|(l, u)| l <= u)
    }

    pub fn widths(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).collect()
    }

    /// Grows every side by `margin`.
    pub fn inflated(&self, margin: f64) -> Self {
        Self::new(
            self.lower.iter().map(|v| v - margin).collect(),
            self.upper.iter().map(|v| v + margin).collect(),
        )
    }

    /// Restriction of the box to the dimensions `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self::new(self.lower[range.clone()].to_vec(), self.upper[range].to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationStatus {
    Clean,
    Warnings,
}

/// Result of an exhaustive dominance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `(i, j)` means point `i` dominates point `j`.
    pub dominated_pairs: Vec<(usize, usize)>,
    pub duplicate_indices: Vec<usize>,
    pub status: ValidationStatus,
}

/// `a` dominates `b`: no worse in every objective and strictly better in one.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonDocument {
    #[serde(default)]
    objective_names: Vec<String>,
    #[serde(default)]
    parameter_names: Vec<String>,
    points: Vec<ParetoPoint>,
}

/// Outcome of [`ParetoSet::load`]: the set and how many duplicate rows were dropped.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub set: ParetoSet,
    pub dropped: usize,
}

/// A finite representation `P` of a Pareto front, with parameter values.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoSet {
    n: usize,
    m: usize,
    objective_names: Vec<String>,
    parameter_names: Vec<String>,
    points: Vec<ParetoPoint>,
}

impl ParetoSet {
    /// Builds a set, dropping later duplicates of an objective vector.
    ///
    /// Returns the set and the number of dropped rows.
    pub fn from_points(
        points: Vec<ParetoPoint>,
        objective_names: Vec<String>,
        parameter_names: Vec<String>,
    ) -> Result<(Self, usize), ModelError> {
        let first = points.first().ok_or(ModelError::Empty)?;
        let n = first.f.len();
        let m = first.x.len();
        if n < 2 {
            return Err(ModelError::TooFewObjectives(n));
        }
        for (row, p) in points.iter().enumerate() {
            if p.f.len() + p.x.len() != n + m || p.f.len() != n {
                return Err(ModelError::Ragged {
                    row,
                    expected: n + m,
                    found: p.f.len() + p.x.len(),
                });
            }
            if let Some(column) = p.f.iter().chain(&p.x).position(|v| !v.is_finite()) {
                return Err(ModelError::NonFinite { row, column });
            }
        }
        if !objective_names.is_empty() && objective_names.len() != n {
            return Err(ModelError::LabelMismatch {
                expected: n,
                found: objective_names.len(),
            });
        }
        if !parameter_names.is_empty() && parameter_names.len() != m {
            return Err(ModelError::LabelMismatch {
                expected: m,
                found: parameter_names.len(),
            });
        }

        let mut seen = HashSet::with_capacity(points.len());
        let mut kept = Vec::with_capacity(points.len());
        let mut dropped = 0;
        for (row, p) in points.into_iter().enumerate() {
            if seen.insert(objective_key(&p.f)) {
                kept.push(p);
            } else {
                warn!("dropping row {row}: duplicate objective vector {:?}", p.f);
                dropped += 1;
            }
        }
        if kept.len() < n {
            return Err(ModelError::TooFewPoints {
                points: kept.len(),
                objectives: n,
            });
        }
        Ok((
            Self {
                n,
                m,
                objective_names,
                parameter_names,
                points: kept,
            },
            dropped,
        ))
    }

    pub fn load<R: Read>(source: R, format: InputFormat) -> Result<Loaded, ModelError> {
        match format {
            InputFormat::Json => Self::load_json(source),
            InputFormat::Csv => Self::load_csv(source),
        }
    }

    fn load_json<R: Read>(source: R) -> Result<Loaded, ModelError> {
        let doc: JsonDocument =
            serde_json::from_reader(source).map_err(|e| ModelError::Parse(e.to_string()))?;
        let (set, dropped) =
            Self::from_points(doc.points, doc.objective_names, doc.parameter_names)?;
        Ok(Loaded { set, dropped })
    }

    fn load_csv<R: Read>(source: R) -> Result<Loaded, ModelError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(source);
        let headers = reader
            .headers()
            .map_err(|e| ModelError::Parse(e.to_string()))?
            .clone();
        // Columns are split by header prefix: `f*` objectives, `x*` parameters.
        let mut kinds = Vec::with_capacity(headers.len());
        let mut objective_names = Vec::new();
        let mut parameter_names = Vec::new();
        for h in headers.iter() {
            if h.starts_with('f') || h.starts_with('F') {
                kinds.push(true);
                objective_names.push(h.to_string());
            } else if h.starts_with('x') || h.starts_with('X') {
                kinds.push(false);
                parameter_names.push(h.to_string());
            } else {
                return Err(ModelError::Parse(format!(
                    "unrecognized column {h:?}: expected f<i> or x<i>"
                )));
            }
        }
        let mut points = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record.map_err(|e| ModelError::Parse(e.to_string()))?;
            if record.len() != kinds.len() {
                return Err(ModelError::Ragged {
                    row,
                    expected: kinds.len(),
                    found: record.len(),
                });
            }
            let mut p = ParetoPoint {
                f: Vec::with_capacity(objective_names.len()),
                x: Vec::with_capacity(parameter_names.len()),
            };
            for (column, (cell, &is_objective)) in record.iter().zip(&kinds).enumerate() {
                let v: f64 = cell.parse().map_err(|_| {
                    ModelError::Parse(format!("row {row}, column {column}: {cell:?} is not a number"))
                })?;
                if !v.is_finite() {
                    return Err(ModelError::NonFinite { row, column });
                }
                if is_objective {
                    p.f.push(v);
                } else {
                    p.x.push(v);
                }
            }
            points.push(p);
        }
        let (set, dropped) = Self::from_points(points, objective_names, parameter_names)?;
        Ok(Loaded { set, dropped })
    }

    /// Serializes to the JSON input schema.
    pub fn to_json(&self) -> String {
        let doc = JsonDocument {
            objective_names: self.objective_names.clone(),
            parameter_names: self.parameter_names.clone(),
            points: self.points.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("point sets always serialize")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ParetoPoint] {
        &self.points
    }

    pub fn objective_names(&self) -> &[String] {
        &self.objective_names
    }

    pub fn parameter_names(&self) -> &[String] {
        &self.parameter_names
    }

    /// Objective and parameter values of point `i` concatenated (length `n + m`).
    pub fn joint(&self, i: usize) -> Vec<f64> {
        let p = &self.points[i];
        p.f.iter().chain(&p.x).copied().collect()
    }

    /// Exhaustive pairwise dominance check. Never mutates the set.
    pub fn validate_dominance(&self) -> ValidationReport {
        let mut dominated_pairs = Vec::new();
        for (i, a) in self.points.iter().enumerate() {
            for (j, b) in self.points.iter().enumerate() {
                if i != j && dominates(&a.f, &b.f) {
                    dominated_pairs.push((i, j));
                }
            }
        }
        let mut seen = HashSet::new();
        let duplicate_indices: Vec<usize> = self
            .points
            .iter()
            .enumerate()
            .filter(|(_, p)| !seen.insert(objective_key(&p.f)))
            .map(|(i, _)| i)
            .collect();
        let status = if dominated_pairs.is_empty() && duplicate_indices.is_empty() {
            ValidationStatus::Clean
        } else {
            ValidationStatus::Warnings
        };
        ValidationReport {
            dominated_pairs,
            duplicate_indices,
            status,
        }
    }

    /// Ideal (componentwise min) and nadir (componentwise max) of the objectives.
    pub fn ideal_nadir(&self) -> BoundingBox {
        ideal_nadir(self.points.iter().map(|p| p.f.as_slice()))
            .expect("a ParetoSet is never empty")
    }

    /// Componentwise extremes of the joint objective and parameter vectors.
    pub fn joint_bounds(&self) -> BoundingBox {
        let joint: Vec<Vec<f64>> = (0..self.len()).map(|i| self.joint(i)).collect();
        BoundingBox::enclosing(joint.iter().map(Vec::as_slice)).expect("non-empty")
    }
}

/// Ideal/nadir box of an arbitrary collection of objective vectors.
pub fn ideal_nadir<'a, I>(objectives: I) -> Result<BoundingBox, ModelError>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    BoundingBox::enclosing(objectives).ok_or(ModelError::Empty)
}

// `-0.0` and `0.0` describe the same objective vector.
fn objective_key(f: &[f64]) -> Vec<u64> {
    f.iter().map(|v| (v + 0.0).to_bits()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corners_json() -> &'static str {
        r#"{"objective_names":["f1","f2","f3"],"parameter_names":["x1"],
            "points":[{"f":[1,0,0],"x":[1]},{"f":[0,1,0],"x":[2]},{"f":[0,0,1],"x":[3]}]}"#
    }

    #[test]
    fn loads_three_corner_json() {
        let loaded = ParetoSet::load(corners_json().as_bytes(), InputFormat::Json).unwrap();
        let ps = loaded.set;
        assert_eq!((ps.n(), ps.m(), ps.len()), (3, 1, 3));
        assert_eq!(loaded.dropped, 0);
        assert_eq!(ps.points()[1].x, vec![2.0]);
    }

    #[test]
    fn duplicate_objectives_are_dropped_keeping_first() {
        let csv = "f1,f2,x1\n1,0,5\n0,1,6\n1,0,7\n";
        let loaded = ParetoSet::load(csv.as_bytes(), InputFormat::Csv).unwrap();
        assert_eq!(loaded.set.len(), 2);
        assert_eq!(loaded.dropped, 1);
        assert_eq!(loaded.set.points()[0].x, vec![5.0]);
    }

    #[test]
    fn csv_nan_is_rejected() {
        let csv = "f1,f2\n1,0\nNaN,1\n";
        let err = ParetoSet::load(csv.as_bytes(), InputFormat::Csv).unwrap_err();
        assert!(matches!(err, ModelError::NonFinite { row: 1, column: 0 }));
    }

    #[test]
    fn ragged_and_small_inputs_are_rejected() {
        let csv = "f1,f2\n1,0\n0\n";
        assert!(matches!(
            ParetoSet::load(csv.as_bytes(), InputFormat::Csv),
            Err(ModelError::Ragged { .. })
        ));
        let json = r#"{"points":[{"f":[1]},{"f":[2]}]}"#;
        assert!(matches!(
            ParetoSet::load(json.as_bytes(), InputFormat::Json),
            Err(ModelError::TooFewObjectives(1))
        ));
        let json = r#"{"points":[{"f":[1,0]},{"f":[0,1,2]}]}"#;
        assert!(matches!(
            ParetoSet::load(json.as_bytes(), InputFormat::Json),
            Err(ModelError::Ragged { row: 1, .. })
        ));
        assert!(matches!(
            ParetoSet::load("{".as_bytes(), InputFormat::Json),
            Err(ModelError::Parse(_))
        ));
    }

    #[test]
    fn dominance_examples() {
        let ps = ParetoSet::load(corners_json().as_bytes(), InputFormat::Json).unwrap().set;
        let report = ps.validate_dominance();
        assert!(report.dominated_pairs.is_empty());
        assert_eq!(report.status, ValidationStatus::Clean);

        let pts = vec![
            ParetoPoint { f: vec![1.0, 1.0], x: vec![] },
            ParetoPoint { f: vec![2.0, 2.0], x: vec![] },
        ];
        let (ps, _) = ParetoSet::from_points(pts, vec![], vec![]).unwrap();
        let report = ps.validate_dominance();
        assert_eq!(report.dominated_pairs, vec![(0, 1)]);
        assert_eq!(report.status, ValidationStatus::Warnings);
    }

    #[test]
    fn ideal_nadir_examples() {
        let ps = ParetoSet::load(corners_json().as_bytes(), InputFormat::Json).unwrap().set;
        let bx = ps.ideal_nadir();
        assert_eq!(bx.lower, vec![0.0; 3]);
        assert_eq!(bx.upper, vec![1.0; 3]);

        let single = [3.0, -1.0];
        let bx = ideal_nadir([&single[..]]).unwrap();
        assert_eq!(bx.lower, single.to_vec());
        assert_eq!(bx.upper, single.to_vec());

        let a = [1.0, 5.0];
        let b = [3.0, 2.0];
        let bx = ideal_nadir([&a[..], &b[..]]).unwrap();
        assert_eq!(bx.lower, vec![1.0, 2.0]);
        assert_eq!(bx.upper, vec![3.0, 5.0]);

        assert!(matches!(ideal_nadir(std::iter::empty()), Err(ModelError::Empty)));
    }

    #[test]
    fn signed_zero_counts_as_duplicate() {
        let pts = vec![
            ParetoPoint { f: vec![0.0, 1.0], x: vec![] },
            ParetoPoint { f: vec![-0.0, 1.0], x: vec![] },
            ParetoPoint { f: vec![1.0, 0.0], x: vec![] },
        ];
        let (ps, dropped) = ParetoSet::from_points(pts, vec![], vec![]).unwrap();
        assert_eq!((ps.len(), dropped), (2, 1));
    }
}
