use crate::model::BoundingBox;
use crate::spatial::{KdTree, Space};
use crate::triangulate::Triangulation;

use super::NavError;

/// Absolute tolerance for bound checks, scaled by each dimension's range.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// Immutable data shared by every session on one triangulation.
#[derive(Debug)]
pub struct Surface {
    triangulation: Triangulation,
    joint_vertices: Vec<Vec<Vec<f64>>>,
    objective_vertices: Vec<Vec<Vec<f64>>>,
    vertex_boxes: Vec<BoundingBox>,
    objective_index: KdTree,
    design_index: Option<KdTree>,
    root: BoundingBox,
    tolerance: Vec<f64>,
}

impl Surface {
    pub fn new(triangulation: Triangulation) -> Result<Self, NavError> {
        if triangulation.is_empty() {
            return Err(NavError::EmptyTriangulation);
        }
        let n = triangulation.pareto_set().n();
        let joint_vertices: Vec<Vec<Vec<f64>>> =
            (0..triangulation.len()).map(|s| triangulation.joint_vertices(s)).collect();
        let objective_vertices = joint_vertices
            .iter()
            .map(|vs| vs.iter().map(|v| v[..n].to_vec()).collect())
            .collect();
        let vertex_boxes: Vec<BoundingBox> = joint_vertices
            .iter()
            .map(|vs| BoundingBox::enclosing(vs.iter().map(Vec::as_slice)).expect("non-empty simplex"))
            .collect();
        let objective_index = KdTree::build(&triangulation, Space::Objective).expect("n >= 2");
        let design_index = KdTree::build(&triangulation, Space::Design);
        let root = triangulation.joint_bounds();
        let tolerance = root
            .widths()
            .into_iter()
            .map(|w| BOUND_TOLERANCE * if w > 0.0 { w } else { 1.0 })
            .collect();
        Ok(Self {
            triangulation,
            joint_vertices,
            objective_vertices,
            vertex_boxes,
            objective_index,
            design_index,
            root,
            tolerance,
        })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn n(&self) -> usize {
        self.triangulation.pareto_set().n()
    }

    pub fn m(&self) -> usize {
        self.triangulation.pareto_set().m()
    }

    pub fn dims(&self) -> usize {
        self.n() + self.m()
    }

    pub fn simplex_count(&self) -> usize {
        self.joint_vertices.len()
    }

    /// Joint ideal/nadir box.
    pub fn root(&self) -> &BoundingBox {
        &self.root
    }

    pub fn joint_vertices(&self, simplex: usize) -> &[Vec<f64>] {
        &self.joint_vertices[simplex]
    }

    pub fn objective_vertices(&self, simplex: usize) -> &[Vec<f64>] {
        &self.objective_vertices[simplex]
    }

    /// Joint min/max box of a simplex's vertices.
    pub fn vertex_box(&self, simplex: usize) -> &BoundingBox {
        &self.vertex_boxes[simplex]
    }

    pub fn objective_index(&self) -> &KdTree {
        &self.objective_index
    }

    pub fn design_index(&self) -> Option<&KdTree> {
        self.design_index.as_ref()
    }

    pub fn tolerance(&self, dim: usize) -> f64 {
        self.tolerance[dim]
    }

    pub(crate) fn within(&self, bounds: &BoundingBox, y: &[f64], dims: std::ops::Range<usize>) -> bool {
        dims.into_iter()
            .all(|i| y[i] >= bounds.lower[i] - self.tolerance[i] && y[i] <= bounds.upper[i] + self.tolerance[i])
    }
}
