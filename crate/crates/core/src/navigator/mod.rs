//! Interactive navigation on a triangulated front: selectors move the
//! current point, restrictors set active bounds and update the passive
//! (attainable) bounds.

mod session;
mod surface;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lp;
use crate::model::BoundingBox;
use crate::raytrace::{self, Ray};

pub use session::{Applied, Event, SessionData, SessionSnapshot, Side};
pub use surface::{Surface, BOUND_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NavError {
    #[error("the triangulation has no simplices")]
    EmptyTriangulation,
    #[error("dimension {dim} is out of range for {dims} sliders")]
    DimensionOutOfRange { dim: usize, dims: usize },
    #[error("non-finite slider value")]
    NonFinite,
    #[error("bounds on dimension {dim} would cross: lower {lower} > upper {upper}")]
    InvalidBounds { dim: usize, lower: f64, upper: f64 },
    #[error("value {value} is unattainable on dimension {dim} under the active bounds")]
    Unattainable { dim: usize, value: f64 },
    #[error("the restriction cuts off every simplex; relax another bound first")]
    EmptySolutionSpace,
    #[error("invalid session data: {0}")]
    InvalidSession(String),
}

/// How candidate simplices are found. `Exhaustive` scans every simplex and
/// exists to check that the kd-trees never change a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexMode {
    #[default]
    KdTree,
    Exhaustive,
}

/// A point on the surface: simplex, barycentric weights and the
/// interpolated joint coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentPoint {
    pub simplex_id: usize,
    pub lambda: Vec<f64>,
    pub point: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NavigationState {
    surface: Arc<Surface>,
    mode: IndexMode,
    current: CurrentPoint,
    displayed: Vec<f64>,
    active: BoundingBox,
    passive: BoundingBox,
    feasible: Vec<Option<BoundingBox>>,
    param_feasible: Vec<bool>,
    counter: u64,
}

// Candidates whose distance lower bound exceeds the best distance by more
// than this are skipped; covers LP round-off.
const PRUNE_MARGIN: f64 = 1e-9;

impl NavigationState {
    pub fn new(surface: Arc<Surface>) -> Self {
        Self::with_mode(surface, IndexMode::KdTree)
    }

    pub fn with_mode(surface: Arc<Surface>, mode: IndexMode) -> Self {
        let active = surface.root().clone();
        let vertex = initial_vertex(&surface);
        let (simplex_id, lambda) = (0..surface.simplex_count())
            .find_map(|s| {
                let ids = &surface.triangulation().simplices()[s].vertex_ids;
                ids.iter().position(|&v| v == vertex).map(|pos| {
                    let mut lambda = vec![0.0; ids.len() - 1];
                    if pos > 0 {
                        lambda[pos - 1] = 1.0;
                    }
                    (s, lambda)
                })
            })
            .expect("the initial vertex belongs to a simplex");
        Self::assemble(surface, mode, active, simplex_id, lambda, 0)
    }

    fn assemble(
        surface: Arc<Surface>,
        mode: IndexMode,
        active: BoundingBox,
        simplex_id: usize,
        lambda: Vec<f64>,
        counter: u64,
    ) -> Self {
        let feasible: Vec<Option<BoundingBox>> = (0..surface.simplex_count())
            .map(|s| lp::simplex_bounding_box(surface.joint_vertices(s), Some(&active)))
            .collect();
        let passive = union_of(&feasible).unwrap_or_else(|| active.clone());
        let point = raytrace::interpolate(surface.joint_vertices(simplex_id), &lambda);
        let m = surface.m();
        let mut state = Self {
            displayed: point.clone(),
            current: CurrentPoint {
                simplex_id,
                lambda,
                point,
            },
            surface,
            mode,
            active,
            passive,
            feasible,
            param_feasible: vec![true; m],
            counter,
        };
        state.snap_parameters();
        state
    }

    pub fn surface(&self) -> &Arc<Surface> {
        &self.surface
    }

    pub fn mode(&self) -> IndexMode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: IndexMode) {
        self.mode = mode;
    }

    pub fn current(&self) -> &CurrentPoint {
        &self.current
    }

    /// Joint point shown on the sliders: the interpolated point with
    /// infeasible parameters snapped to their bounds.
    pub fn displayed(&self) -> &[f64] {
        &self.displayed
    }

    pub fn active(&self) -> &BoundingBox {
        &self.active
    }

    pub fn passive(&self) -> &BoundingBox {
        &self.passive
    }

    /// Cached feasible box of each simplex; `None` when fully cut off.
    pub fn feasible_boxes(&self) -> &[Option<BoundingBox>] {
        &self.feasible
    }

    pub fn param_feasible(&self) -> &[bool] {
        &self.param_feasible
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    fn check_dim(&self, dim: usize, value: f64) -> Result<(), NavError> {
        let dims = self.surface.dims();
        if dim >= dims {
            return Err(NavError::DimensionOutOfRange { dim, dims });
        }
        if !value.is_finite() {
            return Err(NavError::NonFinite);
        }
        Ok(())
    }

    /// Moves the objective selector `k` to `value`: shoots rays along
    /// `±e_{-k}` from the current point with `f_k := value`, keeps hits that
    /// satisfy the objective bounds and takes the nearest one. Without such
    /// a hit, the closest point on `y_k = value` is found by LP.
    pub fn select_objective(&mut self, k: usize, value: f64) -> Result<(), NavError> {
        self.check_dim(k, value)?;
        let n = self.surface.n();
        if k >= n {
            return Err(NavError::DimensionOutOfRange { dim: k, dims: n });
        }
        let mut p = self.current.point[..n].to_vec();
        p[k] = value;
        let found = self
            .locate_objective(&self.active, k, &p)
            .ok_or(NavError::Unattainable { dim: k, value })?;
        self.current = found;
        self.snap_parameters();
        self.counter += 1;
        Ok(())
    }

    fn locate_objective(&self, active: &BoundingBox, k: usize, p: &[f64]) -> Option<CurrentPoint> {
        let surface = &*self.surface;
        let n = surface.n();
        let mut best: Option<(f64, usize, Vec<f64>, Vec<f64>)> = None;
        for reverse in [false, true] {
            let ray = Ray::selection(p.to_vec(), k, reverse);
            for id in self.ray_candidates(&ray) {
                let Some(hit) = raytrace::ray_simplex(&ray, surface.objective_vertices(id), id) else {
                    continue;
                };
                let y = raytrace::interpolate(surface.joint_vertices(id), &hit.lambda);
                if !surface.within(active, &y, 0..n) {
                    continue;
                }
                if best.as_ref().is_none_or(|b| (hit.mu, id) < (b.0, b.1)) {
                    best = Some((hit.mu, id, hit.lambda, y));
                }
            }
        }
        if let Some((_, simplex_id, lambda, point)) = best {
            return Some(CurrentPoint {
                simplex_id,
                lambda,
                point,
            });
        }

        // Parameters are left out of the fallback too, so holes cut by
        // parameter bounds do not make the selector jump.
        let mut objective_bounds = BoundingBox::unbounded(surface.dims());
        for i in 0..n {
            objective_bounds.lower[i] = active.lower[i];
            objective_bounds.upper[i] = active.upper[i];
        }
        let mut candidates: Vec<(f64, usize)> = match self.mode {
            IndexMode::Exhaustive => (0..surface.simplex_count()).map(|id| (0.0, id)).collect(),
            IndexMode::KdTree => surface
                .objective_index()
                .candidates_for_value(k, p[k])
                .into_iter()
                .map(|id| (chebyshev_to_box(p, surface.vertex_box(id), (0..n).filter(|&i| i != k)), id))
                .collect(),
        };
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        self.closest_by_lp(&candidates, |id| {
            lp::closest_on_hyperplane(p, surface.joint_vertices(id), k, Some(&objective_bounds))
        })
    }

    /// Solves per-candidate LPs in lower-bound order and returns the
    /// minimal-distance point, ties going to the lowest simplex id.
    fn closest_by_lp(
        &self,
        candidates: &[(f64, usize)],
        solve: impl Fn(usize) -> Option<(f64, Vec<f64>)>,
    ) -> Option<CurrentPoint> {
        let mut best: Option<(f64, usize, Vec<f64>)> = None;
        for &(bound, id) in candidates {
            if let Some((d, _, _)) = &best {
                if bound > d + PRUNE_MARGIN {
                    break;
                }
            }
            if let Some((d, lambda)) = solve(id) {
                if best.as_ref().is_none_or(|b| (d, id) < (b.0, b.1)) {
                    best = Some((d, id, lambda));
                }
            }
        }
        best.map(|(_, simplex_id, lambda)| CurrentPoint {
            point: raytrace::interpolate(self.surface.joint_vertices(simplex_id), &lambda),
            simplex_id,
            lambda,
        })
    }

    fn ray_candidates(&self, ray: &Ray) -> Vec<usize> {
        match self.mode {
            IndexMode::KdTree => self.surface.objective_index().candidates_for_ray(ray),
            IndexMode::Exhaustive => (0..self.surface.simplex_count()).collect(),
        }
    }

    /// Moves the selector of joint dimension `k ≥ n` (a parameter) to
    /// `value`, landing on the closest point in objective space that has
    /// this parameter value and satisfies all active bounds.
    pub fn select_parameter(&mut self, k: usize, value: f64) -> Result<(), NavError> {
        self.check_dim(k, value)?;
        let surface = Arc::clone(&self.surface);
        let n = surface.n();
        if k < n {
            return Err(NavError::DimensionOutOfRange { dim: k, dims: surface.dims() });
        }
        let mut p = self.current.point.clone();
        p[k] = value;
        let tol = surface.tolerance(k);
        let mut candidates: Vec<(f64, usize)> = match self.mode {
            IndexMode::Exhaustive => (0..surface.simplex_count()).map(|id| (0.0, id)).collect(),
            IndexMode::KdTree => surface
                .design_index()
                .expect("parameters exist")
                .candidates_for_value(k - n, value)
                .into_iter()
                .filter_map(|id| {
                    let bx = self.feasible[id].as_ref()?;
                    (value >= bx.lower[k] - tol && value <= bx.upper[k] + tol)
                        .then(|| (chebyshev_to_box(&p, bx, 0..n), id))
                })
                .collect(),
        };
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let found = self
            .closest_by_lp(&candidates, |id| {
                lp::closest_with_parameter(&p, surface.joint_vertices(id), k, Some(&self.active))
            })
            .ok_or(NavError::Unattainable { dim: k, value })?;
        self.current = found;
        self.snap_parameters();
        self.counter += 1;
        Ok(())
    }

    /// Sets one active bound (clamped to the root box), refreshes the
    /// feasible boxes of the simplices the change can affect and the passive
    /// bounds. A current point that leaves the objective bounds is moved to
    /// the closest point on the violated bound.
    pub fn move_restrictor(&mut self, dim: usize, side: Side, value: f64) -> Result<(), NavError> {
        self.check_dim(dim, value)?;
        let surface = Arc::clone(&self.surface);
        let n = surface.n();
        let root = surface.root();
        let value = value.clamp(root.lower[dim], root.upper[dim]);
        let mut active = self.active.clone();
        let old = match side {
            Side::Lower => std::mem::replace(&mut active.lower[dim], value),
            Side::Upper => std::mem::replace(&mut active.upper[dim], value),
        };
        if active.lower[dim] > active.upper[dim] {
            return Err(NavError::InvalidBounds {
                dim,
                lower: active.lower[dim],
                upper: active.upper[dim],
            });
        }

        let (lo, hi) = (old.min(value), old.max(value));
        let affected: Vec<usize> = match self.mode {
            IndexMode::KdTree => {
                let (tree, offset) = if dim < n {
                    (surface.objective_index(), 0)
                } else {
                    (surface.design_index().expect("parameters exist"), n)
                };
                let mut query = tree.root().bbox.clone();
                query.lower[dim - offset] = lo;
                query.upper[dim - offset] = hi;
                tree.candidates_for_box(&query)
            }
            IndexMode::Exhaustive => (0..surface.simplex_count())
                .filter(|&id| {
                    let vb = surface.vertex_box(id);
                    vb.lower[dim] <= hi && lo <= vb.upper[dim]
                })
                .collect(),
        };
        let mut feasible = self.feasible.clone();
        for id in affected {
            feasible[id] = lp::simplex_bounding_box(surface.joint_vertices(id), Some(&active));
        }
        let passive = union_of(&feasible).ok_or(NavError::EmptySolutionSpace)?;

        let mut current = self.current.clone();
        if dim < n && !surface.within(&active, &current.point, dim..dim + 1) {
            let target = value.clamp(passive.lower[dim], passive.upper[dim]);
            let mut p = current.point[..n].to_vec();
            p[dim] = target;
            current = self
                .locate_objective(&active, dim, &p)
                .ok_or(NavError::Unattainable { dim, value: target })?;
        }

        self.active = active;
        self.feasible = feasible;
        self.passive = passive;
        self.current = current;
        self.snap_parameters();
        self.counter += 1;
        Ok(())
    }

    /// Recomputes the displayed point: parameters outside the active bounds
    /// are clamped to the nearest bound and their selectors flagged.
    pub fn snap_parameters(&mut self) {
        let n = self.surface.n();
        self.displayed = self.current.point.clone();
        for j in 0..self.surface.m() {
            let i = n + j;
            let v = self.current.point[i];
            let (lo, hi) = (self.active.lower[i], self.active.upper[i]);
            self.displayed[i] = v.clamp(lo, hi);
            self.param_feasible[j] = self.surface.within(&self.active, &self.current.point, i..i + 1);
        }
    }

    /// Applies a slider event. Selector values are clamped into the passive
    /// range and restrictor values into the root box before use.
    pub fn apply(&mut self, event: &Event) -> Result<Applied, NavError> {
        let (dim, requested) = match *event {
            Event::Selector { dim, value } => (dim, value),
            Event::Restrictor { dim, value, .. } => (dim, value),
        };
        self.check_dim(dim, requested)?;
        let applied = match *event {
            Event::Selector { dim, value } => {
                let v = value.clamp(self.passive.lower[dim], self.passive.upper[dim]);
                if dim < self.surface.n() {
                    self.select_objective(dim, v)?;
                } else {
                    self.select_parameter(dim, v)?;
                }
                v
            }
            Event::Restrictor { dim, side, value } => {
                let root = self.surface.root();
                let v = value.clamp(root.lower[dim], root.upper[dim]);
                self.move_restrictor(dim, side, v)?;
                v
            }
        };
        Ok(Applied {
            counter: self.counter,
            requested,
            applied,
            clamped: applied != requested,
        })
    }
}

/// Chebyshev distance from `p` to `bbox` over `dims`.
fn chebyshev_to_box(p: &[f64], bbox: &BoundingBox, dims: impl Iterator<Item = usize>) -> f64 {
    dims.map(|i| (bbox.lower[i] - p[i]).max(p[i] - bbox.upper[i]).max(0.0))
        .fold(0.0, f64::max)
}

fn union_of(boxes: &[Option<BoundingBox>]) -> Option<BoundingBox> {
    let mut out: Option<BoundingBox> = None;
    for b in boxes.iter().flatten() {
        match &mut out {
            None => out = Some(b.clone()),
            Some(u) => u.union_with(b),
        }
    }
    out
}

/// Vertex closest to the ideal point in range-scaled Chebyshev distance;
/// ties go to the lowest index.
fn initial_vertex(surface: &Surface) -> usize {
    let tri = surface.triangulation();
    let ps = tri.pareto_set();
    let ideal_nadir = ps.ideal_nadir();
    let mut used = vec![false; ps.len()];
    for s in tri.simplices() {
        for &v in &s.vertex_ids {
            used[v] = true;
        }
    }
    let widths = ideal_nadir.widths();
    let score = |v: usize| -> f64 {
        ps.points()[v]
            .f
            .iter()
            .enumerate()
            .map(|(i, &f)| if widths[i] > 0.0 { (f - ideal_nadir.lower[i]) / widths[i] } else { 0.0 })
            .fold(0.0, f64::max)
    };
    (0..ps.len())
        .filter(|&v| used[v])
        .min_by(|&a, &b| score(a).total_cmp(&score(b)).then(a.cmp(&b)))
        .expect("non-empty triangulation")
}
