use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::model::BoundingBox;

use super::{IndexMode, NavError, NavigationState, Surface};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

/// One slider gesture. `dim` is a joint index: objectives first, then
/// parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Event {
    Selector { dim: usize, value: f64 },
    Restrictor { dim: usize, side: Side, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Applied {
    pub counter: u64,
    pub requested: f64,
    pub applied: f64,
    pub clamped: bool,
}

/// Read-only view of a session for rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSnapshot {
    pub f: Vec<f64>,
    pub x: Vec<f64>,
    pub active: BoundingBox,
    pub passive: BoundingBox,
    /// Per slider, the parts of the active range outside the passive range.
    pub gray: Vec<Vec<[f64; 2]>>,
    pub param_feasible: Vec<bool>,
    pub counter: u64,
}

/// Persisted session: everything else is recomputed on restore.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionData {
    pub simplex_id: usize,
    pub lambda: Vec<f64>,
    pub active: BoundingBox,
    pub param_feasible: Vec<bool>,
    pub counter: u64,
}

impl NavigationState {
    pub fn snapshot(&self) -> SessionSnapshot {
        let n = self.surface.n();
        let gray = (0..self.surface.dims())
            .map(|i| {
                let mut segments = Vec::new();
                if self.passive.lower[i] > self.active.lower[i] {
                    segments.push([self.active.lower[i], self.passive.lower[i]]);
                }
                if self.passive.upper[i] < self.active.upper[i] {
                    segments.push([self.passive.upper[i], self.active.upper[i]]);
                }
                segments
            })
            .collect();
        SessionSnapshot {
            f: self.displayed[..n].to_vec(),
            x: self.displayed[n..].to_vec(),
            active: self.active.clone(),
            passive: self.passive.clone(),
            gray,
            param_feasible: self.param_feasible.clone(),
            counter: self.counter,
        }
    }

    pub fn to_data(&self) -> SessionData {
        SessionData {
            simplex_id: self.current.simplex_id,
            lambda: self.current.lambda.clone(),
            active: self.active.clone(),
            param_feasible: self.param_feasible.clone(),
            counter: self.counter,
        }
    }

    /// Rebuilds a session. Feasible boxes depend only on the active bounds,
    /// so the restored state matches the saved one exactly.
    pub fn restore(surface: Arc<Surface>, mode: IndexMode, data: &SessionData) -> Result<Self, NavError> {
        let invalid = |msg: &str| Err(NavError::InvalidSession(msg.to_string()));
        let dims = surface.dims();
        if data.simplex_id >= surface.simplex_count() {
            return invalid("simplex id out of range");
        }
        if data.lambda.len() + 1 != surface.n()
            || data.lambda.iter().any(|l| !l.is_finite() || *l < 0.0)
            || data.lambda.iter().sum::<f64>() > 1.0 + 1e-9
        {
            return invalid("barycentric weights do not describe a point of the simplex");
        }
        if data.active.dims() != dims || !data.active.is_valid() || !surface.root().contains_box(&data.active, 0.0) {
            return invalid("active bounds must lie inside the front's ideal/nadir box");
        }
        if data.param_feasible.len() != surface.m() {
            return invalid("wrong number of parameter flags");
        }
        let state = Self::assemble(
            surface,
            mode,
            data.active.clone(),
            data.simplex_id,
            data.lambda.clone(),
            data.counter,
        );
        if state.param_feasible != data.param_feasible {
            log::warn!("restored parameter flags differ from the saved ones; using recomputed flags");
        }
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_data()).expect("session data serializes")
    }

    pub fn from_json(surface: Arc<Surface>, mode: IndexMode, json: &str) -> Result<Self, NavError> {
        let data: SessionData = serde_json::from_str(json).map_err(|e| NavError::InvalidSession(e.to_string()))?;
        Self::restore(surface, mode, &data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testproblems::{generate, GeneratorKind, GeneratorSpec};
    use crate::triangulate::build_triangulation;

    fn corners() -> Arc<Surface> {
        let ps = generate(&GeneratorSpec {
            kind: GeneratorKind::Fig6,
            n: 3,
            m: None,
            k: 0,
            seed: 0,
        })
        .unwrap();
        Arc::new(Surface::new(build_triangulation(Arc::new(ps)).unwrap()).unwrap())
    }

    #[test]
    fn gray_segments_follow_passive_bounds() {
        let mut state = NavigationState::new(corners());
        assert!(state.snapshot().gray.iter().all(Vec::is_empty));
        state.move_restrictor(2, Side::Lower, 0.2).unwrap();
        let snap = state.snapshot();
        assert_eq!(snap.gray[0].len(), 1);
        assert!((snap.gray[0][0][0] - 0.8).abs() < 1e-12 && snap.gray[0][0][1] == 1.0);
        assert!(snap.gray[2].is_empty());
    }

    #[test]
    fn snapshot_and_session_round_trip() {
        let surface = corners();
        let mut state = NavigationState::new(Arc::clone(&surface));
        state.move_restrictor(2, Side::Lower, 0.2).unwrap();
        state.select_parameter(3, 2.2).unwrap();
        let snap = state.snapshot();
        let json = serde_json::to_string(&snap).unwrap();
        assert_eq!(serde_json::from_str::<SessionSnapshot>(&json).unwrap(), snap);

        let restored = NavigationState::from_json(surface, IndexMode::KdTree, &state.to_json()).unwrap();
        assert_eq!(restored.snapshot(), snap);
    }

    #[test]
    fn event_json_shape() {
        let e: Event = serde_json::from_str(r#"{"kind":"restrictor","dim":2,"side":"lower","value":0.2}"#).unwrap();
        assert_eq!(e, Event::Restrictor { dim: 2, side: Side::Lower, value: 0.2 });
    }

    #[test]
    fn corrupt_session_data_is_rejected() {
        let surface = corners();
        let mut data = NavigationState::new(Arc::clone(&surface)).to_data();
        data.lambda = vec![0.8, 0.8];
        assert!(NavigationState::restore(surface, IndexMode::KdTree, &data).is_err());
    }
}
