//! Small dense LP solver and the navigation problems built on it.

mod navigation;
mod simplex;

pub use navigation::{closest_on_hyperplane, closest_with_parameter, simplex_bounding_box};
pub use simplex::{solve, LpError, LpProblem, LpSolution, LpStatus};
