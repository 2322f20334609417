pub mod linalg;
pub mod lp;
pub mod model;
pub mod navigator;
pub mod raytrace;
pub mod spatial;
pub mod testproblems;
pub mod triangulate;
