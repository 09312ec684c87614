//! Finite pointed metric spaces, polyhedral Banach spaces, the Lipschitz
//! unit ball and the Lipschitz-free space.

mod free;
mod metric;
mod norm;

pub use free::{
    delta, free_ball_molecules, free_norm, free_norm_with_witness, in_lipschitz_ball, lip_constant,
    lipschitz_ball_vertices, lipschitz_constraints, value_at, FreeVector, LipschitzFunctionVector,
};
pub use metric::{default_labels, validate_metric, FiniteMetricSpace, MetricViolation};
pub use norm::{poly_norm_eval, Norm, PolyhedralNorm};
