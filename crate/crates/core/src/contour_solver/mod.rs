//! Sector-contour construction of the regularized solution u_ε for multi-term problems
//! Σ_i A_i (D^ζ)^{q_i} u = 0 on a finite-dimensional state space.

mod contour;
mod pencil;
mod scenario;
mod solution;

pub use contour::{b_interval, build_contour, damping, gauss_legendre, ln_damping, ContourQuadrature, Panel, Segment};
pub use pencil::{admissible_nu_bound, check_exponents, sector_boundary_samples, PencilProblem};
pub use scenario::{
    degenerate_scenario, diagonal_scenario, matrix_polynomial, polynomial_roots, resolvent_scenario, scalar_scenario,
    second_order_scenario, Geometry, RESOLVENT_MARGIN,
};
pub use solution::{
    damping_constant, initial_limit_check, richardson_limit, u_epsilon, verify_pde, ContourData, ContourEvaluator,
    LimitReport, PdeReport, DOUBLING_TOLERANCE,
};

#[cfg(test)]
mod tests;
