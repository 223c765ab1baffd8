//! The gravity-potential engine: exact boundary-reduced evaluation of the
//! domain potential with gradient and Hessian, closed-form oracles, the
//! Cauchy transform, critical-point search and classification, and the
//! sufficient breakup criteria built on them.

pub mod breakup;
pub mod critical;
pub mod eval;

pub use breakup::{
    axis_extrema_count, breakup_integral, predict_breakup, BreakupVerdict, Symmetry,
};
pub use critical::{
    find_critical_points, CriticalKind, CriticalPoint, CriticalPointSearch, SeedFailure,
    DEGENERACY_THRESHOLD, GRADIENT_TOL,
};
pub use eval::{
    cauchy_transform, ellipse_potential, eval_potential, PotentialProbe, SymMat2,
    BOUNDARY_GUARD_FACTOR,
};
