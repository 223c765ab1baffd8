//! Two-dimensional bubble contraction in a viscous cell: boundary geometry,
//! gravity-type potentials with polygonal sources, explicit conformal-map
//! solution families, boundary-integral time evolution, and the analysis
//! passes built on top of them (breakup prediction, asymptotic shape fits,
//! extraction strategy search).

pub mod conformal;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod numeric;
pub mod potential;

pub use conformal::{
    exact_family, kufarev_solve, limit_curve, map_area, qn, richardson_residual,
    saddle_node_curve, trace_boundary, univalence_check, ConformalMap, FamilyKind, KufarevMap,
    LaurentMap,
};
pub use error::{Error, Result};
pub use evolution::{
    run_free, run_regulated, solve_field, step, Event, EventKind, FieldSolution, FluxSpec,
    RegulatedOutcome, RunOptions, Strategy, Trajectory,
};
pub use geometry::point::Rect;
pub use geometry::{
    cusp_exponent, disk_curve, ellipse_curve, pt, split_on_pinch, BoundaryCurve, Bubble,
    BubbleSystem, CuspFit, Point,
};
pub use potential::{
    cauchy_transform, eval_potential, find_critical_points, CriticalPoint, PotentialProbe, SymMat2,
};
