//! Exact-solution track: finite Laurent maps of bubble exteriors, the
//! explicit contraction families, Kufarev's two-circle solution, the Q_n
//! polynomials with their limit curves, and the singularity-correspondence
//! residual.

pub mod curves;
pub mod kufarev;
pub mod laurent;
pub mod qpoly;
pub mod richardson;

pub use curves::{limit_curve, saddle_node_curve};
pub use kufarev::{kufarev_cubic, kufarev_solve, KufarevMap};
pub use laurent::{
    exact_family, map_area, trace_boundary, univalence_check, ConformalMap, FamilyKind,
    LaurentMap, UnivalenceFailure, UnivalenceFailureKind, UnivalenceReport,
};
pub use qpoly::{qn, QPolynomial, QN_MAX};
pub use richardson::richardson_residual;
