//! Theory-level post-processing on top of the evolution and potential
//! layers: contraction-point extraction and cross-checks, the two-circle
//! partial-contraction solve, asymptotic shape and slowdown fits, rupture
//! family sweeps, phase-rectangle accessibility mapping, and the
//! synchronizing-strategy search.

pub mod greens;
pub mod logslow;
pub mod partial;
pub mod pathcheck;
pub mod points;
pub mod region;
pub mod report;
pub mod shapefit;
pub mod sweep;
pub mod sync;

pub use greens::greens_ratio;
pub use logslow::fit_logslow;
pub use partial::kufarev_partial;
pub use pathcheck::path_independence_check;
pub use points::{contraction_points, ContractionKind, ContractionPoint};
pub use region::{accessibility_region, CellStatus, PhasePoint, RegionMap, RegionOptions};
pub use report::FitReport;
pub use shapefit::{fit_ellipse_asymptotics, fit_limit_curve, fit_limit_curve_saddle, sup_distance};
pub use sweep::{rupture_boundary_sweep, FamilySweepReport, SweepOptions};
pub use sync::{find_synchronizing, SyncEndpoint, SyncResult};
