//! Time evolution of contracting bubble systems: the exterior suction
//! field, boundary advancement, and weak-solution gluing across breakup,
//! disappearance, and cusp events.

pub mod flux;
pub mod solver;
pub mod stepper;
pub mod trajectory;

pub use flux::{FluxSpec, RunOptions, Strategy};
pub use solver::{solve_field, FieldSolution, CONDITION_LIMIT};
pub use stepper::{
    grid_scale, run_free, run_regulated, step, vanish_area, CUSP_REARM_LEVEL, GRID_FRACTION,
};
pub use trajectory::{
    ConstantSample, Event, EventKind, ProbeSample, RegulatedOutcome, Trajectory,
};
