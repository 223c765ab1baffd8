use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input failed a structural precondition (bad polygon, bad config value, ...).
    #[error("validation: {0}")]
    Validation(String),

    /// The boundary-integral solve is unusable (near-singular system).
    #[error("field solver ill-conditioned: estimated condition {cond:.3e} (n = {n})")]
    IllConditioned { cond: f64, n: usize },

    /// A regulated run hit a boundary cusp and cannot be continued.
    #[error("cusp at ({x:.6}, {y:.6}), t = {t:.6}: regulated contraction is ill-posed past this point")]
    CuspTermination { t: f64, x: f64, y: f64 },

    /// Conformal map is not injective on the punctured unit disk.
    #[error("map not univalent: critical point at zeta with |zeta| = {modulus:.6}, image ({x:.6}, {y:.6})")]
    NotUnivalent { modulus: f64, x: f64, y: f64 },

    /// Root finding / iteration failed to converge.
    #[error("numerical: {0}")]
    Numerical(String),

    /// Surgery cannot decide between several simultaneous pinches.
    #[error("ambiguous surgery: {candidates} pinch candidates below clearance {clearance:.3e}")]
    AmbiguousSurgery { candidates: usize, clearance: f64 },

    /// Probe too close to a boundary for the quadrature guard.
    #[error("probe ({x:.6}, {y:.6}) within {dist:.3e} of a boundary; guard is {guard:.3e}")]
    TooCloseToBoundary { x: f64, y: f64, dist: f64, guard: f64 },

    /// Time stepping could not find an acceptable step size.
    #[error("step size underflow at t = {t:.6} (dt = {dt:.3e})")]
    StepUnderflow { t: f64, dt: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
