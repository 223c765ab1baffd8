//! Boundary curves, multi-bubble systems, and the geometric helpers the
//! rest of the library is built on: resampling, pinch surgery, asymptotic
//! normalization, and local tip analysis.

pub mod curve;
pub mod cusp;
pub mod normalize;
pub mod point;
pub mod surgery;
pub mod system;

pub use curve::{disk_curve, ellipse_curve, signed_area, BoundaryCurve};
pub use cusp::{cusp_exponent, CuspFit, CUSP_FIT_WINDOW, CUSP_SHARPNESS_THRESHOLD};
pub use normalize::{
    center_by_extents, normalize_diameter2, normalize_for_asymptotics, normalize_for_saddle,
};
pub use point::{pt, point_segment_distance, Point};
pub use surgery::split_on_pinch;
pub use system::{Bubble, BubbleSystem};
