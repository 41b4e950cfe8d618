//! Randomized Hough transform for circles and ellipses.

mod detect;
mod geometry;

pub use detect::{rht_detect, verify_candidate, RhtConfig};
pub use geometry::{
    angle_diff, conic_to_geometric, ellipse_center, estimate_tangent, fit_conic, fold_angle, ConicCoeffs,
    EllipseParams, Point, TangentLine,
};

use thiserror::Error;

/// Per-sample failures; the detector skips the sample and draws again.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum RhtError {
    #[error("fewer than three edge points around the sample")]
    InsufficientNeighbors,
    #[error("parallel tangents or construction lines")]
    DegenerateSample,
    #[error("singular three-point conic system")]
    SingularSystem,
    #[error("conic is not an ellipse")]
    NotAnEllipse,
}
