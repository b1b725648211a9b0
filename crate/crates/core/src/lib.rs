//! Douglas-Rachford iteration for the feasibility problem "hyperplane
//! versus finite set", with exact rational and quadratic-surd arithmetic.
//!
//! * [`scalar`] - the numeric field (`f64`, rationals, `Q(√d)`);
//! * [`geometry`] - projectors, reflectors and the DR step;
//! * [`dynamics`] - full runs, classification and structural checks;
//! * [`cycling`] - doubleton cycle detection and the rationality criterion;
//! * [`closedform`] - floor-function closed forms and Beatty sequences;
//! * [`map`] - the alternating-projections baseline;
//! * [`export`] - CSV/JSON trace writers.

pub mod closedform;
pub mod cycling;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod geometry;
pub mod map;
pub mod problem;
mod rational;
pub mod scalar;

pub use error::{Error, Result, ScalarError};
pub use geometry::{FiniteSet, Hyperplane, TiePolicy, Vector};
pub use problem::Problem;
pub use scalar::{Backend, Rational, Scalar};
