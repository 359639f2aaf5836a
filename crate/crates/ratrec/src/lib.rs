//! Exact simulator, closed-form evaluator, and asymptotic classifier for the
//! fourth-order rational difference equation
//!
//! ```text
//! x_{n+1} = alpha * x_{n-3} / (A + B * x_{n-1} * x_{n-3})
//! ```
//!
//! with nonzero seeds x_{-3} = d, x_{-2} = c, x_{-1} = b, x_0 = a.
//!
//! The crate keeps two independent routes to every value of a solution: the
//! step-by-step iterator in [`recurrence`] and the product/factorial formulas
//! in [`closedform`]. The iterator is the ground truth; the formulas are
//! validated against it exactly, term by term. [`analysis`] classifies the
//! long-run behaviour from the parameters alone, [`scenario_io`] moves
//! scenarios and trajectories in and out of JSON/CSV/SVG, and [`sweep`] runs
//! seeded randomized cross-validation over the parameter regimes.

pub mod analysis;
pub mod closedform;
pub mod numerics;
pub mod recurrence;
pub mod scenario_io;
pub mod sweep;

pub use numerics::{Mode, NumericsError, Rational, Scalar};
pub use recurrence::{InitialConditions, Parameters, Trajectory, TrajectoryStatus};
