//! Boundary behavior of positive harmonic functions on the upper half-space and
//! the unit ball: Poisson extensions of boundary measures, normal traces as
//! Mellin convolutions, the growth constant `C_alpha`, measure derivatives and
//! Beurling sums.

pub mod ball;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod halfspace;
pub mod harness;
pub mod measures;
pub mod mellin;
pub mod quad;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
pub use halfspace::{extend, normal_trace_convolution, normal_trace_direct, poisson_kernel, HalfSpacePoint};
pub use measures::{ball_mass, power_law_measure, BoundaryMeasure, PointSequence, RadialProfile};
pub use report::{ConvergenceReport, LimitStatus};
pub use specfun::{kappa_n, tauberian_constant, Dimension};
