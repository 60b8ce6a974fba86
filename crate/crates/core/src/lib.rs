//! Exact-arithmetic toolkit for Hegselmann-Krause opinion dynamics.
//!
//! * [`dynamics`]: exact simulation, consensus / split / fixed-point detection.
//! * [`configs`]: equidistant and linear lower-bound configurations, profile files.
//! * [`graphs`]: connected ordered unit interval graphs (the modes I_n^c).
//! * [`certify`]: machine checks of the lower-bound inequalities and the
//!   equidistant convergence-time formula.
//! * [`milp`]: the binary linear program for bounding f(n), with LP-file export.
//! * [`solver`]: exact depth-first search over influence-graph sequences
//!   deciding that program, with replayable certificates.
//! * [`lp`]: the exact rational simplex used by the solver.

pub mod certify;
pub mod cli;
pub mod configs;
pub mod dynamics;
pub mod error;
pub mod graphs;
pub mod lp;
pub mod milp;
pub mod rational;
pub mod solver;

pub use dynamics::{OpinionProfile, TerminationStatus, Trajectory};
pub use error::{HkError, Result};
pub use graphs::OrderedUIGraph;
pub use rational::Rational;
