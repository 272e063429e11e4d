//! Volume-penalized finite volume solver for the compressible
//! Navier-Stokes-Fourier equations on the periodic box `[-1, 1]^2`.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`, which is what the
//! command line tool and the convergence studies use.

pub mod analysis;
pub mod check;
pub mod driver;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod operators;
pub mod physics;
pub mod real;
pub mod scenarios;
pub mod solver;

pub use error::{Error, Result};
pub use real::Real;

pub type Grid = grid::TorusGrid<f64>;
pub type Scalar = field::ScalarField<f64>;
pub type Vector = field::VectorField<f64>;
pub type Tensor = field::TensorField<f64>;
pub type State = solver::State<f64>;
pub type Params = solver::RunParams<f64>;
pub type Solver = solver::Solver<f64>;
pub type Scenario = scenarios::Scenario<f64>;
pub type Settings = scenarios::RunSettings<f64>;
pub type Solution = analysis::Solution<f64>;
