//! Linearized and nonlinear shallow-water dynamics of a wave tank with a
//! floating object in heave, its spectrum, and boundary-free control by the
//! object's vertical force.
//!
//! The core is generic over the scalar type; `f64` aliases are provided at
//! the crate root.

pub mod control;
pub mod error;
pub mod linalg;
pub mod linear_sim;
pub mod model;
pub mod nonlinear_sim;
pub mod quadrature;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Config = model::PhysicalConfig<f64>;
pub type RawConfig = model::RawConfig<f64>;
pub type State = model::State<f64>;
pub type Grid = model::Grid<f64>;
pub type Mode = spectral::Mode<f64>;
pub type Generator = linear_sim::DiscreteGenerator<f64>;
pub type ModeSet = linear_sim::ModeSet<f64>;
pub type Trajectory = linear_sim::Trajectory<f64>;
pub type ControlSignal = control::ControlSignal<f64>;
pub type NonlinearState = nonlinear_sim::NonlinearState<f64>;
