//! Discretized generator, energy-consistent time stepping and modal
//! synthesis for the linearized system.

pub mod generator;
pub mod integrator;
pub mod modal;

pub use generator::{DiscreteGenerator, Layout, BAND};
pub use integrator::{default_dt, rk4_step, simulate, simulate_closed_loop, step, CnStepper, SimOptions, Trajectory};
pub use modal::{ModeSet, ORTHO_TOL};
