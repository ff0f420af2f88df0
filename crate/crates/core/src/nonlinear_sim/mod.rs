//! Finite-volume solver for the nonlinear exterior shallow-water system
//! coupled to the object ODEs, and the interior pressure reconstruction.

pub mod coefficients;
pub mod pressure;
pub mod solver;

pub use coefficients::{coefficients, CoefficientSet};
pub use pressure::{pressure_with_accel, reconstruct_interior_pressure, PressureProfile};
pub use solver::{
    compression_ratio, default_nonlinear_dt, perturbation_distance, rhs, simulate_nonlinear, step_nonlinear, NonlinearOptions,
    NonlinearState, NonlinearTrajectory, Physics, CFL_NUMBER, SHOCK_RATIO,
};
