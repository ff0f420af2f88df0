//! Configuration, grids, states and the energy geometry.

pub mod config;
pub mod grid;
pub mod io;
pub mod state;

pub use config::{build_config, integrate_object, HeqProfile, PhysicalConfig, RawConfig};
pub use grid::{Grid, Side, DEFAULT_CELLS, MIN_CELLS};
pub use state::{antisymmetric_norm, inner_product, norm, project_symmetric, total_energy, Energy, State, VOLUME_TOL};
