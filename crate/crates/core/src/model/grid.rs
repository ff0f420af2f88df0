use serde::{Deserialize, Serialize};

use super::config::PhysicalConfig;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MIN_CELLS: usize = 4;
pub const DEFAULT_CELLS: usize = 200;

/// Two uniform exterior grids. On each side the surface elevation lives at
/// the `cells + 1` nodes (walls and interface points included) and the
/// discharge at the `cells` midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid<T> {
    pub l: T,
    pub big_l: T,
    pub l_prime: T,
    pub cells_left: usize,
    pub cells_right: usize,
}

/// Which exterior component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl<T: Real> Grid<T> {
    /// `cells` on the left; the right count matches the left spacing as
    /// closely as possible.
    pub fn new(cfg: &PhysicalConfig<T>, cells: usize) -> Result<Self> {
        let ratio = ((cfg.l_prime - cfg.l) / (cfg.big_l - cfg.l)).as_f64();
        let right = ((cells as f64) * ratio).round() as usize;
        Self::with_counts(cfg, cells, right)
    }

    pub fn with_counts(cfg: &PhysicalConfig<T>, cells_left: usize, cells_right: usize) -> Result<Self> {
        for c in [cells_left, cells_right] {
            if c < MIN_CELLS {
                return Err(Error::GridTooCoarse { cells: c, min: MIN_CELLS });
            }
        }
        Ok(Self { l: cfg.l, big_l: cfg.big_l, l_prime: cfg.l_prime, cells_left, cells_right })
    }

    pub fn cells(&self, side: Side) -> usize {
        match side {
            Side::Left => self.cells_left,
            Side::Right => self.cells_right,
        }
    }

    pub fn spacing(&self, side: Side) -> T {
        match side {
            Side::Left => (self.big_l - self.l) / T::from_count(self.cells_left),
            Side::Right => (self.l_prime - self.l) / T::from_count(self.cells_right),
        }
    }

    fn origin(&self, side: Side) -> T {
        match side {
            Side::Left => -self.big_l,
            Side::Right => self.l,
        }
    }

    pub fn node_x(&self, side: Side, j: usize) -> T {
        self.origin(side) + self.spacing(side) * T::from_count(j)
    }

    pub fn face_x(&self, side: Side, f: usize) -> T {
        self.origin(side) + self.spacing(side) * (T::from_count(f) + T::lit(0.5))
    }

    /// Whether the grid is invariant under x -> -x.
    pub fn is_mirror(&self) -> bool {
        self.big_l == self.l_prime && self.cells_left == self.cells_right
    }

    /// Total exterior length.
    pub fn exterior_length(&self) -> T {
        self.big_l + self.l_prime - self.l - self.l
    }

    /// Same geometry, `factor` times as many cells per side.
    pub fn refined(&self, factor: usize) -> Self {
        Self { cells_left: self.cells_left * factor, cells_right: self.cells_right * factor, ..*self }
    }
}
