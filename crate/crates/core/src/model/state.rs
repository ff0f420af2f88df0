use serde::{Deserialize, Serialize};

use super::config::PhysicalConfig;
use super::grid::{Grid, Side};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative tolerance of the discrete volume constraint.
pub const VOLUME_TOL: f64 = 1e-8;

/// Grid state: elevation at nodes, discharge at midpoints on both exterior
/// sides, plus the mean interior discharge, heave displacement and velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State<T> {
    pub grid: Grid<T>,
    pub zeta_left: Vec<T>,
    pub q_left: Vec<T>,
    pub zeta_right: Vec<T>,
    pub q_right: Vec<T>,
    pub q_i_avg: T,
    pub delta: T,
    pub eta: T,
}

impl<T: Real> State<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self {
            grid,
            zeta_left: vec![T::zero(); grid.cells_left + 1],
            q_left: vec![T::zero(); grid.cells_left],
            zeta_right: vec![T::zero(); grid.cells_right + 1],
            q_right: vec![T::zero(); grid.cells_right],
            q_i_avg: T::zero(),
            delta: T::zero(),
            eta: T::zero(),
        }
    }

    /// Samples `zeta(x)` at nodes and `q(x)` at midpoints.
    pub fn from_fields(grid: Grid<T>, zeta: impl Fn(T) -> T, q: impl Fn(T) -> T, q_i_avg: T, delta: T, eta: T) -> Self {
        let mut s = Self::zeros(grid);
        for (side, z, qq) in [(Side::Left, &mut s.zeta_left, &mut s.q_left), (Side::Right, &mut s.zeta_right, &mut s.q_right)] {
            for (j, v) in z.iter_mut().enumerate() {
                *v = zeta(grid.node_x(side, j));
            }
            for (f, v) in qq.iter_mut().enumerate() {
                *v = q(grid.face_x(side, f));
            }
        }
        s.q_i_avg = q_i_avg;
        s.delta = delta;
        s.eta = eta;
        s
    }

    pub fn zeta(&self, side: Side) -> &[T] {
        match side {
            Side::Left => &self.zeta_left,
            Side::Right => &self.zeta_right,
        }
    }

    pub fn q(&self, side: Side) -> &[T] {
        match side {
            Side::Left => &self.q_left,
            Side::Right => &self.q_right,
        }
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Checks that the field lengths agree with the grid.
    pub fn validate_shape(&self) -> Result<()> {
        let g = &self.grid;
        let ok = self.zeta_left.len() == g.cells_left + 1
            && self.q_left.len() == g.cells_left
            && self.zeta_right.len() == g.cells_right + 1
            && self.q_right.len() == g.cells_right;
        if ok {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        let m = |a: &[T], b: &[T]| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect();
        Self {
            grid: self.grid,
            zeta_left: m(&self.zeta_left, &other.zeta_left),
            q_left: m(&self.q_left, &other.q_left),
            zeta_right: m(&self.zeta_right, &other.zeta_right),
            q_right: m(&self.q_right, &other.q_right),
            q_i_avg: f(self.q_i_avg, other.q_i_avg),
            delta: f(self.delta, other.delta),
            eta: f(self.eta, other.eta),
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        self.zip_with(self, |x, _| f(x))
    }

    pub fn scaled(&self, a: T) -> Self {
        self.map(|x| a * x)
    }

    /// `self + a * other`.
    pub fn add_scaled(&self, a: T, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        Ok(self.zip_with(other, |x, y| x + a * y))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add_scaled(-T::one(), other)
    }

    pub fn max_abs(&self) -> T {
        self.zeta_left
            .iter()
            .chain(&self.q_left)
            .chain(&self.zeta_right)
            .chain(&self.q_right)
            .chain([&self.q_i_avg, &self.delta, &self.eta])
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.max_abs().is_finite()
    }

    /// Discrete volume functional: trapezoid integral of zeta plus 2 l delta.
    pub fn volume(&self) -> T {
        let two = T::lit(2.0);
        let trap = |z: &[T], h: T| {
            let n = z.len() - 1;
            (z[1..n].iter().copied().sum::<T>() + (z[0] + z[n]) * T::lit(0.5)) * h
        };
        trap(&self.zeta_left, self.grid.spacing(Side::Left))
            + trap(&self.zeta_right, self.grid.spacing(Side::Right))
            + two * self.grid.l * self.delta
    }

    /// Volume defect relative to the scale of its terms.
    pub fn volume_defect(&self) -> T {
        let abs = self.map(|x| x.abs());
        let scale = abs.volume();
        if scale == T::zero() {
            T::zero()
        } else {
            self.volume().abs() / scale
        }
    }

    /// Whether the discrete volume constraint holds to [`VOLUME_TOL`].
    pub fn satisfies_volume(&self) -> bool {
        self.volume_defect() <= T::lit(VOLUME_TOL)
    }

    /// X-orthogonal projection onto the discrete volume-constraint
    /// hyperplane: subtracts the same constant from zeta and delta.
    pub fn project_volume(&self) -> Self {
        let s = self.volume() / (self.grid.exterior_length() + T::lit(2.0) * self.grid.l);
        let mut out = self.clone();
        for v in out.zeta_left.iter_mut().chain(out.zeta_right.iter_mut()) {
            *v = *v - s;
        }
        out.delta = out.delta - s;
        out
    }

    /// Mirror image x -> -x: zeta even, q odd, mean interior discharge odd.
    pub fn mirror(&self) -> Result<Self> {
        if !self.grid.is_mirror() {
            return Err(Error::Asymmetric { big_l: self.grid.big_l.as_f64(), l_prime: self.grid.l_prime.as_f64() });
        }
        let rev = |v: &[T], sign: T| v.iter().rev().map(|&x| sign * x).collect::<Vec<_>>();
        Ok(Self {
            grid: self.grid,
            zeta_left: rev(&self.zeta_right, T::one()),
            q_left: rev(&self.q_right, -T::one()),
            zeta_right: rev(&self.zeta_left, T::one()),
            q_right: rev(&self.q_left, -T::one()),
            q_i_avg: -self.q_i_avg,
            delta: self.delta,
            eta: self.eta,
        })
    }
}

/// zeta^T H zeta~ with H = h * tridiag(1/8, 3/4, 1/8), corner diagonals 3h/8.
fn zeta_form<T: Real>(a: &[T], b: &[T], h: T) -> T {
    let n = a.len() - 1;
    let (d, o, c) = (T::lit(0.75), T::lit(0.125), T::lit(0.375));
    let mut s = c * (a[0] * b[0] + a[n] * b[n]);
    for j in 1..n {
        s = s + d * a[j] * b[j];
    }
    for j in 0..n {
        s = s + o * (a[j] * b[j + 1] + a[j + 1] * b[j]);
    }
    s * h
}

/// Discrete energy inner product.
pub fn inner_product<T: Real>(a: &State<T>, b: &State<T>, cfg: &PhysicalConfig<T>) -> Result<T> {
    a.check_grid(b)?;
    a.validate_shape()?;
    b.validate_shape()?;
    let g = &a.grid;
    let (hl, hr) = (g.spacing(Side::Left), g.spacing(Side::Right));
    let two = T::lit(2.0);
    let dot = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&u, &v)| u * v).sum::<T>();
    let zeta = zeta_form(&a.zeta_left, &b.zeta_left, hl) + zeta_form(&a.zeta_right, &b.zeta_right, hr);
    let q = dot(&a.q_left, &b.q_left) * hl + dot(&a.q_right, &b.q_right) * hr;
    Ok(cfg.rho * cfg.g / two * zeta
        + cfg.rho / (two * cfg.h0) * q
        + cfg.rho * cfg.l * cfg.alpha_bar * a.q_i_avg * b.q_i_avg
        + cfg.rho * cfg.g * cfg.l * a.delta * b.delta
        + cfg.m_bar / two * a.eta * b.eta)
}

pub fn norm<T: Real>(z: &State<T>, cfg: &PhysicalConfig<T>) -> T {
    inner_product(z, z, cfg).map(|v| v.max(T::zero()).sqrt()).unwrap_or(T::nan())
}

/// Energy split into the evolving quadratic part and the constant offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Energy<T> {
    pub variable: T,
    pub offset: T,
    pub total: T,
}

pub fn total_energy<T: Real>(z: &State<T>, cfg: &PhysicalConfig<T>) -> Result<Energy<T>> {
    let variable = inner_product(z, z, cfg)?;
    Ok(Energy { variable, offset: cfg.energy_offset, total: variable + cfg.energy_offset })
}

/// Orthogonal projection onto the mirror-symmetric subspace.
pub fn project_symmetric<T: Real>(z: &State<T>) -> Result<State<T>> {
    let r = z.mirror()?;
    let mut p = z.zip_with(&r, |a, b| (a + b) * T::lit(0.5));
    p.q_i_avg = T::zero();
    Ok(p)
}

/// Norm of the antisymmetric part.
pub fn antisymmetric_norm<T: Real>(z: &State<T>, cfg: &PhysicalConfig<T>) -> Result<T> {
    let p = project_symmetric(z)?;
    Ok(norm(&z.sub(&p)?, cfg))
}
