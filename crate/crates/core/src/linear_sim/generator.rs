use crate::error::{Error, Result};
use crate::linalg::{BandLu, BandMatrix};
use crate::model::{Grid, PhysicalConfig, Side, State, MIN_CELLS};
use crate::scalar::Real;

/// Half bandwidth of the packed operators.
pub const BAND: usize = 3;

/// Discretized generator in weighted form: `W dz/dt = K z + W B u`, with `W`
/// the SPD matrix of the discrete energy inner product and `K` exactly
/// skew-symmetric, so `A_h = W^{-1} K` is skew-adjoint in that product.
///
/// Unknowns are packed as `[zeta_L0, q_L0, zeta_L1, ..., zeta_LN, c, delta,
/// eta, zeta_R0, q_R0, ..., zeta_RN]`, which keeps both matrices within
/// three diagonals of the main one.
#[derive(Debug, Clone)]
pub struct DiscreteGenerator<T> {
    pub cfg: PhysicalConfig<T>,
    pub grid: Grid<T>,
    k: BandMatrix<T>,
    w: BandMatrix<T>,
    w_lu: BandLu<T>,
}

/// Positions of the unknowns in the packed vector.
#[derive(Debug, Clone, Copy)]
pub struct Layout {
    pub cells_left: usize,
    pub cells_right: usize,
}

impl Layout {
    pub fn zeta(&self, side: Side, j: usize) -> usize {
        match side {
            Side::Left => 2 * j,
            Side::Right => self.base() + 2 * j,
        }
    }

    pub fn q(&self, side: Side, f: usize) -> usize {
        self.zeta(side, f) + 1
    }

    pub fn c(&self) -> usize {
        2 * self.cells_left + 1
    }

    pub fn delta(&self) -> usize {
        self.c() + 1
    }

    pub fn eta(&self) -> usize {
        self.c() + 2
    }

    fn base(&self) -> usize {
        2 * self.cells_left + 4
    }

    pub fn len(&self) -> usize {
        self.base() + 2 * self.cells_right + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl<T: Real> DiscreteGenerator<T> {
    pub fn new(cfg: &PhysicalConfig<T>, grid: Grid<T>) -> Result<Self> {
        for c in [grid.cells_left, grid.cells_right] {
            if c < MIN_CELLS {
                return Err(Error::GridTooCoarse { cells: c, min: MIN_CELLS });
            }
        }
        let lay = Layout { cells_left: grid.cells_left, cells_right: grid.cells_right };
        let n = lay.len();
        let two = T::lit(2.0);
        let (rho, g, l) = (cfg.rho, cfg.g, cfg.l);
        let s = rho * g / two;
        let mut k = BandMatrix::zeros(n, BAND, BAND);
        let mut w = BandMatrix::zeros(n, BAND, BAND);
        let mut skew = |i: usize, j: usize, v: T| {
            k.add(i, j, v);
            k.add(j, i, -v);
        };
        for side in [Side::Left, Side::Right] {
            let cells = grid.cells(side);
            // dzeta_j/dt weighted row: -(rho g/2)(q_{j+1/2} - q_{j-1/2}); the
            // transposed entries give the q rows -(rho g/2)(zeta_{f+1} - zeta_f).
            for f in 0..cells {
                skew(lay.zeta(side, f), lay.q(side, f), -s);
                skew(lay.zeta(side, f + 1), lay.q(side, f), s);
            }
            let h = grid.spacing(side);
            let (d, o, corner) = (T::lit(0.75) * h * s, T::lit(0.125) * h * s, T::lit(0.375) * h * s);
            for j in 0..=cells {
                let i = lay.zeta(side, j);
                w.add(i, i, if j == 0 || j == cells { corner } else { d });
                if j < cells {
                    w.add(i, lay.zeta(side, j + 1), o);
                    w.add(lay.zeta(side, j + 1), i, o);
                }
            }
            for f in 0..cells {
                let i = lay.q(side, f);
                w.add(i, i, rho / (two * cfg.h0) * h);
            }
        }
        let zl = lay.zeta(Side::Left, grid.cells_left);
        let zr = lay.zeta(Side::Right, 0);
        // interface discharge q(-l) = c + l eta leaves the left domain,
        // q(l) = c - l eta enters the right one.
        skew(zl, lay.c(), -s);
        skew(zl, lay.eta(), -s * l);
        skew(zr, lay.c(), s);
        skew(zr, lay.eta(), -s * l);
        skew(lay.delta(), lay.eta(), rho * g * l);
        w.add(lay.c(), lay.c(), rho * l * cfg.alpha_bar);
        w.add(lay.delta(), lay.delta(), rho * g * l);
        w.add(lay.eta(), lay.eta(), cfg.m_bar / two);
        let w_lu = w.factor()?;
        Ok(Self { cfg: cfg.clone(), grid, k, w, w_lu })
    }

    pub fn layout(&self) -> Layout {
        Layout { cells_left: self.grid.cells_left, cells_right: self.grid.cells_right }
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    pub fn skew_matrix(&self) -> &BandMatrix<T> {
        &self.k
    }

    pub fn weight_matrix(&self) -> &BandMatrix<T> {
        &self.w
    }

    pub fn pack(&self, z: &State<T>) -> Result<Vec<T>> {
        if z.grid != self.grid {
            return Err(Error::GridMismatch);
        }
        z.validate_shape()?;
        let lay = self.layout();
        let mut v = vec![T::zero(); lay.len()];
        for side in [Side::Left, Side::Right] {
            for (j, &x) in z.zeta(side).iter().enumerate() {
                v[lay.zeta(side, j)] = x;
            }
            for (f, &x) in z.q(side).iter().enumerate() {
                v[lay.q(side, f)] = x;
            }
        }
        v[lay.c()] = z.q_i_avg;
        v[lay.delta()] = z.delta;
        v[lay.eta()] = z.eta;
        Ok(v)
    }

    pub fn unpack(&self, v: &[T]) -> State<T> {
        let lay = self.layout();
        let mut z = State::zeros(self.grid);
        for j in 0..=self.grid.cells_left {
            z.zeta_left[j] = v[lay.zeta(Side::Left, j)];
        }
        for f in 0..self.grid.cells_left {
            z.q_left[f] = v[lay.q(Side::Left, f)];
        }
        for j in 0..=self.grid.cells_right {
            z.zeta_right[j] = v[lay.zeta(Side::Right, j)];
        }
        for f in 0..self.grid.cells_right {
            z.q_right[f] = v[lay.q(Side::Right, f)];
        }
        z.q_i_avg = v[lay.c()];
        z.delta = v[lay.delta()];
        z.eta = v[lay.eta()];
        z
    }

    /// A_h z.
    pub fn apply(&self, z: &State<T>) -> Result<State<T>> {
        let v = self.pack(z)?;
        Ok(self.unpack(&self.w_lu.solve(&self.k.matvec(&v))))
    }

    /// A_h z + B u.
    pub fn apply_forced(&self, z: &State<T>, u: T) -> Result<State<T>> {
        let mut r = self.apply(z)?;
        r.eta = r.eta + u / self.cfg.m_bar;
        Ok(r)
    }

    /// z^T K z, the weighted form of <A_h z, z>.
    pub fn skew_form(&self, z: &State<T>) -> Result<T> {
        let v = self.pack(z)?;
        Ok(v.iter().zip(self.k.matvec(&v)).map(|(&a, b)| a * b).sum())
    }
}
