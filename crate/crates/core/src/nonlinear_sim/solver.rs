use serde::{Deserialize, Serialize};

use super::coefficients::coefficients;
use crate::control::ControlSignal;
use crate::error::{Error, Result};
use crate::model::{Grid, PhysicalConfig, Side, State};
use crate::scalar::Real;

/// Default Courant number.
pub const CFL_NUMBER: f64 = 0.45;
/// Default limit on the compression indicator (jump of a characteristic
/// speed between neighbouring cells relative to sqrt(g h0)). Smooth data
/// stays O(1/cells) below it; a captured shock holds a jump near 0.025.
pub const SHOCK_RATIO: f64 = 0.02;

/// Which equations the finite-volume solver advances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Physics {
    /// Full shallow-water flux and the nonlinear object ODEs.
    Nonlinear,
    /// Linear flux (q, g h0 zeta) and the linear object rows, with the same
    /// spatial and temporal scheme.
    Linearized,
}

/// Cell averages of depth and discharge on both exterior sides plus the
/// object unknowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearState<T> {
    pub grid: Grid<T>,
    pub h_left: Vec<T>,
    pub q_left: Vec<T>,
    pub h_right: Vec<T>,
    pub q_right: Vec<T>,
    pub q_i_avg: T,
    pub delta: T,
    pub eta: T,
}

impl<T: Real> NonlinearState<T> {
    /// Lake at rest.
    pub fn at_rest(grid: Grid<T>, cfg: &PhysicalConfig<T>) -> Self {
        Self {
            grid,
            h_left: vec![cfg.h0; grid.cells_left],
            q_left: vec![T::zero(); grid.cells_left],
            h_right: vec![cfg.h0; grid.cells_right],
            q_right: vec![T::zero(); grid.cells_right],
            q_i_avg: T::zero(),
            delta: T::zero(),
            eta: T::zero(),
        }
    }

    /// Cell averages from a linear state (elevation averaged from nodes).
    pub fn from_linear(z: &State<T>, cfg: &PhysicalConfig<T>) -> Result<Self> {
        z.validate_shape()?;
        let cells = |zeta: &[T]| zeta.windows(2).map(|w| cfg.h0 + (w[0] + w[1]) * T::lit(0.5)).collect::<Vec<_>>();
        Ok(Self {
            grid: z.grid,
            h_left: cells(&z.zeta_left),
            q_left: z.q_left.clone(),
            h_right: cells(&z.zeta_right),
            q_right: z.q_right.clone(),
            q_i_avg: z.q_i_avg,
            delta: z.delta,
            eta: z.eta,
        })
    }

    /// Perturbation as a linear state; node elevations are averaged from
    /// neighbouring cells and extrapolated at the ends.
    pub fn to_linear(&self, cfg: &PhysicalConfig<T>) -> State<T> {
        let nodes = |h: &[T]| {
            let n = h.len();
            let z: Vec<T> = h.iter().map(|&v| v - cfg.h0).collect();
            let half = T::lit(0.5);
            let three_half = T::lit(1.5);
            let mut out = Vec::with_capacity(n + 1);
            out.push(three_half * z[0] - half * z[1]);
            for j in 1..n {
                out.push(half * (z[j - 1] + z[j]));
            }
            out.push(three_half * z[n - 1] - half * z[n - 2]);
            out
        };
        State {
            grid: self.grid,
            zeta_left: nodes(&self.h_left),
            q_left: self.q_left.clone(),
            zeta_right: nodes(&self.h_right),
            q_right: self.q_right.clone(),
            q_i_avg: self.q_i_avg,
            delta: self.delta,
            eta: self.eta,
        }
    }

    pub fn h(&self, side: Side) -> &[T] {
        match side {
            Side::Left => &self.h_left,
            Side::Right => &self.h_right,
        }
    }

    pub fn q(&self, side: Side) -> &[T] {
        match side {
            Side::Left => &self.q_left,
            Side::Right => &self.q_right,
        }
    }

    /// Interior depth and discharge at `x` in [-l, l].
    pub fn interior(&self, x: T, cfg: &PhysicalConfig<T>) -> (T, T) {
        (cfg.h_eq_at(x) + self.delta, self.q_i_avg - x * self.eta)
    }

    /// Total water volume: exterior cells plus the column under the object.
    pub fn volume(&self, cfg: &PhysicalConfig<T>) -> T {
        let side = |h: &[T], dx: T| h.iter().copied().sum::<T>() * dx;
        let under = cfg.h0 * (cfg.l + cfg.l) - cfg.m / cfg.rho;
        side(&self.h_left, self.grid.spacing(Side::Left))
            + side(&self.h_right, self.grid.spacing(Side::Right))
            + under
            + (cfg.l + cfg.l) * self.delta
    }

    /// Discrete total energy minus its value at rest.
    pub fn energy(&self, cfg: &PhysicalConfig<T>, physics: Physics) -> Result<T> {
        let half = T::lit(0.5);
        let mut e = T::zero();
        for side in [Side::Left, Side::Right] {
            let dx = self.grid.spacing(side);
            for (&h, &q) in self.h(side).iter().zip(self.q(side)) {
                let depth = if physics == Physics::Nonlinear { h } else { cfg.h0 };
                e = e + dx * half * cfg.rho * (cfg.g * (h - cfg.h0).powi(2) + q * q / depth);
            }
        }
        let (alpha, mass) = match physics {
            Physics::Nonlinear => {
                let c = coefficients(self.delta, cfg)?;
                (c.alpha, c.mass)
            }
            Physics::Linearized => (cfg.alpha_bar, cfg.m_bar),
        };
        Ok(e + cfg.rho * cfg.g * cfg.l * self.delta * self.delta
            + cfg.rho * cfg.l * alpha * self.q_i_avg * self.q_i_avg
            + half * mass * self.eta * self.eta)
    }

    fn axpy(&self, a: T, d: &Self) -> Self {
        let f = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&u, &v)| u + a * v).collect::<Vec<_>>();
        Self {
            grid: self.grid,
            h_left: f(&self.h_left, &d.h_left),
            q_left: f(&self.q_left, &d.q_left),
            h_right: f(&self.h_right, &d.h_right),
            q_right: f(&self.q_right, &d.q_right),
            q_i_avg: self.q_i_avg + a * d.q_i_avg,
            delta: self.delta + a * d.delta,
            eta: self.eta + a * d.eta,
        }
    }

    fn average(&self, other: &Self) -> Self {
        let half = T::lit(0.5);
        let f = |x: &[T], y: &[T]| x.iter().zip(y).map(|(&u, &v)| half * (u + v)).collect::<Vec<_>>();
        Self {
            grid: self.grid,
            h_left: f(&self.h_left, &other.h_left),
            q_left: f(&self.q_left, &other.q_left),
            h_right: f(&self.h_right, &other.h_right),
            q_right: f(&self.q_right, &other.q_right),
            q_i_avg: half * (self.q_i_avg + other.q_i_avg),
            delta: half * (self.delta + other.delta),
            eta: half * (self.eta + other.eta),
        }
    }

    fn check_depth(&self) -> Result<()> {
        for side in [Side::Left, Side::Right] {
            for (j, &h) in self.h(side).iter().enumerate() {
                if !h.is_finite() {
                    return Err(Error::NonFinite("depth".into()));
                }
                if h <= T::zero() {
                    return Err(Error::Drying { depth: h.as_f64(), x: self.grid.face_x(side, j).as_f64() });
                }
            }
        }
        Ok(())
    }
}

/// X-norm of the difference of two states in the linear energy product,
/// evaluated on cell averages.
pub fn perturbation_distance<T: Real>(a: &NonlinearState<T>, b: &NonlinearState<T>, cfg: &PhysicalConfig<T>) -> Result<T> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    let half = T::lit(0.5);
    let mut e = T::zero();
    for side in [Side::Left, Side::Right] {
        let dx = a.grid.spacing(side);
        for j in 0..a.grid.cells(side) {
            let dh = a.h(side)[j] - b.h(side)[j];
            let dq = a.q(side)[j] - b.q(side)[j];
            e = e + dx * half * cfg.rho * (cfg.g * dh * dh + dq * dq / cfg.h0);
        }
    }
    let (dc, dd, de) = (a.q_i_avg - b.q_i_avg, a.delta - b.delta, a.eta - b.eta);
    e = e + cfg.rho * cfg.l * cfg.alpha_bar * dc * dc + cfg.rho * cfg.g * cfg.l * dd * dd + half * cfg.m_bar * de * de;
    Ok(e.sqrt())
}

/// Right-hand side of the semi-discrete system, with the largest signal speed.
pub fn rhs<T: Real>(s: &NonlinearState<T>, u: T, cfg: &PhysicalConfig<T>, physics: Physics) -> Result<(NonlinearState<T>, T)> {
    s.check_depth()?;
    let (g, h0, rho, l) = (cfg.g, cfg.h0, cfg.rho, cfg.l);
    let half = T::lit(0.5);
    let c0 = (g * h0).sqrt();
    let flux = |h: T, q: T| -> (T, T, T) {
        match physics {
            Physics::Nonlinear => (q, q * q / h + half * g * h * h, (q / h).abs() + (g * h).sqrt()),
            Physics::Linearized => (q, g * h0 * (h - h0), c0),
        }
    };
    let qb_left = s.q_i_avg + l * s.eta;
    let qb_right = s.q_i_avg - l * s.eta;
    let mut out = NonlinearState {
        grid: s.grid,
        h_left: vec![T::zero(); s.h_left.len()],
        q_left: vec![T::zero(); s.q_left.len()],
        h_right: vec![T::zero(); s.h_right.len()],
        q_right: vec![T::zero(); s.q_right.len()],
        q_i_avg: T::zero(),
        delta: T::zero(),
        eta: T::zero(),
    };
    let mut amax = T::zero();
    for side in [Side::Left, Side::Right] {
        let (h, q) = (s.h(side), s.q(side));
        let n = h.len();
        let dx = s.grid.spacing(side);
        // ghost cells: reflecting wall, or interface ghost whose mass flux
        // reproduces the prescribed boundary discharge exactly
        let (lo, hi) = match side {
            Side::Left => ((h[0], -q[0]), (h[n - 1], qb_left + qb_left - q[n - 1])),
            Side::Right => ((h[0], qb_right + qb_right - q[0]), (h[n - 1], -q[n - 1])),
        };
        let cell = |j: isize| -> (T, T) {
            if j < 0 {
                lo
            } else if j as usize >= n {
                hi
            } else {
                (h[j as usize], q[j as usize])
            }
        };
        let mut fluxes = Vec::with_capacity(n + 1);
        for f in 0..=n {
            let (hl, ql) = cell(f as isize - 1);
            let (hr, qr) = cell(f as isize);
            let (fl0, fl1, al) = flux(hl, ql);
            let (fr0, fr1, ar) = flux(hr, qr);
            let a = al.max(ar);
            amax = amax.max(a);
            fluxes.push((half * (fl0 + fr0) - half * a * (hr - hl), half * (fl1 + fr1) - half * a * (qr - ql)));
        }
        let (dh, dq) = match side {
            Side::Left => (&mut out.h_left, &mut out.q_left),
            Side::Right => (&mut out.h_right, &mut out.q_right),
        };
        for j in 0..n {
            dh[j] = -(fluxes[j + 1].0 - fluxes[j].0) / dx;
            dq[j] = -(fluxes[j + 1].1 - fluxes[j].1) / dx;
        }
    }
    let zeta_m = s.h_left[s.h_left.len() - 1] - h0;
    let zeta_p = s.h_right[0] - h0;
    let two_l = l + l;
    match physics {
        Physics::Nonlinear => {
            let bern = |q: T, h: T| half * rho * q * q / (h * h);
            let hm = s.h_left[s.h_left.len() - 1];
            let hp = s.h_right[0];
            let vm = rho * g * zeta_m + bern(qb_left, hm);
            let vp = rho * g * zeta_p + bern(qb_right, hp);
            let co = coefficients(s.delta, cfg)?;
            let (c, eta) = (s.q_i_avg, s.eta);
            out.q_i_avg = (-(vp - vm) / (two_l * rho) - co.alpha_prime * eta * c) / co.alpha;
            out.eta = (two_l * half * (vp + vm) + u + two_l * rho * co.beta * eta * eta - two_l * rho * g * s.delta
                + rho * l * co.alpha_prime * c * c)
                / co.mass;
        }
        Physics::Linearized => {
            out.q_i_avg = -g * (zeta_p - zeta_m) / (two_l * cfg.alpha_bar);
            out.eta = (two_l * rho * g * half * (zeta_p + zeta_m) - two_l * rho * g * s.delta + u) / cfg.m_bar;
        }
    }
    out.delta = s.eta;
    Ok((out, amax))
}

/// Compression indicator: largest decrease of a characteristic speed from
/// one cell to the next, relative to sqrt(g h0).
pub fn compression_ratio<T: Real>(s: &NonlinearState<T>, cfg: &PhysicalConfig<T>) -> T {
    let c0 = (cfg.g * cfg.h0).sqrt();
    let mut r = T::zero();
    for side in [Side::Left, Side::Right] {
        let (h, q) = (s.h(side), s.q(side));
        let speeds = |j: usize| {
            let v = q[j] / h[j];
            let c = (cfg.g * h[j]).sqrt();
            (v + c, v - c)
        };
        for j in 0..h.len().saturating_sub(1) {
            let (a0, b0) = speeds(j);
            let (a1, b1) = speeds(j + 1);
            r = r.max((a0 - a1) / c0).max((b0 - b1) / c0);
        }
    }
    r
}

/// One Heun (SSP-RK2) step with inputs `u0` at t_n and `u1` at t_{n+1}.
pub fn step_nonlinear<T: Real>(
    s: &NonlinearState<T>,
    u0: T,
    u1: T,
    dt: T,
    cfg: &PhysicalConfig<T>,
    physics: Physics,
    cfl: T,
) -> Result<NonlinearState<T>> {
    if !(dt > T::zero()) {
        return Err(Error::TimeStep(dt.as_f64()));
    }
    let dx = s.grid.spacing(Side::Left).min(s.grid.spacing(Side::Right));
    let (k1, a1) = rhs(s, u0, cfg, physics)?;
    check_cfl(dt, cfl * dx / a1)?;
    let s1 = s.axpy(dt, &k1);
    let (k2, a2) = rhs(&s1, u1, cfg, physics)?;
    check_cfl(dt, cfl * dx / a2)?;
    let out = s.average(&s1.axpy(dt, &k2));
    out.check_depth()?;
    coefficients(out.delta, cfg)?;
    Ok(out)
}

fn check_cfl<T: Real>(dt: T, limit: T) -> Result<()> {
    if dt > limit * (T::one() + T::lit(1e-12)) {
        return Err(Error::Cfl { dt: dt.as_f64(), limit: limit.as_f64() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct NonlinearOptions<T> {
    pub physics: Physics,
    pub cfl: T,
    /// Fixed step; by default 90% of the CFL limit of the initial state.
    pub dt: Option<T>,
    pub snapshot_every: usize,
    pub shock_ratio: T,
}

impl<T: Real> Default for NonlinearOptions<T> {
    fn default() -> Self {
        Self {
            physics: Physics::Nonlinear,
            cfl: T::lit(CFL_NUMBER),
            dt: None,
            snapshot_every: 0,
            shock_ratio: T::lit(SHOCK_RATIO),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonlinearTrajectory<T> {
    pub physics: Physics,
    pub dt: T,
    pub times: Vec<T>,
    pub controls: Vec<T>,
    pub energy: Vec<T>,
    /// Cumulative midpoint-rule work of the input.
    pub work: Vec<T>,
    pub volume: Vec<T>,
    pub max_volume_defect: T,
    pub snapshots: Vec<(usize, NonlinearState<T>)>,
    pub final_state: NonlinearState<T>,
}

/// Step size used when none is given: 90% of the CFL limit at `s`.
pub fn default_nonlinear_dt<T: Real>(s: &NonlinearState<T>, cfg: &PhysicalConfig<T>, physics: Physics, cfl: T) -> Result<T> {
    let (_, a) = rhs(s, T::zero(), cfg, physics)?;
    let dx = s.grid.spacing(Side::Left).min(s.grid.spacing(Side::Right));
    Ok(T::lit(0.9) * cfl * dx / a)
}

/// Integrates from `s0` over [0, t_final] with a fixed step.
pub fn simulate_nonlinear<T: Real>(
    s0: &NonlinearState<T>,
    u: &ControlSignal<T>,
    t_final: T,
    cfg: &PhysicalConfig<T>,
    opts: NonlinearOptions<T>,
) -> Result<NonlinearTrajectory<T>> {
    let dt0 = match opts.dt {
        Some(d) => d,
        None => default_nonlinear_dt(s0, cfg, opts.physics, opts.cfl)?,
    };
    if !(dt0 > T::zero()) {
        return Err(Error::TimeStep(dt0.as_f64()));
    }
    let n = (t_final / dt0 - T::lit(1e-9)).ceil().to_usize().unwrap_or(0).max(1);
    let dt = t_final / T::from_count(n);
    let v0 = s0.volume(cfg);
    let mut s = s0.clone();
    let mut times = vec![T::zero()];
    let mut controls = vec![u.eval(T::zero())];
    let mut energy = vec![s.energy(cfg, opts.physics)?];
    let mut work = vec![T::zero()];
    let mut volume = vec![v0];
    let mut max_defect = T::zero();
    let mut snapshots = vec![(0, s.clone())];
    for k in 1..=n {
        let t = dt * T::from_count(k);
        let (u0, u1) = (controls[k - 1], u.eval(t));
        let next = step_nonlinear(&s, u0, u1, dt, cfg, opts.physics, opts.cfl)?;
        if opts.physics == Physics::Nonlinear {
            let r = compression_ratio(&next, cfg);
            if r > opts.shock_ratio {
                return Err(Error::Shock { t: t.as_f64(), ratio: r.as_f64() });
            }
        }
        let eta_mid = T::lit(0.5) * (s.eta + next.eta);
        work.push(work[k - 1] + dt * T::lit(0.5) * (u0 + u1) * eta_mid);
        s = next;
        let v = s.volume(cfg);
        max_defect = max_defect.max(((v - v0) / v0).abs());
        times.push(t);
        controls.push(u1);
        energy.push(s.energy(cfg, opts.physics)?);
        volume.push(v);
        if (opts.snapshot_every > 0 && k % opts.snapshot_every == 0) || k == n {
            snapshots.push((k, s.clone()));
        }
    }
    Ok(NonlinearTrajectory {
        physics: opts.physics,
        dt,
        times,
        controls,
        energy,
        work,
        volume,
        max_volume_defect: max_defect,
        snapshots,
        final_state: s,
    })
}
