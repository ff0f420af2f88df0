use serde::{Deserialize, Serialize};

use super::generator::DiscreteGenerator;
use crate::control::ControlSignal;
use crate::error::{Error, Result};
use crate::linalg::{BandLu, BandMatrix};
use crate::model::State;
use crate::scalar::Real;

/// Implicit midpoint (Crank-Nicolson) stepper for a fixed step size. With
/// `closed_loop` the feedback u = -B*z is folded into the implicit system.
#[derive(Debug, Clone)]
pub struct CnStepper<'a, T> {
    pub gen: &'a DiscreteGenerator<T>,
    pub dt: T,
    pub closed_loop: bool,
    explicit: BandMatrix<T>,
    lu: BandLu<T>,
}

impl<'a, T: Real> CnStepper<'a, T> {
    pub fn new(gen: &'a DiscreteGenerator<T>, dt: T, closed_loop: bool) -> Result<Self> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::TimeStep(dt.as_f64()));
        }
        let half = dt * T::lit(0.5);
        let mut k = gen.skew_matrix().clone();
        if closed_loop {
            // W B B^* = (1/2)(1/2) on the eta diagonal
            let e = gen.layout().eta();
            k.add(e, e, -T::lit(0.25));
        }
        let explicit = gen.weight_matrix().combine(T::one(), &k, half);
        let implicit = gen.weight_matrix().combine(T::one(), &k, -half);
        let lu = implicit.factor()?;
        Ok(Self { gen, dt, closed_loop, explicit, lu })
    }

    /// One step with input samples `u0` at t_n and `u1` at t_{n+1}
    /// (ignored in closed loop).
    pub fn step(&self, z: &State<T>, u0: T, u1: T) -> Result<State<T>> {
        let v = self.gen.pack(z)?;
        Ok(self.gen.unpack(&self.step_packed(&v, u0, u1)))
    }

    pub fn step_packed(&self, v: &[T], u0: T, u1: T) -> Vec<T> {
        let mut rhs = self.explicit.matvec(v);
        if !self.closed_loop {
            let e = self.gen.layout().eta();
            rhs[e] = rhs[e] + self.dt * (u0 + u1) * T::lit(0.25);
        }
        self.lu.solve(&rhs)
    }
}

/// Single implicit-midpoint step (factorizes each call; use [`CnStepper`]
/// in loops).
pub fn step<T: Real>(z: &State<T>, u0: T, u1: T, dt: T, gen: &DiscreteGenerator<T>) -> Result<State<T>> {
    CnStepper::new(gen, dt, false)?.step(z, u0, u1)
}

/// Time history with the energy ledger.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory<T> {
    pub dt: T,
    pub times: Vec<T>,
    /// Applied input at each time level.
    pub controls: Vec<T>,
    /// Variable part of the energy (squared X-norm) at each time level.
    pub energy: Vec<T>,
    /// Cumulative work of the input, midpoint rule sum of u * eta * dt.
    pub work: Vec<T>,
    pub energy_offset: T,
    /// (time level, state) pairs.
    pub snapshots: Vec<(usize, State<T>)>,
    pub final_state: State<T>,
    pub max_balance_error: T,
    pub max_volume_defect: T,
}

impl<T: Real> Trajectory<T> {
    pub fn norms(&self) -> Vec<T> {
        self.energy.iter().map(|e| e.max(T::zero()).sqrt()).collect()
    }
}

/// Simulation options.
#[derive(Debug, Clone, Copy)]
pub struct SimOptions<T> {
    pub dt: T,
    /// Keep every `snapshot_every`-th state (0 keeps only the endpoints).
    pub snapshot_every: usize,
}

impl<T: Real> SimOptions<T> {
    /// dt = 0.2 h / sqrt(g h0) on the finer side.
    pub fn default_for(gen: &DiscreteGenerator<T>) -> Self {
        Self { dt: default_dt(gen), snapshot_every: 0 }
    }
}

pub fn default_dt<T: Real>(gen: &DiscreteGenerator<T>) -> T {
    use crate::model::Side;
    let h = gen.grid.spacing(Side::Left).min(gen.grid.spacing(Side::Right));
    T::lit(0.2) * h / gen.cfg.wave_speed()
}

fn steps_for<T: Real>(t_final: T, dt: T) -> Result<(usize, T)> {
    if !(dt > T::zero()) {
        return Err(Error::TimeStep(dt.as_f64()));
    }
    if t_final < T::zero() {
        return Err(Error::Argument("final time must be non-negative".into()));
    }
    let n = (t_final / dt - T::lit(1e-9)).ceil().to_usize().unwrap_or(0).max(1);
    Ok((n, t_final / T::from_count(n)))
}

/// Integrates `dz/dt = A_h z + B u` from `z0` over [0, t_final].
pub fn simulate<T: Real>(
    z0: &State<T>,
    u: &ControlSignal<T>,
    t_final: T,
    gen: &DiscreteGenerator<T>,
    opts: SimOptions<T>,
) -> Result<Trajectory<T>> {
    let (n, dt) = steps_for(t_final, opts.dt)?;
    let stepper = CnStepper::new(gen, dt, false)?;
    run(z0, &stepper, n, opts.snapshot_every, |t| u.eval(t))
}

/// Closed-loop run with u = -B*z.
pub fn simulate_closed_loop<T: Real>(
    z0: &State<T>,
    t_final: T,
    gen: &DiscreteGenerator<T>,
    opts: SimOptions<T>,
) -> Result<Trajectory<T>> {
    let (n, dt) = steps_for(t_final, opts.dt)?;
    let stepper = CnStepper::new(gen, dt, true)?;
    run(z0, &stepper, n, opts.snapshot_every, |_| T::zero())
}

fn run<T: Real>(z0: &State<T>, stepper: &CnStepper<'_, T>, n: usize, every: usize, u: impl Fn(T) -> T) -> Result<Trajectory<T>> {
    let gen = stepper.gen;
    let cfg = &gen.cfg;
    let dt = stepper.dt;
    let eta_ix = gen.layout().eta();
    let w = gen.weight_matrix();
    let energy_of = |v: &[T]| v.iter().zip(w.matvec(v)).map(|(&a, b)| a * b).sum::<T>();
    let mut v = gen.pack(z0)?;
    let control_at = |v: &[T], t: T| {
        if stepper.closed_loop {
            -v[eta_ix] * T::lit(0.5)
        } else {
            u(t)
        }
    };
    let mut times = Vec::with_capacity(n + 1);
    let mut controls = Vec::with_capacity(n + 1);
    let mut energy = Vec::with_capacity(n + 1);
    let mut work = Vec::with_capacity(n + 1);
    let mut snapshots = vec![(0, z0.clone())];
    times.push(T::zero());
    controls.push(control_at(&v, T::zero()));
    energy.push(energy_of(&v));
    work.push(T::zero());
    let mut max_balance = T::zero();
    let mut max_volume = z0.volume_defect();
    for step in 1..=n {
        let t = dt * T::from_count(step);
        let u0 = controls[step - 1];
        let u1 = if stepper.closed_loop { T::zero() } else { u(t) };
        let next = stepper.step_packed(&v, u0, u1);
        let u1 = if stepper.closed_loop { -next[eta_ix] * T::lit(0.5) } else { u1 };
        let eta_mid = (v[eta_ix] + next[eta_ix]) * T::lit(0.5);
        let wk = work[step - 1] + dt * (u0 + u1) * T::lit(0.5) * eta_mid;
        v = next;
        let e = energy_of(&v);
        if !e.is_finite() {
            return Err(Error::NonFinite(format!("energy at step {step}")));
        }
        max_balance = max_balance.max((e - energy[0] - wk).abs());
        times.push(t);
        controls.push(u1);
        energy.push(e);
        work.push(wk);
        if (every > 0 && step % every == 0) || step == n {
            let z = gen.unpack(&v);
            max_volume = max_volume.max(z.volume_defect());
            snapshots.push((step, z));
        }
    }
    let final_state = snapshots.last().map(|s| s.1.clone()).unwrap_or_else(|| z0.clone());
    Ok(Trajectory {
        dt,
        times,
        controls,
        energy,
        work,
        energy_offset: cfg.energy_offset,
        snapshots,
        final_state,
        max_balance_error: max_balance,
        max_volume_defect: max_volume,
    })
}

/// Classical RK4 step of `dz/dt = A_h z + B u`, for cross-checking only.
pub fn rk4_step<T: Real>(z: &State<T>, u0: T, u1: T, dt: T, gen: &DiscreteGenerator<T>) -> Result<State<T>> {
    let half = dt * T::lit(0.5);
    let um = (u0 + u1) * T::lit(0.5);
    let k1 = gen.apply_forced(z, u0)?;
    let k2 = gen.apply_forced(&z.add_scaled(half, &k1)?, um)?;
    let k3 = gen.apply_forced(&z.add_scaled(half, &k2)?, um)?;
    let k4 = gen.apply_forced(&z.add_scaled(dt, &k3)?, u1)?;
    let sixth = dt / T::lit(6.0);
    z.add_scaled(sixth, &k1)?.add_scaled(sixth + sixth, &k2)?.add_scaled(sixth + sixth, &k3)?.add_scaled(sixth, &k4)
}
