use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linear_sim::{simulate_closed_loop, DiscreteGenerator, SimOptions, Trajectory};
use crate::model::{antisymmetric_norm, norm, State};
use crate::scalar::Real;

/// Relative antisymmetric content tolerated in a symmetric initial state.
pub const SYMMETRY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct StabilizeOptions<T> {
    pub dt: Option<T>,
    pub require_symmetric: bool,
    /// Keep every n-th norm sample in the report (1 keeps all).
    pub record_every: usize,
}

impl<T: Real> Default for StabilizeOptions<T> {
    fn default() -> Self {
        Self { dt: None, require_symmetric: true, record_every: 100 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayReport<T> {
    pub times: Vec<T>,
    pub norms: Vec<T>,
    /// p in ||z(t)|| ~ (1+t)^{-p}, fitted over the second half of the run.
    pub exponent: T,
    pub monotone: bool,
    /// Largest relative increase of the squared norm between steps.
    pub max_increase: T,
    pub initial_norm: T,
    pub final_norm: T,
}

/// Closed-loop run with the collocated feedback u = -B*z.
pub fn stabilize<T: Real>(
    z0: &State<T>,
    t_final: T,
    gen: &DiscreteGenerator<T>,
    opts: StabilizeOptions<T>,
) -> Result<(Trajectory<T>, DecayReport<T>)> {
    let cfg = &gen.cfg;
    if opts.require_symmetric && gen.grid.is_mirror() {
        let a = antisymmetric_norm(z0, cfg)?;
        let n = norm(z0, cfg);
        if a > T::lit(SYMMETRY_TOL) * n {
            return Err(Error::NotSymmetric(a.as_f64()));
        }
    }
    let dt = opts.dt.unwrap_or_else(|| crate::linear_sim::default_dt(gen));
    let traj = simulate_closed_loop(z0, t_final, gen, SimOptions { dt, snapshot_every: 0 })?;
    let mut max_increase = T::zero();
    for w in traj.energy.windows(2) {
        if w[0] > T::zero() {
            max_increase = max_increase.max((w[1] - w[0]) / w[0]);
        }
    }
    let monotone = max_increase <= T::lit(1e-12);
    let all_norms = traj.norms();
    let exponent = fit_decay_exponent(&traj.times, &all_norms);
    let every = opts.record_every.max(1);
    let last = traj.times.len() - 1;
    let keep = |i: &usize| i % every == 0 || *i == last;
    let times = (0..=last).filter(keep).map(|i| traj.times[i]).collect();
    let norms = (0..=last).filter(keep).map(|i| all_norms[i]).collect();
    let report =
        DecayReport { times, norms, exponent, monotone, max_increase, initial_norm: all_norms[0], final_norm: all_norms[last] };
    Ok((traj, report))
}

/// Least-squares slope of log||z|| against log(1+t) over t >= t_end/2,
/// returned with the sign flipped. Zero norms give 0.
pub fn fit_decay_exponent<T: Real>(times: &[T], norms: &[T]) -> T {
    let t_end = match times.last() {
        Some(&t) => t,
        None => return T::zero(),
    };
    let half = t_end / T::lit(2.0);
    let pts: Vec<(T, T)> = times
        .iter()
        .zip(norms)
        .filter(|(&t, &n)| t >= half && n > T::zero())
        .map(|(&t, &n)| ((T::one() + t).ln(), n.ln()))
        .collect();
    if pts.len() < 2 {
        return T::zero();
    }
    let m = T::from_count(pts.len());
    let (sx, sy) = pts.iter().fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + *x, b + *y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) =
        pts.iter().fold((T::zero(), T::zero()), |(a, b), (x, y)| (a + (*x - mx) * (*y - my), b + (*x - mx) * (*x - mx)));
    if sxx == T::zero() {
        T::zero()
    } else {
        -sxy / sxx
    }
}
