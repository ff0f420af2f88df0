use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::gramian::{cos_integral, sin_integral};
use super::signal::ControlSignal;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::linear_sim::{default_dt, simulate, DiscreteGenerator, ModeSet, SimOptions};
use crate::model::{antisymmetric_norm, norm, project_symmetric, Side, State};
use crate::scalar::Real;
use crate::spectral::{compute_modes, Branch};

/// Default truncation level.
pub const DEFAULT_MODES: usize = 8;
/// Default Gram condition-number limit.
pub const DEFAULT_COND_LIMIT: f64 = 1e12;

/// Discrete test for membership of a target in the smoother space W:
/// extrapolated discharge traces must match the wall and transmission
/// conditions, and neighbouring samples may not jump by more than a
/// fraction of the field amplitude.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WCheck<T> {
    pub trace: T,
    pub smooth: T,
}

impl<T: Real> Default for WCheck<T> {
    fn default() -> Self {
        Self { trace: T::lit(0.05), smooth: T::lit(0.25) }
    }
}

impl<T: Real> WCheck<T> {
    pub fn check(&self, z: &State<T>) -> Result<()> {
        if !z.satisfies_volume() {
            return Err(Error::TargetNotInW(format!("volume defect {:e}", z.volume_defect().as_f64())));
        }
        let l = z.grid.l;
        let edge = |q: &[T], at_end: bool| {
            let n = q.len();
            if at_end {
                (T::lit(3.0) * q[n - 1] - q[n - 2]) / T::lit(2.0)
            } else {
                (T::lit(3.0) * q[0] - q[1]) / T::lit(2.0)
            }
        };
        let checks = [
            ("left wall", edge(&z.q_left, false), T::zero()),
            ("left interface", edge(&z.q_left, true), z.q_i_avg + l * z.eta),
            ("right interface", edge(&z.q_right, false), z.q_i_avg - l * z.eta),
            ("right wall", edge(&z.q_right, true), T::zero()),
        ];
        let qmax = z.q_left.iter().chain(&z.q_right).fold(T::zero(), |m, v| m.max(v.abs()));
        let scale = qmax.max(z.q_i_avg.abs() + l * z.eta.abs());
        if scale > T::zero() {
            for (name, got, want) in checks {
                if (got - want).abs() > self.trace * scale {
                    return Err(Error::TargetNotInW(format!(
                        "{name} discharge trace {:e} violates the boundary value {:e}",
                        got.as_f64(),
                        want.as_f64()
                    )));
                }
            }
        }
        for side in [Side::Left, Side::Right] {
            for (name, v) in [("zeta", z.zeta(side)), ("q", z.q(side))] {
                let amp = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
                let jump = v.windows(2).fold(T::zero(), |m, w| m.max((w[1] - w[0]).abs()));
                if amp > T::zero() && jump > self.smooth * amp {
                    return Err(Error::TargetNotInW(format!(
                        "{name} varies by {:.3} of its amplitude between neighbouring samples",
                        (jump / amp).as_f64()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `int_0^tau e^{i w (tau - s)} u(s) ds` for the piecewise-linear `u`.
pub fn modal_response<T: Real>(u: &ControlSignal<T>, tau: T, omega: T) -> Complex<T> {
    let dt = u.dt;
    let steps = (tau / dt).round().to_usize().unwrap_or(0);
    let theta = omega * dt;
    let (j0, j1) = segment_kernels(theta);
    let mut acc = Complex::new(T::zero(), T::zero());
    for n in 0..steps {
        let s0 = dt * T::from_count(n);
        let u0 = u.eval(s0);
        let u1 = u.eval(s0 + dt);
        let phase = Complex::from_polar(T::one(), omega * (tau - s0));
        acc = acc + phase * (j0 * u0 + j1 * (u1 - u0)) * dt;
    }
    acc
}

/// `int_0^1 e^{-i theta x} dx` and `int_0^1 x e^{-i theta x} dx`.
fn segment_kernels<T: Real>(theta: T) -> (Complex<T>, Complex<T>) {
    let mi = Complex::new(T::zero(), -theta);
    if theta.abs() < T::lit(0.5) {
        let (mut j0, mut j1) = (Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()));
        let mut term = Complex::new(T::one(), T::zero());
        for n in 0..24 {
            let nf = T::from_count(n);
            j0 = j0 + term / (nf + T::one());
            j1 = j1 + term / (nf + T::lit(2.0));
            term = term * mi / (nf + T::one());
        }
        (j0, j1)
    } else {
        let e = Complex::from_polar(T::one(), -theta);
        let i = Complex::new(T::zero(), T::one());
        let j0 = (Complex::new(T::one(), T::zero()) - e) / (i * theta);
        let j1 = (e * (Complex::new(T::one(), T::zero()) + i * theta) - Complex::new(T::one(), T::zero())) / (theta * theta);
        (j0, j1)
    }
}

/// Truncated moment problem in real form: find the minimal L2 input with
/// `b_k int_0^tau e^{i w_k (tau - s)} u(s) ds = d_k` for the included modes.
#[derive(Debug, Clone)]
pub struct MomentProblem<T> {
    pub tau: T,
    pub omegas: Vec<T>,
    pub couplings: Vec<T>,
    pub d: Vec<Complex<T>>,
    gram: SquareMatrix<T>,
}

impl<T: Real> MomentProblem<T> {
    pub fn new(tau: T, omegas: Vec<T>, couplings: Vec<T>, d: Vec<Complex<T>>) -> Result<Self> {
        if omegas.len() != couplings.len() || omegas.len() != d.len() {
            return Err(Error::Argument("moment problem data differ in length".into()));
        }
        let n = omegas.len();
        let half = T::lit(0.5);
        let mut gram = SquareMatrix::zeros(2 * n);
        for j in 0..n {
            for k in 0..n {
                let (a, b) = (omegas[j], omegas[k]);
                let bb = couplings[j] * couplings[k];
                let cc = half * (cos_integral(a - b, tau) + cos_integral(a + b, tau));
                let ss = half * (cos_integral(a - b, tau) - cos_integral(a + b, tau));
                // cos(a r) sin(b r)
                let cs = half * (sin_integral(a + b, tau) - sin_integral(a - b, tau));
                gram.set(j, k, bb * cc);
                gram.set(n + j, n + k, bb * ss);
                gram.set(j, n + k, bb * cs);
                gram.set(n + k, j, bb * cs);
            }
        }
        Ok(Self { tau, omegas, couplings, d, gram })
    }

    pub fn gram(&self) -> &SquareMatrix<T> {
        &self.gram
    }

    /// Ratio of extreme Gram eigenvalues (infinite if not positive definite).
    pub fn condition(&self) -> T {
        let ev = self.gram.symmetric_eigenvalues();
        match (ev.first(), ev.last()) {
            (Some(&lo), Some(&hi)) if lo > T::zero() => hi / lo,
            (Some(_), Some(_)) => T::infinity(),
            _ => T::one(),
        }
    }

    /// Multipliers of the basis functions `b_k cos(w_k r)`, `b_k sin(w_k r)`.
    pub fn solve(&self) -> Result<Vec<T>> {
        let n = self.omegas.len();
        let mut rhs = vec![T::zero(); 2 * n];
        for k in 0..n {
            rhs[k] = self.d[k].re;
            rhs[n + k] = self.d[k].im;
        }
        if n == 0 || rhs.iter().all(|v| *v == T::zero()) {
            return Ok(vec![T::zero(); 2 * n]);
        }
        Ok(self.gram.cholesky()?.cholesky_solve(&rhs))
    }

    /// Minimal-norm input at time `s` for multipliers `lambda`.
    pub fn control_at(&self, lambda: &[T], s: T) -> T {
        let n = self.omegas.len();
        let r = self.tau - s;
        (0..n)
            .map(|k| {
                let ph = self.omegas[k] * r;
                self.couplings[k] * (lambda[k] * ph.cos() + lambda[n + k] * ph.sin())
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SteerOptions<T> {
    pub modes: usize,
    pub cond_limit: T,
    /// Sampling step of the returned control; defaults to the simulation step.
    pub dt: Option<T>,
    pub w_check: WCheck<T>,
}

impl<T: Real> Default for SteerOptions<T> {
    fn default() -> Self {
        Self { modes: DEFAULT_MODES, cond_limit: T::lit(DEFAULT_COND_LIMIT), dt: None, w_check: WCheck::default() }
    }
}

/// Output of [`steer`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteerPlan<T> {
    pub control: ControlSignal<T>,
    pub tau: T,
    pub omegas: Vec<T>,
    pub couplings: Vec<T>,
    pub target_re: Vec<T>,
    pub target_im: Vec<T>,
    pub multipliers: Vec<T>,
    pub condition: T,
    /// X-norm of the target's symmetric part outside the included modes.
    pub modal_defect: T,
    pub target_norm: T,
    /// X-norm of the antisymmetric part of the target that was discarded.
    pub antisymmetric_dropped: T,
    /// Relative error of the sampled control in the included modes.
    pub modal_error: T,
}

/// Builds the symmetric mode set used for steering.
pub fn steering_modes<T: Real>(gen: &DiscreteGenerator<T>, count: usize) -> Result<ModeSet<T>> {
    gen.cfg.require_symmetric()?;
    let seeds = compute_modes(&gen.cfg, count, Branch::Symmetric)?;
    ModeSet::refine(gen, &seeds)
}

/// Open-loop control driving the rest state to `target` at time `tau`.
pub fn steer<T: Real>(target: &State<T>, tau: T, gen: &DiscreteGenerator<T>, opts: SteerOptions<T>) -> Result<SteerPlan<T>> {
    let cfg = &gen.cfg;
    cfg.require_symmetric()?;
    if !(tau > cfg.tau0) {
        return Err(Error::HorizonTooShort { tau: tau.as_f64(), tau0: cfg.tau0.as_f64() });
    }
    if opts.modes == 0 {
        return Err(Error::Argument("at least one mode is required".into()));
    }
    let modes = steering_modes(gen, opts.modes)?;
    steer_with_modes(target, tau, &modes, opts)
}

/// [`steer`] with a precomputed symmetric mode set.
pub fn steer_with_modes<T: Real>(target: &State<T>, tau: T, modes: &ModeSet<T>, opts: SteerOptions<T>) -> Result<SteerPlan<T>> {
    let gen = modes.generator();
    let cfg = &gen.cfg;
    cfg.require_symmetric()?;
    if !(tau > cfg.tau0) {
        return Err(Error::HorizonTooShort { tau: tau.as_f64(), tau0: cfg.tau0.as_f64() });
    }
    opts.w_check.check(target)?;
    let sym = project_symmetric(target)?;
    let antisymmetric_dropped = antisymmetric_norm(target, cfg)?;
    let target_norm = norm(target, cfg);
    if antisymmetric_dropped > T::lit(1e-10) * target_norm.max(T::min_positive_value()) {
        log::warn!(
            "target has an antisymmetric component of norm {:e}; it is not reachable from rest and is dropped",
            antisymmetric_dropped.as_f64()
        );
    }
    let n = opts.modes.min(modes.len());
    let d: Vec<Complex<T>> = modes.decompose(&sym)?.into_iter().take(n).collect();
    let omegas: Vec<T> = modes.omegas[..n].to_vec();
    let couplings: Vec<T> = (0..n).map(|k| modes.b_star(k)).collect();
    let modal_defect = norm(&sym.sub(&modes.synthesize(&d, T::zero())?)?, cfg);
    let problem = MomentProblem::new(tau, omegas.clone(), couplings.clone(), d.clone())?;
    let condition = problem.condition();
    if !(condition <= opts.cond_limit) {
        return Err(Error::IllConditioned { cond: condition.as_f64(), limit: opts.cond_limit.as_f64() });
    }
    let lambda = problem.solve()?;
    let dt0 = opts.dt.unwrap_or_else(|| default_dt(gen));
    let steps = (tau / dt0).ceil().to_usize().unwrap_or(1).max(1);
    let dt = tau / T::from_count(steps);
    let control = ControlSignal::from_fn(dt, steps, |s| problem.control_at(&lambda, s));
    let mut err = T::zero();
    let mut size = T::zero();
    for k in 0..n {
        let reached = modal_response(&control, tau, omegas[k]) * couplings[k];
        err = err + (reached - d[k]).norm_sqr();
        size = size + d[k].norm_sqr();
    }
    let modal_error = if size > T::zero() { (err / size).sqrt() } else { err.sqrt() };
    Ok(SteerPlan {
        control,
        tau,
        omegas,
        couplings,
        target_re: d.iter().map(|c| c.re).collect(),
        target_im: d.iter().map(|c| c.im).collect(),
        multipliers: lambda,
        condition,
        modal_defect,
        target_norm,
        antisymmetric_dropped,
        modal_error,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReachReport<T> {
    pub absolute: T,
    pub relative: T,
    /// |<z(tau) - target, phi_k>| for each mode of the set.
    pub per_mode: Vec<T>,
    pub antisymmetric_norm: T,
    pub final_state: State<T>,
}

/// Runs the grid simulation from rest under `u` and compares with `target`.
pub fn verify_reach<T: Real>(u: &ControlSignal<T>, target: &State<T>, tau: T, modes: &ModeSet<T>) -> Result<ReachReport<T>> {
    let gen = modes.generator();
    let z0 = State::zeros(gen.grid);
    let traj = simulate(&z0, u, tau, gen, SimOptions { dt: u.dt, snapshot_every: 0 })?;
    let zf = traj.final_state;
    let diff = zf.sub(target)?;
    let absolute = norm(&diff, &gen.cfg);
    let tn = norm(target, &gen.cfg);
    let relative = if tn > T::zero() { absolute / tn } else { absolute };
    let per_mode = modes.decompose(&diff)?.iter().map(|c| c.norm()).collect();
    let antisymmetric_norm = if gen.grid.is_mirror() { antisymmetric_norm(&zf, &gen.cfg)? } else { T::nan() };
    Ok(ReachReport { absolute, relative, per_mode, antisymmetric_norm, final_state: zf })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_kernels_agree_across_the_switch() {
        let closed = |theta: f64| {
            let e = Complex::from_polar(1.0, -theta);
            let i = Complex::new(0.0, 1.0);
            ((Complex::new(1.0, 0.0) - e) / (i * theta), (e * (1.0 + i * theta) - 1.0) / (theta * theta))
        };
        for theta in [0.49, 0.3, -0.2, 0.05] {
            let (a0, a1) = segment_kernels(theta);
            let (b0, b1) = closed(theta);
            assert!((a0 - b0).norm() < 1e-13 && (a1 - b1).norm() < 1e-12, "theta {theta}");
        }
        let (j0, j1) = segment_kernels(0.0f64);
        assert_eq!((j0.re, j1.re), (1.0, 0.5));
    }

    #[test]
    fn w_check_accepts_smooth_modes() {
        let cfg = crate::model::build_config(&crate::model::RawConfig::reference()).unwrap();
        let grid = crate::model::Grid::new(&cfg, 100).unwrap();
        let modes = compute_modes(&cfg, 3, Branch::Symmetric).unwrap();
        for m in &modes {
            WCheck::default().check(&m.sample(grid).0).unwrap();
        }
        let mut bumpy = modes[0].sample(grid).0;
        bumpy.zeta_right[50] += 1.0;
        assert!(WCheck::default().check(&bumpy.project_volume()).is_err());
    }
}
