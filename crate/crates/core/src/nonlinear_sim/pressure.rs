use serde::{Deserialize, Serialize};

use super::solver::{rhs, NonlinearState, Physics};
use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::model::PhysicalConfig;
use crate::scalar::Real;

/// Interior pressure sampled on a uniform grid over [-l, l].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PressureProfile<T> {
    pub x: Vec<T>,
    /// Hydrodynamic pressure Pi_i = P_i + rho g zeta_i.
    pub pi: Vec<T>,
    /// Surface pressure P_i under the object.
    pub p: Vec<T>,
    pub delta_ddot: T,
    /// Trapezoid integral of P_i.
    pub force: T,
    /// int P_i + u - m g - m delta''.
    pub newton_residual: T,
}

/// Solves the interior elliptic problem for Pi_i with `intervals` uniform
/// intervals, using the heave acceleration from the object ODE.
pub fn reconstruct_interior_pressure<T: Real>(
    s: &NonlinearState<T>,
    u: T,
    cfg: &PhysicalConfig<T>,
    intervals: usize,
) -> Result<PressureProfile<T>> {
    if intervals < 2 {
        return Err(Error::Argument("pressure reconstruction needs at least 2 intervals".into()));
    }
    let (d, _) = rhs(s, u, cfg, Physics::Nonlinear)?;
    let delta_ddot = d.eta;
    pressure_with_accel(s, u, delta_ddot, cfg, intervals)
}

/// As [`reconstruct_interior_pressure`] with a supplied acceleration.
pub fn pressure_with_accel<T: Real>(
    s: &NonlinearState<T>,
    u: T,
    delta_ddot: T,
    cfg: &PhysicalConfig<T>,
    intervals: usize,
) -> Result<PressureProfile<T>> {
    let (rho, g, l) = (cfg.rho, cfg.g, cfg.l);
    let half = T::lit(0.5);
    let n = intervals;
    let dx = (l + l) / T::from_count(n);
    let x: Vec<T> = (0..=n).map(|i| -l + dx * T::from_count(i)).collect();
    let hw: Vec<T> = x.iter().map(|&xi| cfg.h_eq_at(xi) + s.delta).collect();
    if let Some(&m) = hw.iter().min_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)) {
        if !(m > T::zero()) {
            return Err(Error::Touchdown(m.as_f64()));
        }
    }
    let qi: Vec<T> = x.iter().map(|&xi| s.q_i_avg - xi * s.eta).collect();
    let flux: Vec<T> = qi.iter().zip(&hw).map(|(&q, &h)| q * q / h).collect();
    let bern = |q: T, h: T| half * rho * q * q / (h * h);
    let hm = s.h_left[s.h_left.len() - 1];
    let hp = s.h_right[0];
    let (qm, qp) = (s.q_i_avg + l * s.eta, s.q_i_avg - l * s.eta);
    let pi_left = rho * g * (hm - cfg.h0) + bern(qm, hm) - bern(qi[0], hw[0]);
    let pi_right = rho * g * (hp - cfg.h0) + bern(qp, hp) - bern(qi[n], hw[n]);
    let k_mid = |i: usize| {
        let xm = x[i] + half * dx;
        (cfg.h_eq_at(xm) + s.delta) / rho
    };
    let m = n - 1;
    let mut sub = vec![T::zero(); m];
    let mut diag = vec![T::zero(); m];
    let mut sup = vec![T::zero(); m];
    let mut b = vec![T::zero(); m];
    let dx2 = dx * dx;
    for r in 0..m {
        let i = r + 1;
        let (kl, kr) = (k_mid(i - 1), k_mid(i));
        let f_second = (flux[i + 1] - flux[i] - flux[i] + flux[i - 1]) / dx2;
        diag[r] = (kl + kr) / dx2;
        b[r] = -delta_ddot + f_second;
        if r > 0 {
            sub[r] = -kl / dx2;
        } else {
            b[r] = b[r] + kl / dx2 * pi_left;
        }
        if r + 1 < m {
            sup[r] = -kr / dx2;
        } else {
            b[r] = b[r] + kr / dx2 * pi_right;
        }
    }
    let inner = solve_tridiagonal(&sub, &diag, &sup, &b)?;
    let mut pi = Vec::with_capacity(n + 1);
    pi.push(pi_left);
    pi.extend(inner);
    pi.push(pi_right);
    let p: Vec<T> = pi.iter().zip(&hw).map(|(&v, &h)| v - rho * g * (h - cfg.h0)).collect();
    let force = (p[1..n].iter().copied().sum::<T>() + half * (p[0] + p[n])) * dx;
    let newton_residual = force + u - cfg.m * g - cfg.m * delta_ddot;
    Ok(PressureProfile { x, pi, p, delta_ddot, force, newton_residual })
}
