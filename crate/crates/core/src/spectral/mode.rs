use serde::{Deserialize, Serialize};

use super::characteristic::{branch_system, char_residual_terms, fg, Branch};
use crate::error::{Error, Result};
use crate::linalg::smallest_singular_value_2x2;
use crate::model::{Grid, PhysicalConfig, State};
use crate::quadrature::integrate_from;
use crate::scalar::Real;

/// Agreement required between closed-form and quadrature normalization.
pub const NORM_TOL: f64 = 1e-6;
/// Relative residual below which an assembled frequency counts as a root.
pub const ASSEMBLE_TOL: f64 = 1e-8;
/// Relative smallest singular value below which the branch system is rank 1.
const RANK_TOL: f64 = 1e-6;

/// One eigenpair i*omega of the generator in closed form.
///
/// The eigenvector has real discharge part `psi`, `c`, `b` and purely
/// imaginary elevation part `phi = i * phi_imag` and `a = i * a_imag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode<T> {
    pub omega: T,
    pub k_index: i64,
    pub branch: Branch,
    pub k1: T,
    pub k2: T,
    /// Normalization from the closed-form norm.
    pub gamma: T,
    /// Normalization from quadrature of the sampled norm.
    pub gamma_quadrature: T,
    pub c: T,
    pub a_imag: T,
    pub b: T,
    wave_speed: T,
    l: T,
    big_l: T,
    l_prime: T,
}

impl<T: Real> Mode<T> {
    fn from_branch_constants(omega: T, k1: T, k2: T, branch: Branch, cfg: &PhysicalConfig<T>) -> Self {
        let two = T::lit(2.0);
        let (f_l, _) = fg(omega, cfg.big_l, cfg);
        let (f_lp, _) = fg(omega, cfg.l_prime, cfg);
        let (psi_m, psi_p) = (k1 * f_l, k2 * f_lp);
        Mode {
            omega,
            k_index: 0,
            branch,
            k1,
            k2,
            gamma: T::one(),
            gamma_quadrature: T::one(),
            c: (psi_p + psi_m) / two,
            a_imag: (psi_p - psi_m) / (two * omega * cfg.l),
            b: -(psi_p - psi_m) / (two * cfg.l),
            wave_speed: cfg.wave_speed(),
            l: cfg.l,
            big_l: cfg.big_l,
            l_prime: cfg.l_prime,
        }
    }

    /// Unnormalized discharge component.
    pub fn psi(&self, x: T) -> T {
        let c = self.wave_speed;
        if x <= -self.l {
            self.k1 * (self.omega * (self.big_l + x) / c).sin()
        } else {
            self.k2 * (self.omega * (self.l_prime - x) / c).sin()
        }
    }

    /// Imaginary part of the unnormalized elevation component.
    pub fn phi_imag(&self, x: T) -> T {
        let c = self.wave_speed;
        if x <= -self.l {
            self.k1 / c * (self.omega * (self.big_l + x) / c).cos()
        } else {
            -self.k2 / c * (self.omega * (self.l_prime - x) / c).cos()
        }
    }

    /// B* of the normalized mode: gamma * b / 2.
    pub fn authority(&self) -> T {
        (self.gamma * self.b / T::lit(2.0)).abs()
    }

    /// Copy with the normalization multiplied by `s` (s = 0 gives the zero vector).
    pub fn scaled(&self, s: T) -> Self {
        Self { gamma: self.gamma * s, gamma_quadrature: self.gamma_quadrature * s, ..self.clone() }
    }

    /// Normalized mode on a grid as real and imaginary states; the
    /// imaginary part is projected onto the discrete volume constraint.
    pub fn sample(&self, grid: Grid<T>) -> (State<T>, State<T>) {
        let g = self.gamma;
        let re = State::from_fields(grid, |_| T::zero(), |x| g * self.psi(x), g * self.c, T::zero(), g * self.b);
        let im = State::from_fields(grid, |x| g * self.phi_imag(x), |_| T::zero(), T::zero(), g * self.a_imag, T::zero())
            .project_volume();
        (re, im)
    }

    /// Squared norm of the unnormalized mode by adaptive quadrature of the
    /// closed-form fields.
    pub fn norm_sq_quadrature(&self, cfg: &PhysicalConfig<T>) -> Result<T> {
        let two = T::lit(2.0);
        let tol = T::lit(1e-12);
        let mut fluid = T::zero();
        for (a, b) in [(-cfg.big_l, -cfg.l), (cfg.l, cfg.l_prime)] {
            // eight panels per half wavelength of the squared fields
            let waves = (self.omega * (b - a) / (self.wave_speed * T::PI())).ceil().to_usize().unwrap_or(1);
            let panels = 8 * waves.max(1);
            let zeta = integrate_from(|x| self.phi_imag(x).powi(2), a, b, tol, panels)?.value;
            let q = integrate_from(|x| self.psi(x).powi(2), a, b, tol, panels)?.value;
            fluid = fluid + cfg.rho * cfg.g / two * zeta + cfg.rho / (two * cfg.h0) * q;
        }
        Ok(fluid
            + cfg.rho * cfg.l * cfg.alpha_bar * self.c * self.c
            + cfg.rho * cfg.g * cfg.l * self.a_imag * self.a_imag
            + cfg.m_bar / two * self.b * self.b)
    }

    /// Squared norm of the unnormalized mode in closed form.
    pub fn norm_sq_closed(&self, cfg: &PhysicalConfig<T>) -> T {
        let (two, four) = (T::lit(2.0), T::lit(4.0));
        let (rho, g, l, w) = (cfg.rho, cfg.g, cfg.l, self.omega);
        let (f_l, _) = fg(w, cfg.big_l, cfg);
        let (f_lp, _) = fg(w, cfg.l_prime, cfg);
        match self.branch {
            Branch::Symmetric => {
                let k = self.k1;
                (cfg.m_bar / (two * l * l) + rho * g / (w * w * l)) * k * k * f_l * f_l + rho / cfg.h0 * k * k * (cfg.big_l - l)
            }
            Branch::General => {
                let (k1, k2) = (self.k1, self.k2);
                let la = rho * l * cfg.alpha_bar;
                let sq = la / four + cfg.m_bar / (T::lit(8.0) * l * l) + rho * g / (four * w * w * l);
                let cross = la / two - cfg.m_bar / (four * l * l) - rho * g / (two * w * w * l);
                sq * (k2 * k2 * f_lp * f_lp + k1 * k1 * f_l * f_l)
                    + cross * k1 * k2 * f_l * f_lp
                    + rho / (two * cfg.h0) * (k1 * k1 * (cfg.big_l - l) + k2 * k2 * (cfg.l_prime - l))
            }
        }
    }

    fn normalize(mut self, cfg: &PhysicalConfig<T>) -> Result<Self> {
        let closed = self.norm_sq_closed(cfg);
        let quad = self.norm_sq_quadrature(cfg)?;
        if !(closed > T::zero()) || ((closed - quad) / closed).abs() > T::lit(NORM_TOL) {
            return Err(Error::Normalization { closed: closed.as_f64(), quadrature: quad.as_f64() });
        }
        self.gamma = T::one() / closed.sqrt();
        self.gamma_quadrature = T::one() / quad.sqrt();
        Ok(self)
    }
}

/// Symmetric-branch mode at `omega` without checking that it is a root.
pub fn symmetric_mode_unchecked<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> Result<Mode<T>> {
    cfg.require_symmetric()?;
    if omega == T::zero() {
        return Err(Error::ZeroFrequency);
    }
    Mode::from_branch_constants(omega, T::one(), -T::one(), Branch::Symmetric, cfg).normalize(cfg)
}

/// Builds and normalizes the eigenvector for a root `omega`.
pub fn assemble_mode<T: Real>(omega: T, cfg: &PhysicalConfig<T>, branch: Branch) -> Result<Mode<T>> {
    if omega == T::zero() {
        return Err(Error::ZeroFrequency);
    }
    let r = char_residual_terms(omega, cfg, branch)?;
    match branch {
        Branch::Symmetric => {
            if r.value.abs() > T::lit(ASSEMBLE_TOL) * r.scale {
                return Err(Error::NotARoot { omega: omega.as_f64() });
            }
            symmetric_mode_unchecked(omega, cfg)
        }
        Branch::General => {
            let (k1, k2) = null_vector(omega, cfg)?;
            Mode::from_branch_constants(omega, k1, k2, Branch::General, cfg).normalize(cfg)
        }
    }
}

/// Null vector of the branch system, taken from the row of larger norm
/// after scaling each row by its largest entry magnitude.
fn null_vector<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> Result<(T, T)> {
    let m = branch_system(omega, cfg);
    let (f_l, g_l) = fg(omega, cfg.big_l, cfg);
    let (f_lp, g_lp) = fg(omega, cfg.l_prime, cfg);
    let (s, p, q) = super::characteristic::pq(omega, cfg);
    let a = s / (cfg.l * cfg.alpha_bar * omega);
    let scale0 = [a * g_l, f_l, a * g_lp, f_lp].iter().fold(T::zero(), |x, v| x.max(v.abs()));
    let scale1 = [q * g_l, p * f_l, p * f_lp, q * g_lp].iter().fold(T::zero(), |x, v| x.max(v.abs()));
    let rows: Vec<[T; 2]> = [(m[0], scale0), (m[1], scale1)]
        .iter()
        .map(|(r, s)| if *s > T::zero() { [r[0] / *s, r[1] / *s] } else { [T::zero(), T::zero()] })
        .collect();
    let n0 = rows[0][0].hypot(rows[0][1]);
    let n1 = rows[1][0].hypot(rows[1][1]);
    let big = n0.max(n1);
    if big <= T::lit(RANK_TOL) {
        return Err(Error::DoubleEigenvalue { omega: omega.as_f64() });
    }
    let smin = smallest_singular_value_2x2(rows[0][0], rows[0][1], rows[1][0], rows[1][1]);
    if smin > T::lit(RANK_TOL) * big {
        return Err(Error::NotARoot { omega: omega.as_f64() });
    }
    let r = if n0 >= n1 { rows[0] } else { rows[1] };
    let (mut k1, mut k2) = (r[1], -r[0]);
    let norm = k1.abs().max(k2.abs());
    k1 = k1 / norm;
    k2 = k2 / norm;
    let lead = if k1.abs() >= k2.abs() { k1 } else { k2 };
    if lead < T::zero() {
        k1 = -k1;
        k2 = -k2;
    }
    Ok((k1, k2))
}

/// Finds the first `count` roots and assembles their modes.
pub fn compute_modes<T: Real>(cfg: &PhysicalConfig<T>, count: usize, branch: Branch) -> Result<Vec<Mode<T>>> {
    use rayon::prelude::*;
    let roots = super::roots::find_eigenvalues(cfg, count, branch)?;
    roots
        .omegas
        .par_iter()
        .enumerate()
        .map(|(i, &w)| {
            let mut m = assemble_mode(w, cfg, branch)?;
            m.k_index = i as i64 + 1;
            Ok(m)
        })
        .collect()
}

/// Left and right boundary values psi(-l), psi(l) of the normalized mode.
pub fn interface_values<T: Real>(mode: &Mode<T>) -> (T, T) {
    (mode.gamma * mode.psi(-mode.l), mode.gamma * mode.psi(mode.l))
}
