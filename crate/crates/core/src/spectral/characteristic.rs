use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhysicalConfig;
use crate::scalar::Real;

/// Which eigenproblem: the full one or its mirror-symmetric restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    General,
    Symmetric,
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Branch::General),
            "symmetric" => Ok(Branch::Symmetric),
            other => Err(Error::Argument(format!("unknown branch `{other}`"))),
        }
    }
}

/// Residual value together with the magnitude of its largest term.
#[derive(Debug, Clone, Copy)]
pub struct Residual<T> {
    pub value: T,
    pub scale: T,
}

/// f(x) = sin(omega (x - l)/c) and g(x) = cos(omega (x - l)/c), c = sqrt(g h0).
pub fn fg<T: Real>(omega: T, x: T, cfg: &PhysicalConfig<T>) -> (T, T) {
    let arg = omega * (x - cfg.l) / cfg.wave_speed();
    arg.sin_cos()
}

/// Coefficients shared by both branches: s = sqrt(g/h0),
/// p = M omega^2 - 2 rho g l, q = 2 rho l^2 s omega.
pub(crate) fn pq<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> (T, T, T) {
    let two = T::lit(2.0);
    let s = (cfg.g / cfg.h0).sqrt();
    let p = cfg.m_bar * omega * omega - two * cfg.rho * cfg.g * cfg.l;
    let q = two * cfg.rho * cfg.l * cfg.l * s * omega;
    (s, p, q)
}

/// Full characteristic function evaluated in the printed form.
pub fn char_residual_general_terms<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> Result<Residual<T>> {
    if omega == T::zero() {
        return Err(Error::ZeroFrequency);
    }
    let two = T::lit(2.0);
    let (f_l, g_l) = fg(omega, cfg.big_l, cfg);
    let (f_lp, g_lp) = fg(omega, cfg.l_prime, cfg);
    let (s, p, _) = pq(omega, cfg);
    let la = cfg.l * cfg.alpha_bar;
    let t1 = -s * (two * cfg.rho * cfg.l * cfg.l * omega + p / (la * omega)) * (f_l * g_lp + f_lp * g_l);
    let t2 = two * p * f_l * f_lp;
    let t3 = T::lit(4.0) * cfg.rho * cfg.g * cfg.l / (cfg.h0 * cfg.alpha_bar) * g_l * g_lp;
    let scale = t1.abs().max(t2.abs()).max(t3.abs());
    Ok(Residual { value: t1 + t2 + t3, scale })
}

pub fn char_residual_general<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> Result<T> {
    char_residual_general_terms(omega, cfg).map(|r| r.value)
}

/// (M omega^2 - 2 rho g l) f(L) - sqrt(g/h0) 2 rho l^2 omega g(L).
pub fn char_residual_symmetric_terms<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> Result<Residual<T>> {
    cfg.require_symmetric()?;
    if omega == T::zero() {
        return Err(Error::ZeroFrequency);
    }
    let (f_l, g_l) = fg(omega, cfg.big_l, cfg);
    let (_, p, q) = pq(omega, cfg);
    let (a, b) = (p * f_l, q * g_l);
    Ok(Residual { value: a - b, scale: a.abs().max(b.abs()) })
}

pub fn char_residual_symmetric<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> Result<T> {
    char_residual_symmetric_terms(omega, cfg).map(|r| r.value)
}

pub fn char_residual_terms<T: Real>(omega: T, cfg: &PhysicalConfig<T>, branch: Branch) -> Result<Residual<T>> {
    match branch {
        Branch::General => char_residual_general_terms(omega, cfg),
        Branch::Symmetric => char_residual_symmetric_terms(omega, cfg),
    }
}

/// Rows of the 2x2 homogeneous system for (K1, K2): the interior-discharge
/// row and the heave row.
pub fn branch_system<T: Real>(omega: T, cfg: &PhysicalConfig<T>) -> [[T; 2]; 2] {
    let (f_l, g_l) = fg(omega, cfg.big_l, cfg);
    let (f_lp, g_lp) = fg(omega, cfg.l_prime, cfg);
    let (s, p, q) = pq(omega, cfg);
    let a = s / (cfg.l * cfg.alpha_bar * omega);
    [[a * g_l - f_l, a * g_lp - f_lp], [q * g_l - p * f_l, p * f_lp - q * g_lp]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_config, RawConfig};

    #[test]
    fn determinant_matches_printed_form() {
        let mut raw = RawConfig::reference();
        raw.l_prime = 13.7;
        let cfg = build_config(&raw).unwrap();
        for &w in &[0.3, 1.7, 4.2, 9.9] {
            let m = branch_system(w, &cfg);
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let r = char_residual_general_terms(w, &cfg).unwrap();
            assert!((det + r.value).abs() <= 1e-10 * r.scale, "{w}: {det} vs {}", r.value);
        }
    }

    #[test]
    fn zero_frequency_rejected() {
        let cfg = build_config(&RawConfig::reference()).unwrap();
        assert_eq!(char_residual_general(0.0, &cfg), Err(Error::ZeroFrequency));
        assert_eq!(char_residual_symmetric(0.0, &cfg), Err(Error::ZeroFrequency));
    }

    #[test]
    fn symmetric_needs_equal_walls() {
        let mut raw = RawConfig::reference();
        raw.l_prime = 12.0;
        let cfg = build_config(&raw).unwrap();
        assert!(matches!(char_residual_symmetric(1.0, &cfg), Err(Error::Asymmetric { .. })));
    }
}
