use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{integrate_object, PhysicalConfig};
use crate::scalar::Real;

/// Displacement-dependent coefficients of the object ODEs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet<T> {
    /// (1/2l) int 1/h_w
    pub alpha: T,
    /// -(1/2l) int 1/h_w^2
    pub alpha_prime: T,
    /// (1/4l) int x^2/h_w^2
    pub beta: T,
    /// m + rho int x^2/h_w
    pub mass: T,
}

/// Evaluates the coefficients at displacement `delta` (h_w = h_eq + delta).
pub fn coefficients<T: Real>(delta: T, cfg: &PhysicalConfig<T>) -> Result<CoefficientSet<T>> {
    let hmin = cfg.h_eq.min() + delta;
    if !(hmin > T::zero()) {
        return Err(Error::Touchdown(hmin.as_f64()));
    }
    let l = cfg.l;
    let two_l = l + l;
    let int = |f: &dyn Fn(T, T) -> T| integrate_object(&cfg.h_eq, l, |x, h| f(x, h + delta)).map(|q| q.value);
    let alpha = int(&|_, h| T::one() / h)? / two_l;
    let alpha_prime = -int(&|_, h| T::one() / (h * h))? / two_l;
    let beta = int(&|x, h| x * x / (h * h))? / (two_l + two_l);
    let mass = cfg.m + cfg.rho * int(&|x, h| x * x / h)?;
    Ok(CoefficientSet { alpha, alpha_prime, beta, mass })
}
