use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Quad};
use crate::scalar::Real;

/// Relative tolerance of the h_eq integrals.
pub const QUAD_TOL: f64 = 1e-10;
/// Largest accepted asymmetry of a sampled h_eq profile (m).
pub const EVEN_TOL: f64 = 1e-8;

/// Equilibrium gap between object bottom and tank floor on [-l, l].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeqProfile<T> {
    /// Constant profile.
    Flat(T),
    /// Values at equally spaced points from -l to l (odd count, piecewise
    /// linear in between).
    Sampled(Vec<T>),
}

impl<T: Real> HeqProfile<T> {
    /// Parses `flat:<value>`.
    pub fn parse_token(s: &str) -> Result<Self> {
        let v = s.trim().strip_prefix("flat:").ok_or_else(|| Error::Profile(format!("expected `flat:<value>`, got `{s}`")))?;
        let x: f64 = v.trim().parse().map_err(|_| Error::Profile(format!("bad flat value `{v}`")))?;
        Ok(HeqProfile::Flat(T::lit(x)))
    }

    /// Profile value at `x` in [-l, l].
    pub fn eval(&self, x: T, l: T) -> T {
        match self {
            HeqProfile::Flat(v) => *v,
            HeqProfile::Sampled(s) => {
                let n = s.len() - 1;
                let t = ((x + l) / (l + l) * T::from_count(n)).max(T::zero()).min(T::from_count(n));
                let j = t.floor().to_usize().unwrap_or(0).min(n - 1);
                let w = t - T::from_count(j);
                s[j] * (T::one() - w) + s[j + 1] * w
            }
        }
    }

    fn extremes(&self) -> (T, T) {
        match self {
            HeqProfile::Flat(v) => (*v, *v),
            HeqProfile::Sampled(s) => s.iter().fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v))),
        }
    }

    pub fn min(&self) -> T {
        self.extremes().0
    }

    pub fn max(&self) -> T {
        self.extremes().1
    }

    pub fn is_flat(&self) -> bool {
        match self {
            HeqProfile::Flat(_) => true,
            HeqProfile::Sampled(s) => s.iter().all(|&v| v == s[0]),
        }
    }

    /// Symmetrized copy; errors if the asymmetry exceeds [`EVEN_TOL`].
    fn symmetrized(&self) -> Result<Self> {
        match self {
            HeqProfile::Flat(v) => Ok(HeqProfile::Flat(*v)),
            HeqProfile::Sampled(s) => {
                if s.len() < 3 || s.len() % 2 == 0 {
                    return Err(Error::Profile(format!("sampled profile needs an odd number (>= 3) of points, got {}", s.len())));
                }
                let n = s.len();
                let asym = (0..n).map(|i| (s[i] - s[n - 1 - i]).abs()).fold(T::zero(), T::max);
                if asym.as_f64() > EVEN_TOL {
                    return Err(Error::NotEven { asymmetry: asym.as_f64(), tolerance: EVEN_TOL });
                }
                Ok(HeqProfile::Sampled((0..n).map(|i| (s[i] + s[n - 1 - i]) * T::lit(0.5)).collect()))
            }
        }
    }
}

/// Raw inputs: fluid constants, tank geometry and the object bottom profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawConfig<T> {
    pub g: T,
    pub rho: T,
    pub h0: T,
    pub l: T,
    /// Left wall at x = -L.
    pub big_l: T,
    /// Right wall at x = L'.
    pub l_prime: T,
    pub h_eq: HeqProfile<T>,
}

impl RawConfig<f64> {
    /// Reference configuration: g=9.81, h0=2, l=1, L=L'=10, rho=1000, flat h_eq=1.
    pub fn reference() -> Self {
        Self { g: 9.81, rho: 1000.0, h0: 2.0, l: 1.0, big_l: 10.0, l_prime: 10.0, h_eq: HeqProfile::Flat(1.0) }
    }
}

/// Validated configuration with derived constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig<T> {
    pub g: T,
    pub rho: T,
    pub h0: T,
    pub l: T,
    pub big_l: T,
    pub l_prime: T,
    pub h_eq: HeqProfile<T>,
    /// Mass per unit width.
    pub m: T,
    /// (1/2l) * integral of 1/h_eq.
    pub alpha_bar: T,
    /// m + rho * integral of x^2/h_eq.
    pub m_bar: T,
    pub kappa: T,
    /// 2(L-l)/sqrt(g h0).
    pub tau0: T,
    /// (rho g/2) * integral of (h_eq-h0)^2, the constant part of the energy.
    pub energy_offset: T,
    /// Largest Richardson error estimate among the derived integrals.
    pub quadrature_error: T,
}

/// Validates raw inputs and computes the derived constants.
pub fn build_config<T: Real>(raw: &RawConfig<T>) -> Result<PhysicalConfig<T>> {
    let RawConfig { g, rho, h0, l, big_l, l_prime, .. } = *raw;
    for (name, v) in [("g", g), ("rho", rho), ("h0", h0), ("l", l), ("L", big_l), ("L'", l_prime)] {
        if !v.is_finite() {
            return Err(Error::Geometry(format!("{name} is not finite")));
        }
    }
    if g <= T::zero() || rho <= T::zero() {
        return Err(Error::Geometry("g and rho must be positive".into()));
    }
    if h0 <= T::zero() {
        return Err(Error::Depth(format!("h0 = {h0} must be positive")));
    }
    if l <= T::zero() || l >= big_l.min(l_prime) {
        return Err(Error::Geometry(format!("need 0 < l < min(L, L'), got l = {l}, L = {big_l}, L' = {l_prime}")));
    }
    let h_eq = raw.h_eq.symmetrized()?;
    let (lo, hi) = (h_eq.min(), h_eq.max());
    if !(lo > T::zero()) || !hi.is_finite() {
        return Err(Error::Depth(format!("h_eq must be positive, min = {lo}")));
    }
    if hi >= h0 {
        return Err(Error::Depth(format!("h_eq reaches {hi} >= h0 = {h0}")));
    }

    let inv = integrate_object(&h_eq, l, |_, h| T::one() / h)?;
    let second = integrate_object(&h_eq, l, |x, h| x * x / h)?;
    let sub = integrate_object(&h_eq, l, |_, h| h0 - h)?;
    let off = integrate_object(&h_eq, l, |_, h| (h - h0) * (h - h0))?;
    let two = T::lit(2.0);
    let m = rho * sub.value;
    let alpha_bar = inv.value / (two * l);
    let m_bar = m + rho * second.value;
    let kappa = m_bar - two * rho * l * l * l * alpha_bar;
    let tau0 = two * (big_l - l) / (g * h0).sqrt();
    let quadrature_error = [inv, second, sub, off].iter().map(|q| q.error).fold(T::zero(), T::max);
    Ok(PhysicalConfig {
        g,
        rho,
        h0,
        l,
        big_l,
        l_prime,
        h_eq,
        m,
        alpha_bar,
        m_bar,
        kappa,
        tau0,
        energy_offset: rho * g / two * off.value,
        quadrature_error,
    })
}

/// Integral over [-l, l] of `f(x, h_eq(x))`, split at the sample points of a
/// sampled profile so every panel sees a smooth integrand.
pub fn integrate_object<T: Real>(profile: &HeqProfile<T>, l: T, f: impl Fn(T, T) -> T) -> Result<Quad<T>> {
    let tol = T::lit(QUAD_TOL);
    match profile {
        HeqProfile::Flat(v) => integrate(|x| f(x, *v), -l, l, tol),
        HeqProfile::Sampled(s) => {
            let n = s.len() - 1;
            let dx = (l + l) / T::from_count(n);
            let mut total = Quad { value: T::zero(), error: T::zero(), panels: 0 };
            for j in 0..n {
                let a = -l + dx * T::from_count(j);
                let (ha, hb) = (s[j], s[j + 1]);
                let q = integrate(|x| f(x, ha + (hb - ha) * (x - a) / dx), a, a + dx, tol)?;
                total.value = total.value + q.value;
                total.error = total.error + q.error;
                total.panels += q.panels;
            }
            Ok(total)
        }
    }
}

impl<T: Real> PhysicalConfig<T> {
    pub fn wave_speed(&self) -> T {
        (self.g * self.h0).sqrt()
    }

    pub fn is_symmetric(&self) -> bool {
        self.big_l == self.l_prime
    }

    pub fn require_symmetric(&self) -> Result<()> {
        if self.is_symmetric() {
            Ok(())
        } else {
            Err(Error::Asymmetric { big_l: self.big_l.as_f64(), l_prime: self.l_prime.as_f64() })
        }
    }

    pub fn h_eq_at(&self, x: T) -> T {
        self.h_eq.eval(x, self.l)
    }

    pub fn raw(&self) -> RawConfig<T> {
        RawConfig {
            g: self.g,
            rho: self.rho,
            h0: self.h0,
            l: self.l,
            big_l: self.big_l,
            l_prime: self.l_prime,
            h_eq: self.h_eq.clone(),
        }
    }
}
