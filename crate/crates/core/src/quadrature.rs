//! Composite trapezoid rule with Richardson extrapolation.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Composite trapezoid rule with `n` panels.
pub fn trapezoid<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, n: usize) -> T {
    let n = n.max(1);
    let h = (b - a) / T::from_count(n);
    let mut s = (f(a) + f(b)) * T::lit(0.5);
    for j in 1..n {
        s = s + f(a + h * T::from_count(j));
    }
    s * h
}

/// Result of an adaptive integration: value and the last Richardson
/// difference (error estimate).
#[derive(Debug, Clone, Copy)]
pub struct Quad<T> {
    pub value: T,
    pub error: T,
    pub panels: usize,
}

/// Trapezoid with one Richardson step, doubling panels until two
/// consecutive extrapolated values agree to `rel_tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, rel_tol: T) -> Result<Quad<T>> {
    integrate_from(f, a, b, rel_tol, 8)
}

/// [`integrate`] starting from `min_panels` panels. Oscillatory integrands
/// need enough initial panels to resolve them, otherwise aliased coarse
/// levels can agree by accident.
pub fn integrate_from<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, rel_tol: T, min_panels: usize) -> Result<Quad<T>> {
    if a == b {
        return Ok(Quad { value: T::zero(), error: T::zero(), panels: 0 });
    }
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let mut n = min_panels.max(2);
    let mut coarse = trapezoid(&f, a, b, n);
    let mut prev: Option<T> = None;
    let floor = T::epsilon() * T::lit(16.0);
    for _ in 0..20 {
        n *= 2;
        let fine = refine(&f, a, b, n, coarse);
        let rich = (four * fine - coarse) / three;
        if let Some(p) = prev {
            let err = (rich - p).abs();
            let scale = rich.abs().max(T::min_positive_value());
            if err <= rel_tol * scale || err <= floor * scale || err == T::zero() {
                return Ok(Quad { value: rich, error: err, panels: n });
            }
        }
        if !rich.is_finite() {
            return Err(Error::NonFinite("quadrature integrand".into()));
        }
        prev = Some(rich);
        coarse = fine;
    }
    Err(Error::Quadrature(format!("no convergence on [{}, {}] after {} panels", a, b, n)))
}

/// Trapezoid value on `n` panels from the value on `n/2` panels.
fn refine<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, n: usize, half: T) -> T {
    let h = (b - a) / T::from_count(n);
    let mut s = T::zero();
    let mut j = 1;
    while j < n {
        s = s + f(a + h * T::from_count(j));
        j += 2;
    }
    half * T::lit(0.5) + s * h
}
