use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::characteristic::{char_residual_terms, Branch, Residual};
use crate::error::{Error, Result};
use crate::model::PhysicalConfig;
use crate::scalar::Real;

/// Root tolerance relative to the largest term of the characteristic function.
pub const ROOT_TOL: f64 = 1e-12;

/// Outcome of the bracket scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RootSearch<T> {
    pub omegas: Vec<T>,
    /// |residual| / term scale at each root.
    pub relative_residuals: Vec<T>,
    /// Scanned interval (lower, upper).
    pub scanned: (T, T),
    pub step: T,
    /// Indices of roots that came out of a bracket holding two roots.
    pub clusters: Vec<usize>,
}

fn sgn<T: Real>(x: T) -> i8 {
    if x > T::zero() {
        1
    } else if x < T::zero() {
        -1
    } else {
        0
    }
}

/// Scan step and initial upper bound for `count` roots.
pub fn scan_window<T: Real>(cfg: &PhysicalConfig<T>, count: usize) -> (T, T) {
    let c = cfg.wave_speed();
    let (a, b) = (cfg.big_l - cfg.l, cfg.l_prime - cfg.l);
    let step = T::lit(0.25) * T::PI() * c / a.max(b);
    let upper = T::from_count(count + 1) * T::PI() * c / a.min(b);
    (step, upper)
}

/// The `count` smallest positive roots of the characteristic function.
pub fn find_eigenvalues<T: Real>(cfg: &PhysicalConfig<T>, count: usize, branch: Branch) -> Result<RootSearch<T>> {
    if count == 0 {
        return Err(Error::Argument("requested zero eigenvalues".into()));
    }
    if branch == Branch::Symmetric {
        cfg.require_symmetric()?;
    }
    let f = |w: T| char_residual_terms(w, cfg, branch).map(|r| r.value);
    let (step, mut upper) = scan_window(cfg, count);
    let start = step * T::lit(1e-6);
    let mut lo = start;
    let mut brackets: Vec<(T, T, bool)> = Vec::new();
    for _ in 0..4 {
        scan(&f, lo, upper, step, &mut brackets)?;
        if brackets.len() >= count {
            break;
        }
        lo = upper;
        upper = upper + upper;
    }
    if brackets.len() < count {
        return Err(Error::BracketExhaustion { found: brackets.len(), requested: count, upper: upper.as_f64() });
    }
    brackets.truncate(count);
    let refined: Vec<Result<(T, Residual<T>)>> =
        brackets.par_iter().map(|&(a, b, _)| refine(|w| char_residual_terms(w, cfg, branch), a, b)).collect();
    let mut omegas = Vec::with_capacity(count);
    let mut relative_residuals = Vec::with_capacity(count);
    for r in refined {
        let (w, res) = r?;
        omegas.push(w);
        relative_residuals.push(if res.scale > T::zero() { res.value.abs() / res.scale } else { T::zero() });
    }
    let clusters = brackets.iter().enumerate().filter(|(_, b)| b.2).map(|(i, _)| i).collect();
    Ok(RootSearch { omegas, relative_residuals, scanned: (start, upper), step, clusters })
}

/// Appends brackets found on [lo, hi]. The flag marks brackets produced by
/// splitting a step that holds two roots without a sign change.
fn scan<T: Real>(f: &impl Fn(T) -> Result<T>, lo: T, hi: T, step: T, out: &mut Vec<(T, T, bool)>) -> Result<()> {
    let mut a = lo;
    let mut fa = f(a)?;
    while a < hi {
        let b = (a + step).min(hi);
        let fb = f(b)?;
        let (sa, sb) = (sgn(fa), sgn(fb));
        if sb == 0 {
            out.push((b, b, false));
        } else if sa != 0 && sa != sb {
            out.push((a, b, false));
        } else if sa != 0 {
            let m = (a + b) * T::lit(0.5);
            let fm = f(m)?;
            if sgn(fm) != sa {
                out.push((a, m, true));
                out.push((m, b, true));
            } else if fm.abs() < fa.abs() && fm.abs() < fb.abs() {
                let (x, fx) = golden_min(|w| f(w).map(|v| T::from(sa).unwrap() * v), a, b)?;
                if fx < T::zero() {
                    out.push((a, x, true));
                    out.push((x, b, true));
                }
            }
        }
        a = b;
        fa = fb;
    }
    Ok(())
}

fn golden_min<T: Real>(f: impl Fn(T) -> Result<T>, mut a: T, mut b: T) -> Result<(T, T)> {
    let r = T::lit(0.618_033_988_749_894_8);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..80 {
        if f1 < T::zero() || f2 < T::zero() {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

/// Bisection to a narrow bracket, one Newton polish, then bisection again if
/// the polished point misses the tolerance.
fn refine<T: Real>(f: impl Fn(T) -> Result<Residual<T>>, mut a: T, mut b: T) -> Result<(T, Residual<T>)> {
    if a == b {
        return Ok((a, f(a)?));
    }
    let mut fa = f(a)?.value;
    let coarse = T::lit(1e-9);
    while b - a > coarse * b {
        let m = (a + b) * T::lit(0.5);
        let fm = f(m)?.value;
        if sgn(fm) == 0 {
            return Ok((m, f(m)?));
        }
        if sgn(fm) == sgn(fa) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = (a + b) * T::lit(0.5);
    let fx = f(x)?;
    let h = (b - a) * T::lit(0.25);
    let d = (f(x + h)?.value - f(x - h)?.value) / (h + h);
    if d != T::zero() {
        let xn = x - fx.value / d;
        if xn > a && xn < b {
            let fn_ = f(xn)?;
            if fn_.value.abs() <= fx.value.abs() {
                x = xn;
            }
        }
    }
    let mut best = f(x)?;
    let tol = T::lit(ROOT_TOL);
    let mut iters = 0;
    while best.value.abs() > tol * best.scale && iters < 200 && b - a > T::epsilon() * b {
        let m = (a + b) * T::lit(0.5);
        let fm = f(m)?;
        if sgn(fm.value) == sgn(fa) {
            a = m;
            fa = fm.value;
        } else {
            b = m;
        }
        if fm.value.abs() < best.value.abs() {
            x = m;
            best = fm;
        }
        iters += 1;
    }
    Ok((x, best))
}
