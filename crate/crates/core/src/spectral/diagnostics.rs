use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::model::PhysicalConfig;
use crate::scalar::Real;

/// Tolerance for the double-eigenvalue conditions.
pub const RESONANCE_TOL: f64 = 1e-9;
/// Largest denominator tried when classifying the length ratio.
pub const MAX_DENOMINATOR: i64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Simplicity {
    Guaranteed,
    Excluded,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport<T> {
    pub kappa: T,
    pub kappa_positive: bool,
    /// sqrt(2 rho g l / kappa) when kappa > 0.
    pub candidate_omega: Option<T>,
    /// sqrt(2 rho l/(kappa h0)) (L'-L)/pi and its distance to the nearest integer.
    pub integer_condition: Option<(T, T)>,
    pub integer_condition_holds: bool,
    /// tan(sqrt(2 rho l/(kappa h0)) (L-l)) and (1/(l alpha)) sqrt(kappa/(2 rho l h0)).
    pub tangent_condition: Option<(T, T)>,
    pub tangent_condition_holds: bool,
    pub flat_bottom: bool,
    /// h0 > 2 sqrt(2/3) l.
    pub depth_condition: bool,
    /// Band endpoints (h0 -+ sqrt(h0^2 - 8 l^2/3))/2 when real.
    pub band: Option<(T, T)>,
    pub simplicity: Simplicity,
}

/// Evaluates the double-eigenvalue conditions and the flat-bottom
/// simplicity criterion.
pub fn detect_resonance<T: Real>(cfg: &PhysicalConfig<T>) -> ResonanceReport<T> {
    let two = T::lit(2.0);
    let tol = T::lit(RESONANCE_TOL);
    let (rho, g, l, h0) = (cfg.rho, cfg.g, cfg.l, cfg.h0);
    let kappa = cfg.kappa;
    let kappa_positive = kappa > T::zero();
    let mut report = ResonanceReport {
        kappa,
        kappa_positive,
        candidate_omega: None,
        integer_condition: None,
        integer_condition_holds: false,
        tangent_condition: None,
        tangent_condition_holds: false,
        flat_bottom: cfg.h_eq.is_flat(),
        depth_condition: h0 > two * (two / T::lit(3.0)).sqrt() * l,
        band: None,
        simplicity: Simplicity::Undetermined,
    };
    if kappa_positive {
        let w = (two * rho * g * l / kappa).sqrt();
        let k = (two * rho * l / (kappa * h0)).sqrt();
        let x = k * (cfg.l_prime - cfg.big_l) / T::PI();
        let dist = (x - x.round()).abs();
        let lhs = (k * (cfg.big_l - l)).tan();
        let rhs = (kappa / (two * rho * l * h0)).sqrt() / (l * cfg.alpha_bar);
        report.candidate_omega = Some(w);
        report.integer_condition = Some((x, dist));
        report.integer_condition_holds = dist <= tol;
        report.tangent_condition = Some((lhs, rhs));
        report.tangent_condition_holds = (lhs - rhs).abs() <= tol * (T::one() + rhs.abs());
    }
    let disc = h0 * h0 - T::lit(8.0) / T::lit(3.0) * l * l;
    if disc >= T::zero() {
        let r = disc.sqrt();
        report.band = Some(((h0 - r) / two, (h0 + r) / two));
    }
    report.simplicity = if report.integer_condition_holds && report.tangent_condition_holds {
        Simplicity::Excluded
    } else if report.flat_bottom && report.depth_condition {
        let (lo, hi) = report.band.expect("band exists when the depth condition holds");
        let h = cfg.h_eq.max();
        if h >= hi || h <= lo {
            Simplicity::Guaranteed
        } else {
            Simplicity::Undetermined
        }
    } else {
        Simplicity::Undetermined
    };
    report
}

/// Classification of (L'-l)/(L-l).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "class")]
pub enum RatioClass {
    /// Rational p/q not of the form (r+1)/r: gaps bounded below uniformly.
    Rational { num: i64, den: i64 },
    /// (r+1)/r for an integer r: gaps may shrink like 1/k.
    RationalOneOverK { num: i64, den: i64, r: i64 },
    /// No rational approximation with denominator up to [`MAX_DENOMINATOR`].
    Irrational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport<T> {
    pub gaps: Vec<T>,
    pub min_gap: Option<T>,
    /// Minimum over k of k * (omega_{k+1} - omega_k), k starting at 1.
    pub min_k_gap: Option<T>,
    /// pi sqrt(g h0)/(L-l) and pi sqrt(g h0)/(L'-l).
    pub asymptotic_gaps: (T, T),
    pub ratio: T,
    pub class: RatioClass,
    /// True when L = L': both root families share the same asymptotic grid.
    pub coincident_families: bool,
    pub one_over_k_regime: bool,
}

pub fn classify_ratio(x: f64) -> RatioClass {
    match rational_approx(x, MAX_DENOMINATOR, 1e-9) {
        None => RatioClass::Irrational,
        Some(r) => {
            let (p, q) = (*r.numer(), *r.denom());
            let d = p - q;
            if d != 0 && q % d == 0 {
                RatioClass::RationalOneOverK { num: p, den: q, r: q / d }
            } else {
                RatioClass::Rational { num: p, den: q }
            }
        }
    }
}

/// Best continued-fraction approximation with bounded denominator, if it
/// reproduces `x` to relative tolerance `tol`.
fn rational_approx(x: f64, max_den: i64, tol: f64) -> Option<Ratio<i64>> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > max_den {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        if ((h1 as f64 / k1 as f64) - x).abs() <= tol * x.abs().max(1.0) {
            return Some(Ratio::new(h1, k1));
        }
        let frac = y - y.floor();
        if frac == 0.0 {
            break;
        }
        y = 1.0 / frac;
    }
    None
}

pub fn gap_statistics<T: Real>(omegas: &[T], cfg: &PhysicalConfig<T>) -> GapReport<T> {
    let gaps: Vec<T> = omegas.windows(2).map(|w| w[1] - w[0]).collect();
    let min_gap = gaps.iter().copied().reduce(T::min);
    let min_k_gap = gaps.iter().enumerate().map(|(i, &g)| T::from_count(i + 1) * g).reduce(T::min);
    let c = cfg.wave_speed();
    let ratio = (cfg.l_prime - cfg.l) / (cfg.big_l - cfg.l);
    let class = classify_ratio(ratio.as_f64());
    let coincident_families = cfg.is_symmetric();
    let one_over_k_regime = matches!(class, RatioClass::RationalOneOverK { .. });
    GapReport {
        gaps,
        min_gap,
        min_k_gap,
        asymptotic_gaps: (T::PI() * c / (cfg.big_l - cfg.l), T::PI() * c / (cfg.l_prime - cfg.l)),
        ratio,
        class,
        coincident_families,
        one_over_k_regime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_classes() {
        assert_eq!(classify_ratio(2.0), RatioClass::RationalOneOverK { num: 2, den: 1, r: 1 });
        assert_eq!(classify_ratio(1.5), RatioClass::RationalOneOverK { num: 3, den: 2, r: 2 });
        assert_eq!(classify_ratio(0.5), RatioClass::RationalOneOverK { num: 1, den: 2, r: -2 });
        assert_eq!(classify_ratio(5.0 / 3.0), RatioClass::Rational { num: 5, den: 3 });
        assert_eq!(classify_ratio(1.0), RatioClass::Rational { num: 1, den: 1 });
        assert_eq!(classify_ratio(2f64.sqrt()), RatioClass::Irrational);
    }
}
