use std::f64::consts::PI;

use floatbody::model::{build_config, inner_product, Grid, HeqProfile, RawConfig};
use floatbody::spectral::{
    self, char_residual_general, char_residual_general_terms, compute_modes, detect_resonance, find_eigenvalues, gap_statistics,
    Branch, RatioClass, Simplicity,
};
use floatbody::Config;
use proptest::prelude::*;

fn cfg0() -> Config {
    build_config(&RawConfig::<f64>::reference()).unwrap()
}

fn with(f: impl FnOnce(&mut RawConfig<f64>)) -> Config {
    let mut raw = RawConfig::reference();
    f(&mut raw);
    build_config(&raw).unwrap()
}

/// Symmetric characteristic function written out directly from the
/// configuration constants.
fn symmetric_oracle(w: f64, cfg: &Config) -> (f64, f64) {
    let c = (cfg.g * cfg.h0).sqrt();
    let arg = w * (cfg.big_l - cfg.l) / c;
    let a = (cfg.m_bar * w * w - 2.0 * cfg.rho * cfg.g * cfg.l) * arg.sin();
    let b = (cfg.g / cfg.h0).sqrt() * 2.0 * cfg.rho * cfg.l * cfg.l * w * arg.cos();
    (a - b, a.abs().max(b.abs()))
}

#[test]
fn symmetric_roots_solve_the_oracle() {
    let cfg = cfg0();
    let roots = find_eigenvalues(&cfg, 30, Branch::Symmetric).unwrap();
    assert_eq!(roots.omegas.len(), 30);
    for &w in &roots.omegas {
        let (v, scale) = symmetric_oracle(w, &cfg);
        assert!(v.abs() <= 1e-10 * scale, "omega {w}: {v:e} vs {scale:e}");
    }
    assert!(roots.omegas.windows(2).all(|p| p[1] > p[0]));
    assert!((roots.omegas[0] - 1.35555).abs() < 1e-4);
}

#[test]
fn one_root_per_asymptotic_window() {
    // The window around 2 * spacing also holds the heave root, so counting
    // starts at k = 3.
    let cfg = cfg0();
    let roots = find_eigenvalues(&cfg, 34, Branch::Symmetric).unwrap();
    let spacing = PI * (cfg.g * cfg.h0).sqrt() / (cfg.big_l - cfg.l);
    for k in 3..=30 {
        let (lo, hi) = ((k as f64 - 0.5) * spacing, (k as f64 + 0.5) * spacing);
        let inside = roots.omegas.iter().filter(|w| **w > lo && **w < hi).count();
        assert_eq!(inside, 1, "window {k}");
        assert!(symmetric_oracle(lo, &cfg).0 * symmetric_oracle(hi, &cfg).0 < 0.0, "window {k}");
    }
}

#[test]
fn factors_never_vanish_together() {
    let cfg = cfg0();
    let roots = find_eigenvalues(&cfg, 30, Branch::Symmetric).unwrap();
    let c = (cfg.g * cfg.h0).sqrt();
    for &w in &roots.omegas {
        let mass = (cfg.m_bar * w * w - 2.0 * cfg.rho * cfg.g * cfg.l) / (cfg.m_bar * w * w);
        let cosine = (w * (cfg.big_l - cfg.l) / c).cos();
        assert!(mass.abs() > 1e-6 || cosine.abs() > 1e-6, "omega {w}");
    }
}

#[test]
fn no_root_is_missed_below_the_first() {
    let cfg = cfg0();
    let first = find_eigenvalues(&cfg, 1, Branch::Symmetric).unwrap().omegas[0];
    let n = 4000;
    let mut prev = symmetric_oracle(1e-6, &cfg).0;
    for i in 1..n {
        let w = first * 0.999 * i as f64 / n as f64;
        let v = symmetric_oracle(w, &cfg).0;
        assert!(v.signum() == prev.signum() || v == 0.0, "sign change near {w}");
        prev = v;
    }
}

#[test]
fn symmetric_roots_are_general_roots() {
    let cfg = cfg0();
    let roots = find_eigenvalues(&cfg, 10, Branch::Symmetric).unwrap();
    for &w in &roots.omegas {
        let r = char_residual_general_terms(w, &cfg).unwrap();
        assert!(r.value.abs() <= 1e-8 * r.scale, "omega {w}");
    }
}

#[test]
fn general_branch_on_unequal_tank() {
    let cfg = with(|r| r.l_prime = 13.7);
    let modes = compute_modes(&cfg, 6, Branch::General).unwrap();
    assert_eq!(modes.len(), 6);
    for m in &modes {
        assert!(((m.gamma - m.gamma_quadrature) / m.gamma).abs() < 1e-6);
        let r1 = spectral::verify_eigenpair(m, &cfg, 100).unwrap();
        let r2 = spectral::verify_eigenpair(m, &cfg, 200).unwrap();
        assert!(((r1 / r2).log2() - 2.0).abs() < 0.2, "omega {}", m.omega);
    }
    assert!(compute_modes(&cfg, 3, Branch::Symmetric).is_err());
}

#[test]
fn sampled_modes_are_nearly_orthonormal() {
    let cfg = cfg0();
    let grid = Grid::new(&cfg, 800).unwrap();
    let modes = compute_modes(&cfg, 4, Branch::Symmetric).unwrap();
    let sampled: Vec<_> = modes.iter().map(|m| m.sample(grid)).collect();
    for j in 0..4 {
        for k in 0..4 {
            let (a, b) = (&sampled[j], &sampled[k]);
            let re = inner_product(&a.0, &b.0, &cfg).unwrap() + inner_product(&a.1, &b.1, &cfg).unwrap();
            let expected = if j == k { 1.0 } else { 0.0 };
            assert!((re - expected).abs() < 1e-4, "({j},{k}): {re}");
        }
    }
}

#[test]
fn resonance_report_on_reference() {
    let rep = detect_resonance(&cfg0());
    assert!(rep.kappa_positive);
    // sqrt(2 rho g l / kappa) with kappa = 2000/3.
    assert!((rep.candidate_omega.unwrap() - (2.0 * 1000.0 * 9.81 * 3.0 / 2000.0f64).sqrt()).abs() < 1e-9);
    assert!(rep.integer_condition_holds);
    assert!(rep.depth_condition);
    let (lo, hi) = rep.band.unwrap();
    assert!((lo - (2.0 - (4.0f64 - 8.0 / 3.0).sqrt()) / 2.0).abs() < 1e-12);
    assert!(lo < 1.0 && 1.0 < hi);
    assert_eq!(rep.simplicity, Simplicity::Undetermined);
}

#[test]
fn shallow_gap_guarantees_simple_spectrum() {
    let cfg = with(|r| r.h_eq = HeqProfile::Flat(0.4));
    assert_eq!(detect_resonance(&cfg).simplicity, Simplicity::Guaranteed);
}

#[test]
fn ratio_two_is_flagged() {
    let cfg = with(|r| r.l_prime = 19.0);
    let roots = find_eigenvalues(&cfg, 20, Branch::General).unwrap();
    let rep = gap_statistics(&roots.omegas, &cfg);
    assert_eq!(rep.class, RatioClass::RationalOneOverK { num: 2, den: 1, r: 1 });
    assert!(rep.one_over_k_regime);
    assert!(!rep.coincident_families);
}

#[test]
fn reference_gaps_approach_the_limit() {
    let cfg = cfg0();
    let roots = find_eigenvalues(&cfg, 30, Branch::Symmetric).unwrap();
    let rep = gap_statistics(&roots.omegas, &cfg);
    let limit = PI * (9.81f64 * 2.0).sqrt() / 9.0;
    assert!((rep.asymptotic_gaps.0 - limit).abs() < 1e-12);
    assert!(rep.coincident_families);
    assert!(rep.min_gap.unwrap() > 0.0);
}

proptest! {
    #[test]
    fn general_residual_is_even(w in 0.05f64..40.0, lp in 10.0f64..25.0) {
        let cfg = with(|r| r.l_prime = lp);
        let a = char_residual_general(w, &cfg).unwrap();
        let b = char_residual_general(-w, &cfg).unwrap();
        let scale = char_residual_general_terms(w, &cfg).unwrap().scale;
        prop_assert!((a - b).abs() <= 1e-10 * scale);
    }
}
