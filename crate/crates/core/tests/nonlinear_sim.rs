use std::f64::consts::PI;

use floatbody::control::ControlSignal;
use floatbody::model::{build_config, Grid, HeqProfile, RawConfig, State};
use floatbody::nonlinear_sim::{
    coefficients, compression_ratio, default_nonlinear_dt, perturbation_distance, pressure_with_accel,
    reconstruct_interior_pressure, rhs, simulate_nonlinear, NonlinearOptions, NonlinearState, Physics, CFL_NUMBER, SHOCK_RATIO,
};
use floatbody::{Config, Error};
use proptest::prelude::*;

fn cfg0() -> Config {
    build_config(&RawConfig::<f64>::reference()).unwrap()
}

fn wave(cfg: &Config, grid: Grid<f64>, eps: f64) -> NonlinearState<f64> {
    let len = cfg.big_l - cfg.l;
    let z =
        State::from_fields(grid, |x: f64| eps * (PI * (x.abs() - cfg.l) / len).cos(), |_| 0.0, 0.0, 0.0, 0.0).project_volume();
    NonlinearState::from_linear(&z, cfg).unwrap()
}

#[test]
fn coefficients_on_the_reference_object() {
    let cfg = cfg0();
    let c = coefficients(0.0, &cfg).unwrap();
    assert!((c.alpha - 1.0).abs() < 1e-12);
    assert!((c.alpha_prime + 1.0).abs() < 1e-12);
    assert!((c.beta - 1.0 / 6.0).abs() < 1e-12);
    assert!((c.mass - (2000.0 + 2000.0 / 3.0)).abs() < 1e-9);
    let c = coefficients(0.5, &cfg).unwrap();
    assert!((c.alpha - 1.0 / 1.5).abs() < 1e-12);
    assert!((c.alpha_prime + 1.0 / 2.25).abs() < 1e-12);
    assert!((c.beta - 1.0 / (6.0 * 2.25)).abs() < 1e-12);
    assert!(matches!(coefficients(-1.0, &cfg), Err(Error::Touchdown(_))));
}

#[test]
fn rest_state_has_zero_tendency() {
    let cfg = cfg0();
    let rest = NonlinearState::at_rest(Grid::new(&cfg, 60).unwrap(), &cfg);
    for physics in [Physics::Nonlinear, Physics::Linearized] {
        let (d, _) = rhs(&rest, 0.0, &cfg, physics).unwrap();
        let worst = d.h_left.iter().chain(&d.q_left).chain(&d.h_right).chain(&d.q_right).fold(0.0f64, |m, v| m.max(v.abs()));
        assert_eq!(worst, 0.0);
        assert_eq!((d.q_i_avg, d.delta, d.eta), (0.0, 0.0, 0.0));
    }
}

#[test]
fn linear_round_trip_is_exact_at_rest() {
    let cfg = cfg0();
    let grid = Grid::new(&cfg, 40).unwrap();
    let z = NonlinearState::at_rest(grid, &cfg).to_linear(&cfg);
    assert_eq!(z, State::zeros(grid));
}

#[test]
fn forced_run_keeps_volume() {
    let cfg = cfg0();
    let grid = Grid::new(&cfg, 100).unwrap();
    let s0 = wave(&cfg, grid, 1e-3);
    let u = ControlSignal::from_fn(0.01, 300, |t: f64| 50.0 * t.sin());
    let tr = simulate_nonlinear(&s0, &u, 2.0, &cfg, NonlinearOptions::default()).unwrap();
    assert!(tr.max_volume_defect / tr.volume[0] < 1e-12);
}

#[test]
fn linearized_scheme_does_not_create_energy() {
    let cfg = cfg0();
    let grid = Grid::new(&cfg, 100).unwrap();
    let s0 = wave(&cfg, grid, 1e-3);
    let opts = NonlinearOptions { physics: Physics::Linearized, ..Default::default() };
    let tr = simulate_nonlinear(&s0, &ControlSignal::zero(1.0, 1), cfg.tau0, &cfg, opts).unwrap();
    let e0 = tr.energy[0];
    assert!(tr.energy.iter().all(|e| *e <= e0 * (1.0 + 1e-12)));
}

#[test]
fn oversized_step_violates_cfl() {
    let cfg = cfg0();
    let s0 = wave(&cfg, Grid::new(&cfg, 100).unwrap(), 1e-3);
    let opts = NonlinearOptions { dt: Some(0.1), ..Default::default() };
    let res = simulate_nonlinear(&s0, &ControlSignal::zero(1.0, 1), 1.0, &cfg, opts);
    assert!(matches!(res, Err(Error::Cfl { .. })));
}

#[test]
fn steep_wave_trips_the_shock_guard() {
    let cfg = cfg0();
    let grid = Grid::new(&cfg, 200).unwrap();
    let s0 = wave(&cfg, grid, 0.5);
    assert!(compression_ratio(&wave(&cfg, grid, 0.1), &cfg) < SHOCK_RATIO);
    // Half the default step so growing wave speeds stay inside the CFL bound.
    let dt = default_nonlinear_dt(&s0, &cfg, Physics::Nonlinear, CFL_NUMBER).unwrap() / 2.0;
    let opts = NonlinearOptions { dt: Some(dt), ..Default::default() };
    let res = simulate_nonlinear(&s0, &ControlSignal::zero(1.0, 1), 3.0 * cfg.tau0, &cfg, opts);
    assert!(matches!(res, Err(Error::Shock { .. })), "{:?}", res.err());
}

#[test]
fn archimedes_at_rest() {
    let cfg = cfg0();
    let rest = NonlinearState::at_rest(Grid::new(&cfg, 40).unwrap(), &cfg);
    for n in [8, 33, 100] {
        let p = reconstruct_interior_pressure(&rest, 0.0, &cfg, n).unwrap();
        assert!(((p.force - cfg.m * cfg.g) / (cfg.m * cfg.g)).abs() < 1e-12);
        assert!(p.newton_residual.abs() < 1e-8);
    }
}

#[test]
fn archimedes_for_a_sampled_bottom() {
    let mut raw = RawConfig::reference();
    raw.h_eq = HeqProfile::Sampled(vec![1.0, 0.8, 0.7, 0.8, 1.0]);
    let cfg = build_config(&raw).unwrap();
    let rest = NonlinearState::at_rest(Grid::new(&cfg, 40).unwrap(), &cfg);
    // Piecewise-linear bottom with nodes on the pressure grid: trapezoid is exact.
    let p = reconstruct_interior_pressure(&rest, 0.0, &cfg, 64).unwrap();
    assert!(((p.force - cfg.m * cfg.g) / (cfg.m * cfg.g)).abs() < 1e-12);
}

#[test]
fn flat_bottom_pressure_is_a_parabola() {
    // With h_w = H constant the interior problem reduces to
    // Pi'' = (rho/H)(delta'' - 2 eta^2/H) with Dirichlet ends.
    let cfg = cfg0();
    let grid = Grid::new(&cfg, 100).unwrap();
    let mut s = wave(&cfg, grid, 1e-2);
    s.delta = 0.05;
    s.eta = 0.2;
    s.q_i_avg = 0.1;
    let accel = -0.3;
    let n = 20;
    let p = pressure_with_accel(&s, 0.0, accel, &cfg, n).unwrap();
    let h = 1.0 + s.delta;
    let curv = cfg.rho / h * (accel - 2.0 * s.eta * s.eta / h);
    let (pl, pr) = (p.pi[0], p.pi[n]);
    let l = cfg.l;
    for (x, got) in p.x.iter().zip(&p.pi) {
        let expected = pl + (pr - pl) * (x + l) / (2.0 * l) + 0.5 * curv * (x + l) * (x - l);
        assert!((got - expected).abs() < 1e-9 * (1.0 + expected.abs()), "x {x}: {got} vs {expected}");
    }
}

#[test]
fn pressure_needs_two_intervals() {
    let cfg = cfg0();
    let rest = NonlinearState::at_rest(Grid::new(&cfg, 40).unwrap(), &cfg);
    assert!(matches!(reconstruct_interior_pressure(&rest, 0.0, &cfg, 1), Err(Error::Argument(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn perturbation_distance_is_a_metric(a in 1e-4f64..1e-2, b in 1e-4f64..1e-2) {
        let cfg = cfg0();
        let grid = Grid::new(&cfg, 40).unwrap();
        let (x, y) = (wave(&cfg, grid, a), wave(&cfg, grid, b));
        let rest = NonlinearState::at_rest(grid, &cfg);
        let dxy = perturbation_distance(&x, &y, &cfg).unwrap();
        prop_assert!((dxy - perturbation_distance(&y, &x, &cfg).unwrap()).abs() <= 1e-15 * (1.0 + dxy));
        let via = perturbation_distance(&x, &rest, &cfg).unwrap() + perturbation_distance(&rest, &y, &cfg).unwrap();
        prop_assert!(dxy <= via * (1.0 + 1e-12));
        prop_assert_eq!(perturbation_distance(&x, &x, &cfg).unwrap(), 0.0);
    }
}
