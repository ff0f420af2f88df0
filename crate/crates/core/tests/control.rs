use floatbody::control::{
    self, apply_b, b_star, fit_decay_exponent, gramian, modal_response, steer, steer_with_modes, steering_modes, verify_reach,
    ControlSignal, MomentProblem, StabilizeOptions, SteerOptions,
};
use floatbody::linear_sim::DiscreteGenerator;
use floatbody::model::{build_config, inner_product, norm, Grid, RawConfig, State};
use floatbody::spectral::{compute_modes, Branch};
use floatbody::{Config, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn cfg0() -> Config {
    build_config(&RawConfig::<f64>::reference()).unwrap()
}

fn generator(cells: usize) -> DiscreteGenerator<f64> {
    let cfg = cfg0();
    DiscreteGenerator::new(&cfg, Grid::new(&cfg, cells).unwrap()).unwrap()
}

fn first_mode(gen: &DiscreteGenerator<f64>) -> State<f64> {
    compute_modes(&gen.cfg, 1, Branch::Symmetric).unwrap()[0].sample(gen.grid).0
}

/// Smallest eigenvalue of a Hermitian matrix through its real 2n embedding.
fn min_eig(g: &control::Gramian<f64>) -> f64 {
    let n = g.size;
    let m = 2 * n;
    let mut a = vec![vec![0.0; m]; m];
    for j in 0..n {
        for k in 0..n {
            let v = g.get(j, k);
            a[j][k] = v.re;
            a[j + n][k + n] = v.re;
            a[j][k + n] = -v.im;
            a[j + n][k] = v.im;
        }
    }
    // Cyclic Jacobi sweeps.
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += a[p][q] * a[p][q];
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..m {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..m {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
            }
        }
        if off < 1e-28 {
            break;
        }
    }
    (0..m).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
}

#[test]
fn b_star_reads_half_the_heave_velocity() {
    let gen = generator(20);
    let mut z = State::zeros(gen.grid);
    z.eta = 3.0;
    assert_eq!(b_star(&z), 1.5);
}

#[test]
fn single_mode_gramian_is_tau_b_squared() {
    let g = gramian(2.5f64, &[1.7], &[0.3]).unwrap();
    assert!((g.get(0, 0).re - 2.5 * 0.09).abs() < 1e-15);
    assert_eq!(g.get(0, 0).im, 0.0);
}

#[test]
fn gramian_is_hermitian_with_the_reported_spectrum() {
    let omegas = [1.35, 2.47, 3.52, 4.86];
    let b = [0.4, -0.3, 0.2, 0.1];
    let g = gramian(6.0, &omegas, &b).unwrap();
    for j in 0..4 {
        for k in 0..4 {
            assert!((g.get(j, k) - g.get(k, j).conj()).norm() < 1e-15);
        }
    }
    let oracle = min_eig(&g);
    assert!((g.min_eigenvalue - oracle).abs() < 1e-10 * g.max_eigenvalue, "{} vs {oracle}", g.min_eigenvalue);
    assert!(g.min_eigenvalue > 0.0);
}

#[test]
fn gramian_monotone_in_horizon_and_size() {
    let omegas = [1.35, 2.47, 3.52, 4.86, 6.34];
    let b = [0.4, -0.3, 0.2, 0.1, 0.05];
    let short = gramian(4.0, &omegas, &b).unwrap().min_eigenvalue;
    let long = gramian(8.0, &omegas, &b).unwrap().min_eigenvalue;
    assert!(long > short);
    let fewer = gramian(4.0, &omegas[..3], &b[..3]).unwrap().min_eigenvalue;
    assert!(fewer >= short);
    assert!(matches!(gramian(0.0, &omegas, &b), Err(Error::Argument(_))));
}

#[test]
fn modal_response_matches_closed_forms() {
    let tau = 3.0;
    let i = Complex64::new(0.0, 1.0);
    for (omega, dt) in [(30.0, 0.1), (3.0, 0.1), (1e-3, 0.1)] {
        let steps = (tau / dt) as usize;
        let ramp = ControlSignal::from_fn(dt, steps, |s: f64| s);
        let e = (i * omega * tau).exp();
        // int_0^tau e^{i w (tau - s)} s ds
        let expected = (e - 1.0 - i * omega * tau) / (-(omega * omega));
        let got = modal_response(&ramp, tau, omega);
        assert!((got - expected).norm() < 1e-9 * expected.norm().max(1.0), "omega {omega}: {got} vs {expected}");
    }
}

#[test]
fn zero_target_needs_no_control() {
    let gen = generator(100);
    let plan = steer(&State::zeros(gen.grid), 1.5 * gen.cfg.tau0, &gen, SteerOptions::default()).unwrap();
    assert!(plan.control.samples.iter().all(|&u| u == 0.0));
}

#[test]
fn antisymmetric_target_is_dropped() {
    let gen = generator(100);
    let cfg = &gen.cfg;
    let odd = State::from_fields(
        gen.grid,
        |x: f64| 0.01 * x.signum() * (std::f64::consts::PI * (x.abs() - cfg.l) / (cfg.big_l - cfg.l)).cos(),
        |_| 0.0,
        0.0,
        0.0,
        0.0,
    )
    .project_volume();
    let opts = SteerOptions { w_check: control::WCheck { trace: 1.0, smooth: 1.0 }, ..Default::default() };
    let plan = steer(&odd, 1.5 * cfg.tau0, &gen, opts).unwrap();
    assert!(plan.antisymmetric_dropped > 0.9 * norm(&odd, cfg));
    let umax = plan.control.samples.iter().fold(0.0f64, |m, u| m.max(u.abs()));
    assert!(umax < 1e-8, "{umax:e}");
}

#[test]
fn horizon_and_conditioning_gates() {
    let gen = generator(100);
    let target = first_mode(&gen);
    let tau0 = gen.cfg.tau0;
    assert!(matches!(steer(&target, tau0, &gen, SteerOptions::default()), Err(Error::HorizonTooShort { .. })));
    let opts = SteerOptions { cond_limit: 1.0, ..Default::default() };
    assert!(matches!(steer(&target, 1.5 * tau0, &gen, opts), Err(Error::IllConditioned { .. })));
    let opts = SteerOptions { modes: 0, ..Default::default() };
    assert!(matches!(steer(&target, 1.5 * tau0, &gen, opts), Err(Error::Argument(_))));
}

#[test]
fn rough_targets_are_rejected() {
    let gen = generator(100);
    let mut target = first_mode(&gen);
    target.q_left[40] += 1.0;
    let res = steer(&target, 1.5 * gen.cfg.tau0, &gen, SteerOptions::default());
    assert!(matches!(res, Err(Error::TargetNotInW(_))));
}

#[test]
fn steering_is_linear_in_the_target() {
    let gen = generator(100);
    let set = steering_modes(&gen, 6).unwrap();
    let target = first_mode(&gen);
    let tau = 1.5 * gen.cfg.tau0;
    let opts = SteerOptions { modes: 6, ..Default::default() };
    let a = steer_with_modes(&target, tau, &set, opts).unwrap();
    let b = steer_with_modes(&target.scaled(-2.0), tau, &set, opts).unwrap();
    for (x, y) in a.control.samples.iter().zip(&b.control.samples) {
        assert!((y + 2.0 * x).abs() <= 1e-10 * (1.0 + x.abs()));
    }
    assert!(a.modal_error < 1e-4);
}

#[test]
fn moment_solution_hits_every_moment() {
    let omegas = vec![1.35, 2.47, 3.52];
    let b = vec![0.02, -0.015, 0.01];
    let d = vec![Complex64::new(1e-3, 0.0), Complex64::new(0.0, -2e-3), Complex64::new(5e-4, 5e-4)];
    let tau = 6.0;
    let p = MomentProblem::new(tau, omegas.clone(), b.clone(), d.clone()).unwrap();
    let lambda = p.solve().unwrap();
    let dt = 1e-3;
    let u = ControlSignal::from_fn(dt, (tau / dt) as usize, |s| p.control_at(&lambda, s));
    for k in 0..3 {
        let reached = modal_response(&u, tau, omegas[k]) * b[k];
        assert!((reached - d[k]).norm() < 1e-6 * d[k].norm(), "mode {k}");
    }
}

#[test]
fn no_control_reaches_nothing() {
    let gen = generator(100);
    let set = steering_modes(&gen, 4).unwrap();
    let target = first_mode(&gen);
    let tau = 1.5 * gen.cfg.tau0;
    let u = ControlSignal::zero(0.01, (tau / 0.01).round() as usize);
    let rep = verify_reach(&u, &target, tau, &set).unwrap();
    assert!((rep.relative - 1.0).abs() < 1e-12);
}

#[test]
fn decay_fit_recovers_a_power_law() {
    let t: Vec<f64> = (0..=400).map(|i| i as f64 * 0.5).collect();
    let n: Vec<f64> = t.iter().map(|s| 3.0 * (1.0 + s).powf(-0.5)).collect();
    assert!((fit_decay_exponent(&t, &n) - 0.5).abs() < 1e-12);
    let zeros = vec![0.0; t.len()];
    assert_eq!(fit_decay_exponent(&t, &zeros), 0.0);
}

#[test]
fn feedback_dissipates_and_rejects_asymmetry() {
    let gen = generator(100);
    let z0 = first_mode(&gen);
    let (tr, rep) = control::stabilize(&z0, 2.0 * gen.cfg.tau0, &gen, StabilizeOptions::default()).unwrap();
    assert!(rep.monotone);
    assert!(rep.final_norm < rep.initial_norm);
    let lost = tr.energy[0] - tr.energy.last().unwrap();
    assert!(lost > 0.0);

    let (_, rest) = control::stabilize(&State::zeros(gen.grid), 1.0, &gen, StabilizeOptions::default()).unwrap();
    assert_eq!(rest.final_norm, 0.0);

    let mut skew = z0.clone();
    skew.q_left[10] += 0.1;
    let skew = skew.project_volume();
    assert!(matches!(control::stabilize(&skew, 1.0, &gen, StabilizeOptions::default()), Err(Error::NotSymmetric(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn b_is_the_adjoint_of_b_star(u in -5.0f64..5.0, vals in prop::collection::vec(-1.0f64..1.0, 5..30)) {
        let gen = generator(20);
        let mut z = State::zeros(gen.grid);
        let mut it = vals.iter().cycle();
        for v in z.zeta_left.iter_mut().chain(z.q_right.iter_mut()) {
            *v = *it.next().unwrap();
        }
        z.eta = *it.next().unwrap();
        z.delta = *it.next().unwrap();
        let lhs = inner_product(&apply_b(u, gen.grid, &gen.cfg), &z, &gen.cfg).unwrap();
        prop_assert!((lhs - u * b_star(&z)).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
}
