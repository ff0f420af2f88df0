use floatbody::control::{apply_b, ControlSignal};
use floatbody::linear_sim::{self, rk4_step, simulate, step, CnStepper, DiscreteGenerator, ModeSet, SimOptions};
use floatbody::model::{antisymmetric_norm, build_config, inner_product, norm, Grid, RawConfig, State};
use floatbody::spectral::{compute_modes, Branch};
use floatbody::{Config, Error};
use num_complex::Complex64;
use proptest::prelude::*;

fn cfg0() -> Config {
    build_config(&RawConfig::<f64>::reference()).unwrap()
}

fn generator(cells: usize) -> DiscreteGenerator<f64> {
    let cfg = cfg0();
    let grid = Grid::new(&cfg, cells).unwrap();
    DiscreteGenerator::new(&cfg, grid).unwrap()
}

fn state_from(grid: Grid<f64>, vals: &[f64]) -> State<f64> {
    let mut z = State::zeros(grid);
    let mut it = vals.iter().cycle();
    for v in z.zeta_left.iter_mut().chain(z.q_left.iter_mut()).chain(z.zeta_right.iter_mut()).chain(z.q_right.iter_mut()) {
        *v = *it.next().unwrap();
    }
    z.q_i_avg = *it.next().unwrap();
    z.delta = *it.next().unwrap();
    z.eta = *it.next().unwrap();
    z.project_volume()
}

fn smooth_state(grid: Grid<f64>) -> State<f64> {
    State::from_fields(grid, |x: f64| 0.01 * (0.3 * x).cos(), |x: f64| 0.02 * (0.5 * x).sin(), 0.01, 0.002, -0.003)
        .project_volume()
}

fn mode_set(gen: &DiscreteGenerator<f64>, count: usize) -> ModeSet<f64> {
    let seeds = compute_modes(&gen.cfg, count, Branch::Symmetric).unwrap();
    ModeSet::refine(gen, &seeds).unwrap()
}

#[test]
fn volume_vector_is_in_the_kernel() {
    let gen = generator(40);
    let e = State::from_fields(gen.grid, |_| 1.0, |_| 0.0, 0.0, 1.0, 0.0);
    assert!(gen.apply(&e).unwrap().max_abs() < 1e-12);
}

#[test]
fn forcing_enters_through_b() {
    let gen = generator(40);
    let z = smooth_state(gen.grid);
    let diff = gen.apply_forced(&z, 0.7).unwrap().sub(&gen.apply(&z).unwrap()).unwrap();
    let bu = apply_b(0.7, gen.grid, &gen.cfg);
    assert!(diff.sub(&bu).unwrap().max_abs() < 1e-15);
    // <Bu, z> = u * eta / 2 with the energy weight M_bar/2 on eta.
    let expected = 0.7 / gen.cfg.m_bar;
    assert!((bu.eta - expected).abs() < 1e-15);
}

#[test]
fn cn_rotates_an_eigenvector_by_the_cayley_angle() {
    let gen = generator(100);
    let set = mode_set(&gen, 3);
    let dt = 0.05;
    for k in 0..3 {
        let (re, im) = set.mode_state(k);
        let theta = 2.0 * (set.omegas[k] * dt / 2.0).atan();
        let next = step(&re, 0.0, 0.0, dt, &gen).unwrap();
        let expected = re.scaled(theta.cos()).add_scaled(-theta.sin(), &im).unwrap();
        let err = norm(&next.sub(&expected).unwrap(), &gen.cfg);
        assert!(err < 1e-9, "mode {k}: {err:e}");
    }
}

#[test]
fn decompose_inverts_synthesize() {
    let gen = generator(100);
    let set = mode_set(&gen, 5);
    let coeffs: Vec<Complex64> = (0..5).map(|k| Complex64::new(0.3 * k as f64 - 0.5, 0.1 + 0.2 * k as f64)).collect();
    let z = set.synthesize(&coeffs, 0.0).unwrap();
    let back = set.decompose(&z).unwrap();
    for (a, b) in coeffs.iter().zip(&back) {
        assert!((a - b).norm() < 1e-10, "{a} vs {b}");
    }
    let zero = set.decompose(&State::zeros(gen.grid)).unwrap();
    assert!(zero.iter().all(|c| c.norm() == 0.0));
}

#[test]
fn modal_evolution_matches_cn_to_second_order() {
    let gen = generator(100);
    let set = mode_set(&gen, 3);
    let coeffs = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5), Complex64::new(-0.25, 0.25)];
    let z0 = set.synthesize(&coeffs, 0.0).unwrap();
    let t = 2.0;
    let errs: Vec<f64> = [0.02, 0.01]
        .iter()
        .map(|&dt| {
            let steps = (t / dt) as usize;
            let tr = simulate(&z0, &ControlSignal::zero(dt, steps), t, &gen, SimOptions { dt, snapshot_every: 0 }).unwrap();
            norm(&tr.final_state.sub(&set.synthesize(&coeffs, t).unwrap()).unwrap(), &gen.cfg)
        })
        .collect();
    assert!(((errs[0] / errs[1]).log2() - 2.0).abs() < 0.1, "{errs:?}");
}

#[test]
fn constant_push_from_rest() {
    // Short-time Taylor oracle: eta grows like u t / M_bar until radiation
    // damping (rate of order one) bends it.
    let gen = generator(100);
    let dt = 1e-5;
    let steps = 100;
    let u = ControlSignal::from_fn(dt, steps, |_| 1.0);
    let tr = simulate(&State::zeros(gen.grid), &u, dt * steps as f64, &gen, SimOptions { dt, snapshot_every: 0 }).unwrap();
    let expected = 1e-3 / gen.cfg.m_bar;
    assert!(((tr.final_state.eta - expected) / expected).abs() < 1e-3, "{} vs {expected}", tr.final_state.eta);
}

#[test]
fn cn_and_rk4_agree_on_smooth_data() {
    let gen = generator(100);
    let z = smooth_state(gen.grid);
    let dt = 1e-4;
    let a = step(&z, 0.3, 0.4, dt, &gen).unwrap();
    let b = rk4_step(&z, 0.3, 0.4, dt, &gen).unwrap();
    let rel = norm(&a.sub(&b).unwrap(), &gen.cfg) / norm(&z, &gen.cfg);
    assert!(rel < 1e-7, "{rel:e}");
}

#[test]
fn bad_time_step_is_rejected() {
    let gen = generator(40);
    assert!(matches!(CnStepper::new(&gen, 0.0, false), Err(Error::TimeStep(_))));
    assert!(matches!(CnStepper::new(&gen, -1.0, false), Err(Error::TimeStep(_))));
}

#[test]
fn default_dt_is_stable_and_small() {
    let gen = generator(200);
    let dt = linear_sim::default_dt(&gen);
    assert!(dt > 0.0 && dt < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generator_is_skew(vals in prop::collection::vec(-1.0f64..1.0, 7..60)) {
        let gen = generator(30);
        let z = state_from(gen.grid, &vals);
        let az = gen.apply(&z).unwrap();
        let form = inner_product(&az, &z, &gen.cfg).unwrap();
        prop_assert!(form.abs() <= 1e-12 * norm(&az, &gen.cfg) * norm(&z, &gen.cfg) + 1e-300);
    }

    #[test]
    fn free_steps_preserve_the_norm(vals in prop::collection::vec(-1.0f64..1.0, 7..60), dt in 1e-4f64..0.5) {
        let gen = generator(30);
        let z = state_from(gen.grid, &vals);
        let next = step(&z, 0.0, 0.0, dt, &gen).unwrap();
        let (a, b) = (norm(&z, &gen.cfg), norm(&next, &gen.cfg));
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!(next.satisfies_volume());
    }

    #[test]
    fn controls_only_reach_symmetric_states(amps in prop::collection::vec(-10.0f64..10.0, 1..6)) {
        let gen = generator(40);
        let dt = 0.01;
        let steps = 300;
        let u = ControlSignal::from_fn(dt, steps, |t: f64| {
            amps.iter().enumerate().map(|(j, a)| a * ((j as f64 + 0.5) * t).cos()).sum::<f64>()
        });
        let tr = simulate(&State::zeros(gen.grid), &u, dt * steps as f64, &gen, SimOptions { dt, snapshot_every: 0 }).unwrap();
        let z = tr.final_state;
        prop_assert!(antisymmetric_norm(&z, &gen.cfg).unwrap() <= 1e-12 * norm(&z, &gen.cfg) + 1e-300);
    }
}
