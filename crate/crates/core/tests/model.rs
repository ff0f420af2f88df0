use floatbody::model::io::{parse_config, read_state_csv, state_from_json, state_to_json, write_state_csv};
use floatbody::model::{
    antisymmetric_norm, build_config, inner_product, norm, project_symmetric, Grid, HeqProfile, RawConfig, Side, State,
};
use floatbody::Error;
use proptest::prelude::*;

fn cfg0() -> floatbody::Config {
    build_config(&RawConfig::<f64>::reference()).unwrap()
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
    z
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 7..40)
}

#[test]
fn reference_file_parses() {
    let text = include_str!("../../../configs/cfg0.toml");
    let file = parse_config(text).unwrap();
    assert_eq!(file.raw, RawConfig::reference());
    assert_eq!(file.cells, 200);
}

#[test]
fn unknown_keys_are_rejected() {
    let text = "[fluid]\ng = 9.81\nrho = 1000.0\nh0 = 2.0\nviscosity = 1.0\n[geometry]\nl = 1.0\nL = 10.0\nL_prime = 10.0\nh_eq = \"flat:1.0\"\n";
    assert!(matches!(parse_config(text), Err(Error::Parse(_))));
}

#[test]
fn sampled_profile_from_toml() {
    let text =
        "[fluid]\ng = 9.81\nrho = 1000.0\nh0 = 2.0\n[geometry]\nl = 1.0\nL = 10.0\nL_prime = 10.0\nh_eq = [1.0, 0.8, 1.0]\n";
    let file = parse_config(text).unwrap();
    assert_eq!(file.raw.h_eq, HeqProfile::Sampled(vec![1.0, 0.8, 1.0]));
    let cfg = build_config(&file.raw).unwrap();
    // m = rho * int (2 - h_eq), h_eq linear from 1 to 0.8 and back.
    assert!((cfg.m - 1000.0 * (2.0 * 2.0 - 1.8)).abs() < 1e-9);
}

#[test]
fn unequal_tank_keeps_spacing() {
    let mut raw = RawConfig::reference();
    raw.l_prime = 19.0;
    let cfg = build_config(&raw).unwrap();
    let grid = Grid::new(&cfg, 90).unwrap();
    assert_eq!(grid.cells_right, 180);
    assert!((grid.spacing(Side::Left) - grid.spacing(Side::Right)).abs() < 1e-14);
    assert!(!grid.is_mirror());
}

#[test]
fn csv_and_json_round_trip() {
    let cfg = cfg0();
    let grid = Grid::new(&cfg, 20).unwrap();
    let z = state_from(grid, &[0.1, -0.25, 1.0 / 3.0, 2e-7, -5.5]);
    let mut buf = Vec::new();
    write_state_csv(&z, &mut buf).unwrap();
    let back: State<f64> = read_state_csv(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back, z);
    let back: State<f64> = state_from_json(&state_to_json(&z).unwrap()).unwrap();
    assert_eq!(back, z);
}

#[test]
fn grid_mismatch_is_reported() {
    let cfg = cfg0();
    let a = State::zeros(Grid::new(&cfg, 20).unwrap());
    let b = State::zeros(Grid::new(&cfg, 40).unwrap());
    assert!(matches!(inner_product(&a, &b, &cfg), Err(Error::GridMismatch)));
}

#[test]
fn norm_of_heave_only_state() {
    // delta = 1 alone: rho g l delta^2.
    let cfg = cfg0();
    let mut z = State::zeros(Grid::new(&cfg, 20).unwrap());
    z.delta = 1.0;
    assert!((norm(&z, &cfg).powi(2) - 1000.0 * 9.81).abs() < 1e-9);
}

proptest! {
    #[test]
    fn inner_product_symmetric_and_positive(a in values(), b in values()) {
        let cfg = cfg0();
        let grid = Grid::new(&cfg, 12).unwrap();
        let (x, y) = (state_from(grid, &a), state_from(grid, &b));
        let xy = inner_product(&x, &y, &cfg).unwrap();
        let yx = inner_product(&y, &x, &cfg).unwrap();
        prop_assert!((xy - yx).abs() <= 1e-12 * (1.0 + xy.abs()));
        prop_assert!(inner_product(&x, &x, &cfg).unwrap() >= 0.0);
    }

    #[test]
    fn volume_projection_is_idempotent(a in values()) {
        let cfg = cfg0();
        let z = state_from(Grid::new(&cfg, 12).unwrap(), &a);
        let p = z.project_volume();
        prop_assert!(p.satisfies_volume());
        let pp = p.project_volume();
        prop_assert!(pp.sub(&p).unwrap().max_abs() <= 1e-14);
    }

    #[test]
    fn mirror_is_an_involution(a in values()) {
        let cfg = cfg0();
        let z = state_from(Grid::new(&cfg, 12).unwrap(), &a);
        let back = z.mirror().unwrap().mirror().unwrap();
        prop_assert!(back.sub(&z).unwrap().max_abs() == 0.0);
    }

    #[test]
    fn symmetric_projection(a in values()) {
        let cfg = cfg0();
        let z = state_from(Grid::new(&cfg, 12).unwrap(), &a);
        let s = project_symmetric(&z).unwrap();
        prop_assert!(antisymmetric_norm(&s, &cfg).unwrap() <= 1e-12 * (1.0 + norm(&z, &cfg)));
        // Orthogonal split: |z|^2 = |s|^2 + |z - s|^2.
        let rest = z.sub(&s).unwrap();
        let lhs = norm(&z, &cfg).powi(2);
        let rhs = norm(&s, &cfg).powi(2) + norm(&rest, &cfg).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs));
    }
}
