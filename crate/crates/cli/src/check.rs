use floatbody::control::{self, ControlSignal, SteerOptions};
use floatbody::linear_sim::{self, DiscreteGenerator, ModeSet, SimOptions};
use floatbody::model::{inner_product, norm, State};
use floatbody::nonlinear_sim::{self, NonlinearOptions, NonlinearState};
use floatbody::spectral::{self, Branch};
use floatbody::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::Loaded;
use crate::manifest::Outputs;
use crate::{CheckArgs, CliError};

#[derive(Debug, Serialize)]
struct Row {
    name: &'static str,
    passed: bool,
    value: f64,
    limit: f64,
    note: String,
}

fn row(name: &'static str, value: f64, limit: f64, passed: bool, note: impl Into<String>) -> Row {
    Row { name, passed, value, limit, note: note.into() }
}

fn random_state(gen: &DiscreteGenerator<f64>, rng: &mut ChaCha8Rng) -> State<f64> {
    let mut z = State::zeros(gen.grid);
    for v in z.zeta_left.iter_mut().chain(z.zeta_right.iter_mut()).chain(z.q_left.iter_mut()).chain(z.q_right.iter_mut()) {
        *v = rng.gen_range(-1.0..1.0);
    }
    z.q_i_avg = rng.gen_range(-1.0..1.0);
    z.delta = rng.gen_range(-1.0..1.0);
    z.eta = rng.gen_range(-1.0..1.0);
    z.project_volume()
}

/// Runs the invariant suite; returns whether every row passed.
pub fn run(l: &Loaded, a: &CheckArgs, out: &mut Outputs) -> std::result::Result<bool, CliError> {
    let rows = suite(l, a)?;
    let mut ok = true;
    println!("{:<28} {:>6} {:>12} {:>12}  note", "check", "result", "value", "limit");
    for r in &rows {
        ok &= r.passed;
        println!(
            "{:<28} {:>6} {:>12.3e} {:>12.3e}  {}",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.value,
            r.limit,
            r.note
        );
    }
    out.write_json("check.json", &rows)?;
    Ok(ok)
}

fn suite(l: &Loaded, a: &CheckArgs) -> Result<Vec<Row>> {
    let cfg = &l.cfg;
    let gen = DiscreteGenerator::new(cfg, l.grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rows = Vec::new();

    let mut worst = 0.0f64;
    for _ in 0..20 {
        let z = random_state(&gen, &mut rng);
        let az = gen.apply(&z)?;
        worst = worst.max(inner_product(&az, &z, cfg)?.abs() / (norm(&az, cfg) * norm(&z, cfg)));
    }
    rows.push(row("skew_symmetry", worst, a.tol_skew, worst <= a.tol_skew, "20 random states"));

    let branch = if cfg.is_symmetric() { Branch::Symmetric } else { Branch::General };
    let roots = spectral::find_eigenvalues(cfg, a.count, branch)?;
    let worst = roots.relative_residuals.iter().copied().fold(0.0, f64::max);
    rows.push(row("root_residuals", worst, spectral::ROOT_TOL, worst <= spectral::ROOT_TOL, format!("{:?} branch", branch)));

    let modes = spectral::compute_modes(cfg, a.count.min(8), branch)?;
    let worst = modes.iter().map(|m| ((m.gamma - m.gamma_quadrature) / m.gamma).abs()).fold(0.0, f64::max);
    rows.push(row("normalization", worst, 1e-6, worst <= 1e-6, "closed form vs quadrature"));

    let mut orders: Vec<f64> = Vec::new();
    for m in modes.iter().take(3) {
        let r1 = spectral::verify_eigenpair(m, cfg, 50)?;
        let r2 = spectral::verify_eigenpair(m, cfg, 100)?;
        orders.push((r1 / r2).log2());
    }
    let worst = orders.iter().map(|p| (p - 2.0).abs()).fold(0.0, f64::max);
    rows.push(row("eigenresidual_order", worst, 0.2, worst <= 0.2, format!("observed orders {orders:.3?}")));

    let set = ModeSet::refine(&gen, &modes)?;
    let dev = set.gram_deviation();
    rows.push(row("modal_orthonormality", dev, a.tol_ortho, dev <= a.tol_ortho, format!("{} discrete modes", set.len())));

    let z0 = random_state(&gen, &mut rng);
    let dt = linear_sim::default_dt(&gen);
    let steps = 1000;
    let tr = linear_sim::simulate(
        &z0,
        &ControlSignal::zero(dt, steps),
        dt * steps as f64,
        &gen,
        SimOptions { dt, snapshot_every: 0 },
    )?;
    let drift = tr.energy.iter().map(|e| ((e - tr.energy[0]) / tr.energy[0]).abs()).fold(0.0, f64::max);
    rows.push(row("norm_conservation", drift, a.tol_energy, drift <= a.tol_energy, "1000 implicit midpoint steps"));

    let u = ControlSignal::from_fn(dt, steps, |t: f64| t.sin());
    let tr = linear_sim::simulate(&State::zeros(gen.grid), &u, dt * steps as f64, &gen, SimOptions { dt, snapshot_every: 0 })?;
    let emax = tr.energy.iter().copied().fold(0.0, f64::max);
    let bal = tr.max_balance_error / emax;
    rows.push(row("energy_work_balance", bal, 1e-6, bal <= 1e-6, "u = sin t"));

    let z = random_state(&gen, &mut rng);
    let bu = control::apply_b(0.7, gen.grid, cfg);
    let lhs = inner_product(&bu, &z, cfg)?;
    let rhs = 0.7 * control::b_star(&z);
    let err = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
    rows.push(row("adjoint_identity", err, 1e-12, err <= 1e-12, "<Bu, z> = u B*z"));

    let rest = NonlinearState::at_rest(gen.grid, cfg);
    let tr =
        nonlinear_sim::simulate_nonlinear(&rest, &ControlSignal::zero(1.0, 1), 0.2 * cfg.tau0, cfg, NonlinearOptions::default())?;
    let dev = nonlinear_sim::perturbation_distance(&tr.final_state, &rest, cfg)?;
    rows.push(row("lake_at_rest", dev, 0.0, dev == 0.0, "nonlinear solver"));

    let smooth = State::from_fields(
        gen.grid,
        |x: f64| 1e-3 * (x * std::f64::consts::PI / (cfg.big_l - cfg.l)).cos(),
        |_| 0.0,
        0.0,
        0.0,
        0.0,
    )
    .project_volume();
    let s0 = NonlinearState::from_linear(&smooth, cfg)?;
    let tr =
        nonlinear_sim::simulate_nonlinear(&s0, &ControlSignal::zero(1.0, 1), 0.2 * cfg.tau0, cfg, NonlinearOptions::default())?;
    rows.push(row("volume_conservation", tr.max_volume_defect, 1e-10, tr.max_volume_defect <= 1e-10, "nonlinear solver"));

    let p = nonlinear_sim::reconstruct_interior_pressure(&rest, 0.0, cfg, 64)?;
    let err = ((p.force - cfg.m * cfg.g) / (cfg.m * cfg.g)).abs();
    rows.push(row("archimedes", err, 1e-10, err <= 1e-10, "int P_i = m g at rest"));

    if cfg.is_symmetric() {
        let auth = control::modal_authority(&spectral::compute_modes(cfg, a.count, Branch::Symmetric)?);
        rows.push(row("modal_authority", auth.min_scaled, 0.0, auth.min_scaled > 0.0, "min k |B* phi_k|"));
        let target = modes[0].sample(gen.grid).0;
        let plan = control::steer_with_modes(&target, 1.5 * cfg.tau0, &set, SteerOptions::default())?;
        rows.push(row("steering_modal_error", plan.modal_error, 1e-4, plan.modal_error <= 1e-4, "target Re phi_1"));
    }
    Ok(rows)
}
