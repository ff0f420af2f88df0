use std::fs;
use std::path::Path;

use floatbody::control::{self, ControlSignal, StabilizeOptions, SteerOptions, WCheck};
use floatbody::linear_sim::{self, DiscreteGenerator, SimOptions};
use floatbody::model::io::{fmt_num, parse_config, read_state_csv, write_meta, write_state_csv};
use floatbody::model::{build_config, Grid, PhysicalConfig, State};
use floatbody::nonlinear_sim::{self, NonlinearOptions, NonlinearState, Physics};
use floatbody::spectral::{self, Branch};

use crate::manifest::Outputs;
use crate::{check, Cli, CliError, Command, InitialArgs};

/// Built-in reference configuration selected by `--config CFG0`.
pub const CFG0_TOML: &str = r#"[fluid]
g = 9.81
rho = 1000.0
h0 = 2.0

[geometry]
l = 1.0
L = 10.0
L_prime = 10.0
h_eq = "flat:1.0"

[grid]
cells = 200
"#;

pub struct Loaded {
    pub text: String,
    pub cfg: PhysicalConfig<f64>,
    pub grid: Grid<f64>,
}

pub fn load(cli: &Cli) -> Result<Loaded, CliError> {
    let text = if cli.config == "CFG0" {
        CFG0_TOML.to_string()
    } else {
        fs::read_to_string(&cli.config).map_err(|e| CliError::Input(format!("cannot read config {}: {e}", cli.config)))?
    };
    let file = parse_config(&text)?;
    let cfg = build_config(&file.raw)?;
    let grid = Grid::new(&cfg, cli.cells.unwrap_or(file.cells))?;
    Ok(Loaded { text, cfg, grid })
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> floatbody::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let loaded = load(cli)?;
    let mut out = Outputs::new(&cli.out)?;
    let (name, params) = match &cli.command {
        Command::Spectrum(a) => {
            spectrum(&loaded, a.count, a.branch.into(), &mut out)?;
            ("spectrum", serde_json::to_value(a))
        }
        Command::Modes(a) => {
            modes(&loaded, a.count, a.branch.into(), a.states, &mut out)?;
            ("modes", serde_json::to_value(a))
        }
        Command::Simulate(a) => {
            simulate(&loaded, a, &mut out)?;
            ("simulate", serde_json::to_value(a))
        }
        Command::Steer(a) => {
            steer(&loaded, a, &mut out)?;
            ("steer", serde_json::to_value(a))
        }
        Command::Stabilize(a) => {
            stabilize(&loaded, a, &mut out)?;
            ("stabilize", serde_json::to_value(a))
        }
        Command::Check(a) => {
            let ok = check::run(&loaded, a, &mut out)?;
            let params = serde_json::to_value(a).map_err(|e| CliError::Input(e.to_string()))?;
            out.finish("check", &loaded.text, with_grid(params, &loaded))?;
            return Ok(if ok { 0 } else { 1 });
        }
    };
    let params = params.map_err(|e| CliError::Input(e.to_string()))?;
    out.finish(name, &loaded.text, with_grid(params, &loaded))?;
    Ok(0)
}

fn with_grid(mut params: serde_json::Value, l: &Loaded) -> serde_json::Value {
    if let Some(m) = params.as_object_mut() {
        m.insert("cells_left".into(), l.grid.cells_left.into());
        m.insert("cells_right".into(), l.grid.cells_right.into());
    }
    params
}

fn spectrum(l: &Loaded, count: usize, branch: Branch, out: &mut Outputs) -> Result<(), CliError> {
    let cfg = &l.cfg;
    let roots = spectral::find_eigenvalues(cfg, count, branch)?;
    let modes = spectral::compute_modes(cfg, count, branch)?;
    let mut csv = String::from("k,omega,gap,K1,K2,gamma,residual\n");
    for (i, m) in modes.iter().enumerate() {
        let gap = modes.get(i + 1).map(|n| fmt_num(n.omega - m.omega)).unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i + 1,
            fmt_num(m.omega),
            gap,
            fmt_num(m.k1),
            fmt_num(m.k2),
            fmt_num(m.gamma),
            fmt_num(roots.relative_residuals[i])
        ));
    }
    out.write("spectrum.csv", csv.as_bytes())?;
    let gaps = spectral::gap_statistics(&roots.omegas, cfg);
    let resonance = spectral::detect_resonance(cfg);
    let report = serde_json::json!({
        "branch": format!("{branch:?}").to_lowercase(),
        "omegas": roots.omegas,
        "scanned": roots.scanned,
        "scan_step": roots.step,
        "gaps": gaps,
        "resonance": resonance,
        "tau0": cfg.tau0,
        "m": cfg.m,
        "m_bar": cfg.m_bar,
        "alpha_bar": cfg.alpha_bar,
        "kappa": cfg.kappa,
        "asymptotic_gap": std::f64::consts::PI * cfg.wave_speed() / (cfg.big_l - cfg.l),
    });
    out.write_json("spectrum.json", &report)
}

fn modes(l: &Loaded, count: usize, branch: Branch, states: bool, out: &mut Outputs) -> Result<(), CliError> {
    let modes = spectral::compute_modes(&l.cfg, count, branch)?;
    let authority = control::modal_authority(&modes);
    let gen = DiscreteGenerator::new(&l.cfg, l.grid)?;
    let mut csv = String::from("k,omega,K1,K2,gamma,gamma_quadrature,c,a_imag,b,authority,eigen_residual\n");
    for m in &modes {
        let (re, im) = m.sample(l.grid);
        let res = spectral::eigen_residual(&gen, m.omega, &re, &im)?;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            m.k_index,
            fmt_num(m.omega),
            fmt_num(m.k1),
            fmt_num(m.k2),
            fmt_num(m.gamma),
            fmt_num(m.gamma_quadrature),
            fmt_num(m.gamma * m.c),
            fmt_num(m.gamma * m.a_imag),
            fmt_num(m.gamma * m.b),
            fmt_num(m.authority()),
            fmt_num(res)
        ));
        if states {
            out.write(&format!("mode_{}_re.csv", m.k_index), &csv_bytes(|b| write_state_csv(&re, b))?)?;
            out.write(&format!("mode_{}_im.csv", m.k_index), &csv_bytes(|b| write_state_csv(&im, b))?)?;
        }
    }
    out.write("modes.csv", csv.as_bytes())?;
    out.write_json("authority.json", &authority)
}

/// Initial state from a CSV file or a sum of symmetric mode real parts.
fn initial_state(l: &Loaded, init: &InitialArgs) -> Result<State<f64>, CliError> {
    if let Some(p) = &init.initial {
        let z: State<f64> = read_state_csv(&read_text(p)?)?;
        if z.grid != l.grid {
            return Err(CliError::Lib(floatbody::Error::GridMismatch));
        }
        return Ok(z);
    }
    mode_sum(l, &init.init_modes)
}

fn mode_sum(l: &Loaded, indices: &[usize]) -> Result<State<f64>, CliError> {
    let mut z = State::zeros(l.grid);
    if indices.is_empty() {
        return Ok(z);
    }
    if indices.contains(&0) {
        return Err(CliError::Input("mode indices are 1-based".into()));
    }
    let count = indices.iter().copied().max().unwrap_or(1);
    let modes = spectral::compute_modes(&l.cfg, count, Branch::Symmetric)?;
    for &k in indices {
        let (re, _) = modes[k - 1].sample(l.grid);
        z = z.add_scaled(1.0, &re)?;
    }
    Ok(z)
}

fn control_signal(path: Option<&Path>, dt: f64, t_final: f64) -> Result<ControlSignal<f64>, CliError> {
    match path {
        Some(p) => Ok(ControlSignal::read_csv(&read_text(p)?)?),
        None => Ok(ControlSignal::zero(dt, (t_final / dt).ceil().max(1.0) as usize)),
    }
}

fn simulate(l: &Loaded, a: &crate::SimulateArgs, out: &mut Outputs) -> Result<(), CliError> {
    let cfg = &l.cfg;
    let z0 = initial_state(l, &a.init)?;
    let t_final = a.t_final.unwrap_or(cfg.tau0);
    if a.nonlinear {
        let s0 = NonlinearState::from_linear(&z0, cfg)?;
        let dt = match a.dt {
            Some(d) => d,
            None => nonlinear_sim::default_nonlinear_dt(&s0, cfg, Physics::Nonlinear, a.cfl)?,
        };
        let u = control_signal(a.control.as_deref(), dt, t_final)?;
        let opts = NonlinearOptions {
            physics: Physics::Nonlinear,
            cfl: a.cfl,
            dt: Some(dt),
            snapshot_every: a.snapshot_every,
            shock_ratio: a.tol_shock,
        };
        let tr = nonlinear_sim::simulate_nonlinear(&s0, &u, t_final, cfg, opts)?;
        let mut csv = String::new();
        write_meta(&mut csv_sink(&mut csv), &[("kind", "ledger".into()), ("solver", "nonlinear".into())])?;
        csv.push_str("t,u,energy,work,volume\n");
        for i in 0..tr.times.len() {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt_num(tr.times[i]),
                fmt_num(tr.controls[i]),
                fmt_num(tr.energy[i]),
                fmt_num(tr.work[i]),
                fmt_num(tr.volume[i])
            ));
        }
        out.write("ledger.csv", csv.as_bytes())?;
        let mut files = Vec::new();
        for (n, s) in &tr.snapshots {
            let name = format!("snapshot_{n:08}.csv");
            out.write(&name, &csv_bytes(|b| write_state_csv(&s.to_linear(cfg), b))?)?;
            files.push(name);
        }
        if a.pressure {
            let u_end = *tr.controls.last().unwrap_or(&0.0);
            let p = nonlinear_sim::reconstruct_interior_pressure(&tr.final_state, u_end, cfg, 4 * l.grid.cells_left)?;
            let mut csv = String::from("x,pi,p\n");
            for i in 0..p.x.len() {
                csv.push_str(&format!("{},{},{}\n", fmt_num(p.x[i]), fmt_num(p.pi[i]), fmt_num(p.p[i])));
            }
            out.write("pressure.csv", csv.as_bytes())?;
            out.write_json(
                "pressure.json",
                &serde_json::json!({
                    "delta_ddot": p.delta_ddot, "force": p.force, "newton_residual": p.newton_residual
                }),
            )?;
        }
        let report = serde_json::json!({
            "solver": "nonlinear",
            "dt": tr.dt,
            "steps": tr.times.len() - 1,
            "t_final": t_final,
            "initial_energy": tr.energy[0],
            "final_energy": tr.energy.last(),
            "final_work": tr.work.last(),
            "max_volume_defect": tr.max_volume_defect,
            "snapshots": files,
        });
        return out.write_json("trajectory.json", &report);
    }
    let gen = DiscreteGenerator::new(cfg, l.grid)?;
    let dt = a.dt.unwrap_or_else(|| linear_sim::default_dt(&gen));
    let u = control_signal(a.control.as_deref(), dt, t_final)?;
    let tr = linear_sim::simulate(&z0, &u, t_final, &gen, SimOptions { dt, snapshot_every: a.snapshot_every })?;
    let mut csv = String::new();
    write_meta(&mut csv_sink(&mut csv), &[("kind", "ledger".into()), ("solver", "linear".into())])?;
    csv.push_str("t,u,energy,work\n");
    for i in 0..tr.times.len() {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_num(tr.times[i]),
            fmt_num(tr.controls[i]),
            fmt_num(tr.energy[i]),
            fmt_num(tr.work[i])
        ));
    }
    out.write("ledger.csv", csv.as_bytes())?;
    let mut files = Vec::new();
    for (n, s) in &tr.snapshots {
        let name = format!("snapshot_{n:08}.csv");
        out.write(&name, &csv_bytes(|b| write_state_csv(s, b))?)?;
        files.push(name);
    }
    let report = serde_json::json!({
        "solver": "linear",
        "dt": tr.dt,
        "steps": tr.times.len() - 1,
        "t_final": t_final,
        "energy_offset": tr.energy_offset,
        "initial_energy": tr.energy[0],
        "final_energy": tr.energy.last(),
        "final_work": tr.work.last(),
        "max_balance_error": tr.max_balance_error,
        "max_volume_defect": tr.max_volume_defect,
        "snapshots": files,
    });
    out.write_json("trajectory.json", &report)
}

/// Adapter so `write_meta` can append to a String.
fn csv_sink(s: &mut String) -> StringSink<'_> {
    StringSink(s)
}

struct StringSink<'a>(&'a mut String);

impl std::io::Write for StringSink<'_> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.push_str(&String::from_utf8_lossy(buf));
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

fn steer(l: &Loaded, a: &crate::SteerArgs, out: &mut Outputs) -> Result<(), CliError> {
    let cfg = &l.cfg;
    cfg.require_symmetric()?;
    let tau = a.tau.unwrap_or(1.5 * cfg.tau0);
    let target = match &a.target {
        Some(p) => {
            let z: State<f64> = read_state_csv(&read_text(p)?)?;
            if z.grid != l.grid {
                return Err(CliError::Lib(floatbody::Error::GridMismatch));
            }
            z
        }
        None => mode_sum(l, &[a.target_mode])?,
    };
    let gen = DiscreteGenerator::new(cfg, l.grid)?;
    let opts = SteerOptions {
        modes: a.modes,
        cond_limit: a.tol_cond,
        dt: a.dt,
        w_check: WCheck { trace: a.tol_trace, smooth: a.tol_smooth },
    };
    if !(tau > cfg.tau0) {
        return Err(floatbody::Error::HorizonTooShort { tau, tau0: cfg.tau0 }.into());
    }
    let set = control::steering_modes(&gen, a.modes)?;
    let plan = control::steer_with_modes(&target, tau, &set, opts)?;
    out.write("control.csv", &csv_bytes(|b| plan.control.write_csv(b))?)?;
    let verification = if a.no_verify {
        serde_json::Value::Null
    } else {
        let rep = control::verify_reach(&plan.control, &target, tau, &set)?;
        serde_json::json!({
            "absolute": rep.absolute,
            "relative": rep.relative,
            "per_mode": rep.per_mode,
            "antisymmetric_norm": rep.antisymmetric_norm,
        })
    };
    let report = serde_json::json!({
        "tau": tau,
        "tau0": cfg.tau0,
        "modes": a.modes,
        "omegas": plan.omegas,
        "couplings": plan.couplings,
        "target_re": plan.target_re,
        "target_im": plan.target_im,
        "condition": plan.condition,
        "modal_defect": plan.modal_defect,
        "target_norm": plan.target_norm,
        "antisymmetric_dropped": plan.antisymmetric_dropped,
        "modal_error": plan.modal_error,
        "control_l2": plan.control.l2_norm(),
        "verification": verification,
    });
    out.write_json("steer.json", &report)
}

fn stabilize(l: &Loaded, a: &crate::StabilizeArgs, out: &mut Outputs) -> Result<(), CliError> {
    let cfg = &l.cfg;
    let z0 = initial_state(l, &a.init)?;
    let t_final = a.t_final.unwrap_or(50.0 * cfg.tau0);
    let gen = DiscreteGenerator::new(cfg, l.grid)?;
    let opts = StabilizeOptions { dt: a.dt, require_symmetric: !a.allow_asymmetric, record_every: a.record_every };
    let (tr, rep) = control::stabilize(&z0, t_final, &gen, opts)?;
    let mut csv = String::from("t,norm\n");
    for (t, n) in rep.times.iter().zip(&rep.norms) {
        csv.push_str(&format!("{},{}\n", fmt_num(*t), fmt_num(*n)));
    }
    out.write("decay.csv", csv.as_bytes())?;
    let report = serde_json::json!({
        "t_final": t_final,
        "dt": tr.dt,
        "exponent": rep.exponent,
        "monotone": rep.monotone,
        "max_increase": rep.max_increase,
        "initial_norm": rep.initial_norm,
        "final_norm": rep.final_norm,
    });
    out.write_json("stabilize.json", &report)
}
