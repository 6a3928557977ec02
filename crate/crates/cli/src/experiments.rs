use crate::config::{Experiment, RunConfig};
use crate::output::Artifacts;
use holeqd::circuit::{self, AnglePolicy, Circuit, QdArrayTopology, RunOptions};
use holeqd::gate::{self, FitWindow, GateParams};
use holeqd::kp::{self, MassOptions};
use holeqd::qtm;
use holeqd::{dqd, Exec};
use serde_json::json;

/// Failure inside a compute module, tagged with where it happened.
#[derive(Debug)]
pub struct ComputeError {
    pub module: &'static str,
    pub operation: &'static str,
    pub message: String,
}

impl std::fmt::Display for ComputeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}::{}: {}", self.module, self.operation, self.message)
    }
}

pub type Outcome<T> = std::result::Result<T, ComputeError>;

trait Context<T> {
    fn at(self, module: &'static str, operation: &'static str) -> Outcome<T>;
}

impl<T, E: std::fmt::Display> Context<T> for std::result::Result<T, E> {
    fn at(self, module: &'static str, operation: &'static str) -> Outcome<T> {
        self.map_err(|e| ComputeError {
            module,
            operation,
            message: e.to_string(),
        })
    }
}

fn io<T>(r: std::io::Result<T>) -> Outcome<T> {
    r.at("cli", "write")
}

const EXEC: Exec = Exec::Parallel;

pub fn run(exp: Experiment, cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    match exp {
        Experiment::Bands => bands(cfg, out),
        Experiment::MassVsAngle => mass_vs_angle(cfg, out),
        Experiment::DqdSweep => dqd_sweep(cfg, out),
        Experiment::WkbFit => wkb_fit(cfg, out),
        Experiment::ExchangeVsVbg => exchange_vs_vbg(cfg, out),
        Experiment::GateTime => gate_time(cfg, out),
        Experiment::Variability => variability(cfg, out),
        Experiment::Oscillation => oscillation(cfg, out),
        Experiment::AnsatzFidelity => ansatz_fidelity(cfg, out),
    }
}

fn bands(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let b = &cfg.bands;
    let t = b.theta_deg.to_radians();
    let d = kp::dispersion_sweep(&cfg.structure.profile(), (t.cos(), t.sin()), b.k_max_invnm, b.n_k, b.n_states, EXEC)
        .at("kp", "dispersion_sweep")?;
    let mut header = vec!["k_invnm".to_string()];
    header.extend((0..b.n_states).map(|s| format!("E_eV_band{s}")));
    let rows = d.k.iter().zip(&d.energies).map(|(k, e)| {
        let mut r = vec![*k];
        r.extend(e);
        r
    });
    io(out.csv("bands.csv", &header, rows))
}

fn mass_options(cfg: &RunConfig) -> MassOptions {
    MassOptions {
        fit_window: cfg.mass.fit_window_invnm,
        n_k: cfg.mass.n_k,
        n_states: cfg.mass.n_states,
        exec: EXEC,
    }
}

fn mass_vs_angle(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let t = kp::mass_vs_angle(&cfg.structure.profile(), cfg.mass.n_angles, &mass_options(cfg)).at("kp", "mass_vs_angle")?;
    io(out.csv(
        "mass_vs_angle.csv",
        &["theta_deg", "mstar_over_m0"],
        t.theta_deg.iter().zip(&t.mass).map(|(a, m)| vec![*a, *m]),
    ))?;
    io(out.json("mass_summary.json", &json!({ "anisotropy": t.anisotropy, "mass_100": t.mass[0] })))
}

fn write_sweep(rows: &[dqd::SweepRow], out: &mut Artifacts) -> Outcome<()> {
    let text = rows.iter().map(|r| {
        vec![
            r.l_s_nm.to_string(),
            r.v_bg_mv.to_string(),
            r.t_c_uev.map(|t| t.to_string()).unwrap_or_default(),
        ]
    });
    io(out.csv_text("tc_sweep.csv", &["L_s_nm", "V_bg_mV", "t_c_ueV"], text))?;
    let failed: Vec<_> = rows
        .iter()
        .filter(|r| r.error.is_some())
        .map(|r| json!({ "L_s_nm": r.l_s_nm, "V_bg_mV": r.v_bg_mv, "error": r.error }))
        .collect();
    io(out.json("tc_sweep_failures.json", &failed))
}

fn dqd_sweep(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let rows = dqd::tc_sweep(&cfg.dqd, &cfg.sweep.l_s_nm, &cfg.sweep.v_bg_mv, EXEC).at("dqd", "tc_sweep")?;
    write_sweep(&rows, out)?;
    // potential and bound pair at the [dqd] operating point
    let profile = dqd::build_dqd_potential(&cfg.dqd, 0.0).at("dqd", "build_dqd_potential")?;
    let pair = dqd::solve_bound_states(&profile, cfg.dqd.m_star).at("dqd", "solve_bound_states")?;
    io(out.csv(
        "dqd_states.csv",
        &["x_nm", "V_meV", "psiB", "psiAB"],
        (0..profile.x_nm.len()).map(|i| vec![profile.x_nm[i], profile.v_mev[i], pair.psi_b[i], pair.psi_ab[i]]),
    ))?;
    io(out.json(
        "dqd_summary.json",
        &json!({
            "E_B_meV": pair.e_b_mev,
            "E_AB_meV": pair.e_ab_mev,
            "t_c_ueV": dqd::tunnel_coupling(&pair),
        }),
    ))
}

fn wkb_fit(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let rows = dqd::tc_sweep(&cfg.dqd, &cfg.sweep.l_s_nm, &cfg.sweep.v_bg_mv, EXEC).at("dqd", "tc_sweep")?;
    write_sweep(&rows, out)?;
    let window = FitWindow {
        min_uev: cfg.sweep.fit_min_uev,
        max_uev: cfg.sweep.fit_max_uev,
    };
    let fit = gate::fit_wkb(&cfg.wkb.model(), &rows, window).at("gate", "fit_wkb")?;
    io(out.json("wkb_fit.json", &fit))
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn exchange_vs_vbg(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let e = &cfg.exchange;
    let model = cfg.wkb.model();
    let vs = linspace(e.v_bg_min_mv, e.v_bg_max_mv, e.n_v);
    let mut summary = Vec::new();
    for &l in &e.l_s_nm {
        let mut rows = Vec::new();
        for &v in &vs {
            let t = match gate::wkb_tc(&model, l, v * 1e-3) {
                Ok(t) => t,
                Err(holeqd::Error::BarrierCollapsed { .. }) => continue,
                Err(err) => return Err(err).at("gate", "wkb_tc"),
            };
            let j = gate::exchange(&GateParams { t_c_uev: t, ..cfg.gate }).at("gate", "exchange")?;
            rows.push(vec![v, j]);
        }
        io(out.csv(&format!("exchange_Ls{l}nm.csv"), &["V_bg_mV", "J_ueV"], rows))?;
        let (v1, v2) = e.slope_range_mv;
        let s = gate::exchange_slope(&model, &cfg.gate, l, (v1 * 1e-3, v2 * 1e-3)).at("gate", "exchange_slope")?;
        summary.push(json!({ "L_s_nm": l, "slope": s }));
    }
    io(out.json("exchange_slopes.json", &summary))
}

fn gate_time(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let g = &cfg.gate_time;
    if !(g.l_s_step_nm > 0.0) || g.l_s_max_nm < g.l_s_min_nm {
        return Err("gate_time spacing range is empty").at("cli", "gate_time");
    }
    let model = cfg.wkb.model();
    let v = g.v_bg_mv * 1e-3;
    let n = ((g.l_s_max_nm - g.l_s_min_nm) / g.l_s_step_nm + 1e-9).floor() as usize + 1;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let l = g.l_s_min_nm + i as f64 * g.l_s_step_nm;
        rows.push(vec![l, gate::cz_time_at(&model, &cfg.gate, l, v).at("gate", "cz_time_at")?]);
    }
    io(out.csv("gate_time.csv", &["L_s_nm", "T_cz_ns"], rows))?;
    let crossover = gate::crossover_spacing(&model, &cfg.gate, v, g.target_ns).ok();
    io(out.json(
        "gate_time_summary.json",
        &json!({ "V_bg_mV": g.v_bg_mv, "target_ns": g.target_ns, "crossover_L_s_nm": crossover }),
    ))
}

fn variability(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let v = &cfg.variability;
    let r = gate::variability_mc(&cfg.wkb.model(), &cfg.gate, v.l_s_nm, v.v_bg_mv * 1e-3, &v.spec(cfg.seed), EXEC)
        .at("gate", "variability_mc")?;
    io(out.csv(
        "variability_hist.csv",
        &["T_norm", "count"],
        r.histogram.iter().map(|b| vec![b.t_norm, b.count as f64]),
    ))?;
    io(out.json(
        "variability.json",
        &json!({
            "n_accepted": r.n_accepted,
            "n_rejected": r.n_rejected,
            "ln_tc_std": r.ln_tc_std,
            "analytic_ln_tc_sensitivity": r.analytic_ln_tc_sensitivity,
            "ln_tcz_std": r.ln_tcz_std,
            "t_norm_std": r.t_norm_std,
            "t_cz_nominal_ns": r.t_cz_nominal_ns,
            "t_cz_median_ns": r.t_cz_median_ns,
            "seed": cfg.seed,
        }),
    ))
}

fn oscillation(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let noise = cfg.noise.model(cfg.seed);
    let opts = cfg.oscillation.options();
    let r = qtm::exchange_oscillation(&cfg.gate, &noise, &opts, EXEC).at("qtm", "exchange_oscillation")?;
    io(out.csv(
        "oscillation.csv",
        &["t_ns", "p_up", "envelope_fit"],
        (0..r.times_ns.len()).map(|i| vec![r.times_ns[i], r.p_up[i], r.envelope[i]]),
    ))?;

    // single calibrated CZ on the same pair, from |+⟩|+⟩
    let topo = QdArrayTopology::grid(1, 2, cfg.gate, noise).at("circuit", "grid")?;
    let mut c = Circuit::new(2);
    c.rotation(0, circuit::Axis::Y, std::f64::consts::FRAC_PI_2)
        .rotation(1, circuit::Axis::Y, std::f64::consts::FRAC_PI_2)
        .cz(0, 1);
    let ideal = circuit::ideal_state(&c, &topo).at("circuit", "ideal_state")?;
    let run = RunOptions {
        n_traj: opts.n_traj,
        seed: cfg.seed,
        ..RunOptions::default()
    };
    let ens = circuit::run_noisy(&c, &topo, &run, EXEC).at("circuit", "run_noisy")?;
    let f = qtm::fidelity(&ideal.to_cvector(), &ens).at("qtm", "fidelity")?;

    let fit = r.fit.as_ref();
    io(out.json(
        "oscillation.json",
        &json!({
            "tau_ns": fit.and_then(|f| f.tau_ns),
            "gamma_fit": fit.and_then(|f| f.gamma_fit),
            "tau_kww_ns": fit.and_then(|f| f.tau_kww_ns),
            "fit_error": r.fit_error,
            "quasi_static_tau_ns": r.quasi_static_tau_ns,
            "F": f.f,
            "stderr": f.stderr,
            "n_traj": r.n_traj,
            "seed": r.seed,
        }),
    ))
}

fn ansatz_fidelity(cfg: &RunConfig, out: &mut Artifacts) -> Outcome<()> {
    let a = &cfg.ansatz;
    let topo = QdArrayTopology::grid(a.rows, a.cols, cfg.gate, cfg.noise.model(cfg.seed)).at("circuit", "grid")?;
    let policy = match &a.angles {
        Some(v) => AnglePolicy::Explicit(v.clone()),
        None => AnglePolicy::Seeded(cfg.seed),
    };
    let opts = RunOptions {
        n_traj: a.n_traj,
        seed: cfg.seed,
        correlation: a.correlation,
    };
    let rows = circuit::ansatz_fidelity_vs_depth(&topo, &policy, &a.n_stages, &opts, EXEC).at("circuit", "ansatz_fidelity_vs_depth")?;
    io(out.csv(
        "ansatz_fidelity.csv",
        &["N", "F", "stderr", "n_cz"],
        rows.iter().map(|r| vec![r.n_stages as f64, r.f, r.stderr, r.n_cz as f64]),
    ))?;
    let json_rows: Vec<_> = rows
        .iter()
        .map(|r| json!({ "N": r.n_stages, "F": r.f, "stderr": r.stderr, "n_traj": r.n_traj, "seed": r.seed }))
        .collect();
    io(out.json("ansatz_fidelity.json", &json_rows))
}
