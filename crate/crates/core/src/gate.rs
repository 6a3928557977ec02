//! WKB tunnel model, six-level two-spin gate Hamiltonian, exchange, CZ
//! timing and spacing-variability Monte Carlo.
//!
//! Gate-level energies are μeV (U and Zeeman terms are given in meV and
//! converted), times are ns. Basis order for the six-level model:
//! |↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩, S(2,0), S(0,2); the computational index is
//! `2 s1 + s2` with ↑ = 0.

use crate::dqd::SweepRow;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{hermitian_eigen, levenberg_marquardt, linear_fit, CMatrix, LmOptions, SpectralPropagator, C64};
use crate::units::{decay_constant, BOHR_MAGNETON_MEV_PER_T, HBAR_UEV_NS};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_10, PI};

/// t_c = t0 exp(−√(2 m* m0 E_b)/ħ · L_S) with E_b = E_b0 − β q V_BG.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WkbModel {
    pub t0_mev: f64,
    pub e_b0_mev: f64,
    pub beta: f64,
    pub m_star: f64,
}

impl WkbModel {
    pub fn ge() -> Self {
        WkbModel {
            t0_mev: 12.0,
            e_b0_mev: 40.0,
            beta: 0.5,
            m_star: 0.058,
        }
    }

    pub fn si() -> Self {
        WkbModel {
            t0_mev: 2.0,
            e_b0_mev: 40.0,
            beta: 0.5,
            m_star: 0.24,
        }
    }

    /// Barrier height (meV) at gate voltage magnitude `v_bg_volts`.
    pub fn barrier_height(&self, v_bg_volts: f64) -> f64 {
        self.e_b0_mev - self.beta * v_bg_volts * 1e3
    }

    /// Decay constant (nm⁻¹).
    pub fn kappa(&self, v_bg_volts: f64) -> Result<f64> {
        let e_b = self.barrier_height(v_bg_volts);
        if !(e_b > 0.0) {
            return Err(Error::BarrierCollapsed { barrier_mev: e_b });
        }
        Ok(decay_constant(self.m_star, e_b))
    }
}

/// Tunnel coupling (μeV).
pub fn wkb_tc(model: &WkbModel, l_s_nm: f64, v_bg_volts: f64) -> Result<f64> {
    if !(l_s_nm >= 0.0) {
        return Err(Error::invalid(format!("spacing {l_s_nm} nm must be >= 0")));
    }
    Ok(model.t0_mev * 1e3 * (-model.kappa(v_bg_volts)? * l_s_nm).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VoltageLine {
    pub v_bg_mv: f64,
    /// d ln t_c / d L_S (nm⁻¹).
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WkbFit {
    pub model: WkbModel,
    pub lines: Vec<VoltageLine>,
    /// max |ln t_c,fit − ln t_c,data| over the fitted points.
    pub max_abs_ln_residual: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct FitWindow {
    pub min_uev: f64,
    pub max_uev: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow {
            min_uev: 1.0,
            max_uev: 100.0,
        }
    }
}

/// Fits (t0, E_b0, β) to a tunnel-coupling sweep. Per voltage, ln t_c is
/// regressed on L_S; the squared slopes are linear in V_BG, which seeds a
/// joint least-squares refinement on ln t_c. Only cells inside `window` are
/// used. `template.m_star` is held fixed.
pub fn fit_wkb(template: &WkbModel, rows: &[SweepRow], window: FitWindow) -> Result<WkbFit> {
    check_monotone(rows)?;
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter_map(|r| r.t_c_uev.map(|t| (r.l_s_nm, r.v_bg_mv, t)))
        .filter(|&(_, _, t)| t >= window.min_uev && t <= window.max_uev)
        .collect();
    let mut voltages: Vec<f64> = pts.iter().map(|p| p.1).collect();
    voltages.sort_by(f64::total_cmp);
    voltages.dedup();

    let mut lines = Vec::new();
    for &v in &voltages {
        let (x, y): (Vec<f64>, Vec<f64>) = pts.iter().filter(|p| p.1 == v).map(|p| (p.0, p.2.ln())).unzip();
        if x.len() < 3 {
            continue;
        }
        let f = linear_fit(&x, &y)?;
        lines.push(VoltageLine {
            v_bg_mv: v,
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            n_points: x.len(),
        });
    }
    if lines.len() < 2 {
        return Err(Error::invalid(
            "fit needs >= 2 voltages with >= 3 spacings inside the window",
        ));
    }
    let m = template.m_star;
    let eb_of_slope = |s: f64| s * s * crate::units::HBAR2_OVER_2M0_MEV_NM2 / m;
    let vs: Vec<f64> = lines.iter().map(|l| l.v_bg_mv).collect();
    let ebs: Vec<f64> = lines.iter().map(|l| eb_of_slope(l.slope)).collect();
    let seed = linear_fit(&vs, &ebs)?;
    let lnt0 = lines.iter().map(|l| l.intercept).sum::<f64>() / lines.len() as f64;

    let used: Vec<(f64, f64, f64)> = pts
        .iter()
        .filter(|p| lines.iter().any(|l| l.v_bg_mv == p.1))
        .copied()
        .collect();
    let model_ln = |p: &[f64], l: f64, v: f64| {
        let e_b = (p[1] - p[2] * v).max(1e-9);
        p[0] - decay_constant(m, e_b) * l
    };
    let res = levenberg_marquardt(
        |p, r| {
            for (i, &(l, v, t)) in used.iter().enumerate() {
                r[i] = model_ln(p, l, v) - t.ln();
            }
        },
        |_| {},
        &[lnt0, seed.intercept, -seed.slope],
        used.len(),
        &LmOptions::default(),
    )?;
    let p = res.params;
    let max_abs_ln_residual = used
        .iter()
        .map(|&(l, v, t)| (model_ln(&p, l, v) - t.ln()).abs())
        .fold(0.0, f64::max);
    Ok(WkbFit {
        model: WkbModel {
            t0_mev: p[0].exp() * 1e-3,
            e_b0_mev: p[1],
            beta: p[2],
            m_star: m,
        },
        lines,
        max_abs_ln_residual,
        n_points: used.len(),
    })
}

fn check_monotone(rows: &[SweepRow]) -> Result<()> {
    let ok: Vec<&SweepRow> = rows.iter().filter(|r| r.t_c_uev.is_some()).collect();
    for a in &ok {
        for b in &ok {
            let (ta, tb) = (a.t_c_uev.unwrap_or(0.0), b.t_c_uev.unwrap_or(0.0));
            if a.v_bg_mv == b.v_bg_mv && a.l_s_nm < b.l_s_nm && ta <= tb {
                return Err(Error::FitRejected(format!(
                    "t_c not decreasing in L_S at {} mV ({} nm vs {} nm)",
                    a.v_bg_mv, a.l_s_nm, b.l_s_nm
                )));
            }
            if a.l_s_nm == b.l_s_nm && a.v_bg_mv < b.v_bg_mv && ta >= tb {
                return Err(Error::FitRejected(format!(
                    "t_c not increasing in V_BG at {} nm ({} mV vs {} mV)",
                    a.l_s_nm, a.v_bg_mv, b.v_bg_mv
                )));
            }
        }
    }
    Ok(())
}

/// Inputs to the six-level gate Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateParams {
    pub t_c_uev: f64,
    pub u1_mev: f64,
    pub u2_mev: f64,
    pub epsilon_uev: f64,
    /// Zeeman splitting (meV), used unless all of g1, g2, B1, B2 are given.
    pub e_z_mev: f64,
    pub de_z_mev: f64,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub b1_tesla: Option<f64>,
    pub b2_tesla: Option<f64>,
}

impl Default for GateParams {
    fn default() -> Self {
        GateParams {
            t_c_uev: 28.4,
            u1_mev: 11.0,
            u2_mev: 11.0,
            epsilon_uev: 0.0,
            e_z_mev: 1.0,
            de_z_mev: 0.1,
            g1: None,
            g2: None,
            b1_tesla: None,
            b2_tesla: None,
        }
    }
}

impl GateParams {
    /// (E_z, ΔE_z) in meV.
    pub fn zeeman(&self) -> (f64, f64) {
        match (self.g1, self.g2, self.b1_tesla, self.b2_tesla) {
            (Some(g1), Some(g2), Some(b1), Some(b2)) => (
                BOHR_MAGNETON_MEV_PER_T * (g1 * b1 + g2 * b2),
                BOHR_MAGNETON_MEV_PER_T * (g1 * b1 - g2 * b2),
            ),
            _ => (self.e_z_mev, self.de_z_mev),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.t_c_uev, self.u1_mev, self.u2_mev, self.epsilon_uev, self.e_z_mev, self.de_z_mev];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("gate parameters must be finite"));
        }
        if self.t_c_uev < 0.0 {
            return Err(Error::invalid("t_c must be >= 0"));
        }
        Ok(())
    }

    /// Warnings when t_c is not well below both charging energies.
    pub fn hierarchy_warnings(&self) -> Vec<String> {
        let u = self.u1_mev.min(self.u2_mev) * 1e3;
        if self.t_c_uev >= u / 20.0 {
            vec![format!(
                "t_c = {} ueV is not << U = {} ueV; the effective Hamiltonian is unreliable",
                self.t_c_uev, u
            )]
        } else {
            Vec::new()
        }
    }

    /// Every energy multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        GateParams {
            t_c_uev: self.t_c_uev * s,
            u1_mev: self.u1_mev * s,
            u2_mev: self.u2_mev * s,
            epsilon_uev: self.epsilon_uev * s,
            e_z_mev: self.e_z_mev * s,
            de_z_mev: self.de_z_mev * s,
            g1: self.g1,
            g2: self.g2,
            b1_tesla: self.b1_tesla.map(|b| b * s),
            b2_tesla: self.b2_tesla.map(|b| b * s),
        }
    }
}

/// J = 2 t_c² (U1 + U2) / ((U1 − ε)(U2 + ε)) in μeV.
pub fn exchange(p: &GateParams) -> Result<f64> {
    let u1 = p.u1_mev * 1e3;
    let u2 = p.u2_mev * 1e3;
    let (d1, d2) = (u1 - p.epsilon_uev, u2 + p.epsilon_uev);
    if d1 <= 0.0 || d2 <= 0.0 {
        return Err(Error::ChargeTransitionCrossing(d1.min(d2)));
    }
    Ok(2.0 * p.t_c_uev * p.t_c_uev * (u1 + u2) / (d1 * d2))
}

/// dJ/dt_c (dimensionless).
pub fn exchange_derivative(p: &GateParams) -> Result<f64> {
    if p.t_c_uev == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * exchange(p)? / p.t_c_uev)
}

fn real(v: f64) -> C64 {
    C64::new(v, 0.0)
}

/// Six-level Hamiltonian (μeV).
pub fn build_h0(p: &GateParams) -> Result<CMatrix> {
    p.validate()?;
    let (ez, dez) = p.zeeman();
    let (ez, dez) = (ez * 1e3, dez * 1e3);
    let t = p.t_c_uev;
    let mut h = CMatrix::zeros(6, 6);
    let diag = [
        ez / 2.0,
        dez / 2.0,
        -dez / 2.0,
        -ez / 2.0,
        p.u1_mev * 1e3 - p.epsilon_uev,
        p.u2_mev * 1e3 + p.epsilon_uev,
    ];
    for (i, d) in diag.iter().enumerate() {
        h[(i, i)] = real(*d);
    }
    for s in [4, 5] {
        h[(1, s)] = real(t);
        h[(s, 1)] = real(t);
        h[(2, s)] = real(-t);
        h[(s, 2)] = real(-t);
    }
    Ok(h)
}

#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    /// 4×4 over the computational basis (μeV).
    pub matrix: CMatrix,
    pub j_uev: f64,
    pub warnings: Vec<String>,
}

/// Schrieffer-Wolff projection onto the computational basis.
pub fn effective_h(p: &GateParams) -> Result<EffectiveHamiltonian> {
    let h = build_h0(p)?;
    let j = exchange(p)?;
    // Second-order SW with spin-resolved denominators; the inner block
    // reduces to [[ΔE_z/2 − J/2, J/2], [J/2, −ΔE_z/2 − J/2]] when ΔE_z ≪ U.
    let mut m = CMatrix::zeros(4, 4);
    for a in 0..4 {
        for b in 0..4 {
            let (ea, eb) = (h[(a, a)].re, h[(b, b)].re);
            let mut v = if a == b { ea } else { 0.0 };
            for s in [4, 5] {
                let es = h[(s, s)].re;
                v += 0.5 * h[(a, s)].re * h[(s, b)].re * (1.0 / (ea - es) + 1.0 / (eb - es));
            }
            m[(a, b)] = real(v);
        }
    }
    Ok(EffectiveHamiltonian {
        matrix: m,
        j_uev: j,
        warnings: p.hierarchy_warnings(),
    })
}

/// Eigenvalues of the six-level model adiabatically connected to the
/// computational states, ascending.
pub fn computational_eigenvalues(p: &GateParams) -> Result<Vec<f64>> {
    let e = hermitian_eigen(&build_h0(p)?);
    let mut v: Vec<f64> = (0..6)
        .map(|c| {
            let w: f64 = (0..4).map(|r| e.vectors[(r, c)].norm_sqr()).sum();
            (w, e.values[c])
        })
        .filter(|(w, _)| *w > 0.5)
        .map(|(_, e)| e)
        .collect();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// φ = θ↑↓ + θ↓↑ − θ↑↑ − θ↓↓ of the diagonal phases of a 4×4 computational
/// block, wrapped to [0, 2π). Positive exchange makes it grow as J t / ħ.
pub fn conditional_phase(block: &CMatrix) -> f64 {
    let th = |i: usize| block[(i, i)].arg();
    (th(1) + th(2) - th(0) - th(3)).rem_euclid(2.0 * PI)
}

/// 4×4 computational block of a 6×6 propagator.
pub fn computational_block(u: &CMatrix) -> CMatrix {
    u.view((0, 0), (4, 4)).into_owned()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CzTiming {
    /// πħ/J (ns).
    pub t_cz_ns: f64,
    pub j_uev: f64,
    /// Conditional phase of the exact six-level evolution at `t_cz_ns`.
    pub conditional_phase_rad: f64,
}

pub fn cz_gate_time(p: &GateParams) -> Result<CzTiming> {
    let j = exchange(p)?;
    if !(j > 0.0) {
        return Err(Error::NonPositiveExchange(j));
    }
    let t = PI * HBAR_UEV_NS / j;
    let prop = SpectralPropagator::new(&build_h0(p)?, HBAR_UEV_NS);
    let phi = conditional_phase(&computational_block(&prop.unitary(t)));
    Ok(CzTiming {
        t_cz_ns: t,
        j_uev: j,
        conditional_phase_rad: phi,
    })
}

/// Duration (ns) at which the exact six-level conditional phase equals π.
pub fn calibrated_cz_duration(p: &GateParams) -> Result<f64> {
    let start = cz_gate_time(p)?;
    let prop = SpectralPropagator::new(&build_h0(p)?, HBAR_UEV_NS);
    let phase = |t: f64| conditional_phase(&computational_block(&prop.unitary(t)));
    let (mut t0, mut f0) = (start.t_cz_ns, start.conditional_phase_rad - PI);
    let mut t1 = t0 * 1.001;
    let mut f1 = phase(t1) - PI;
    for _ in 0..50 {
        if f1.abs() < 1e-13 {
            break;
        }
        let slope = (f1 - f0) / (t1 - t0);
        if !(slope > 0.0) {
            return Err(Error::FitRejected("conditional phase not increasing in time".into()));
        }
        let t2 = t1 - f1 / slope;
        (t0, f0) = (t1, f1);
        t1 = t2;
        f1 = phase(t1) - PI;
    }
    if f1.abs() > 1e-9 {
        return Err(Error::NoConvergence {
            iterations: 50,
            residual: f1.abs(),
        });
    }
    Ok(t1)
}

/// T_CZ = πħ/J (ns) with t_c from the WKB model.
pub fn cz_time_at(model: &WkbModel, p: &GateParams, l_s_nm: f64, v_bg_volts: f64) -> Result<f64> {
    let gp = GateParams {
        t_c_uev: wkb_tc(model, l_s_nm, v_bg_volts)?,
        ..*p
    };
    let j = exchange(&gp)?;
    if !(j > 0.0) {
        return Err(Error::NonPositiveExchange(j));
    }
    Ok(PI * HBAR_UEV_NS / j)
}

/// Spacing (nm) at which T_CZ reaches `target_ns`, by bisection.
pub fn crossover_spacing(model: &WkbModel, p: &GateParams, v_bg_volts: f64, target_ns: f64) -> Result<f64> {
    let f = |l: f64| cz_time_at(model, p, l, v_bg_volts).map(|t| t - target_ns);
    let (mut lo, mut hi) = (0.0, 1.0);
    if f(lo)? > 0.0 {
        return Err(Error::invalid("gate slower than the target even at zero spacing"));
    }
    while f(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::invalid("no crossover below 10 um"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExchangeSlope {
    /// Average d|V_BG|/d log10 J over the range (mV/dec), from the end points.
    pub inverse_slope_mv_per_dec: f64,
    /// d log10 J / dV (dec/mV), same average.
    pub log_slope_dec_per_mv: f64,
    /// Central-difference d log10 J / dV at the midpoint.
    pub midpoint_numeric_dec_per_mv: f64,
    /// Closed form 2 L_S β κ / (2 E_b ln 10) at the midpoint.
    pub midpoint_analytic_dec_per_mv: f64,
}

pub fn exchange_slope(model: &WkbModel, p: &GateParams, l_s_nm: f64, v_range_volts: (f64, f64)) -> Result<ExchangeSlope> {
    let (v1, v2) = v_range_volts;
    if !(v2 > v1) {
        return Err(Error::invalid("voltage range must be increasing"));
    }
    let log_j = |v: f64| -> Result<f64> {
        let gp = GateParams {
            t_c_uev: wkb_tc(model, l_s_nm, v)?,
            ..*p
        };
        Ok(exchange(&gp)?.log10())
    };
    let (dv_mv, avg) = ((v2 - v1) * 1e3, log_j(v2)? - log_j(v1)?);
    let slope = avg / dv_mv;
    let vm = 0.5 * (v1 + v2);
    let h = 1e-6;
    let numeric = (log_j(vm + h)? - log_j(vm - h)?) / (2.0 * h * 1e3);
    let kappa = model.kappa(vm)?;
    let analytic = 2.0 * l_s_nm * model.beta * kappa / (2.0 * model.barrier_height(vm)) / LN_10;
    Ok(ExchangeSlope {
        inverse_slope_mv_per_dec: 1.0 / slope,
        log_slope_dec_per_mv: slope,
        midpoint_numeric_dec_per_mv: numeric,
        midpoint_analytic_dec_per_mv: analytic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariabilitySpec {
    pub sigma_ls_nm: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub n_bins: usize,
}

impl Default for VariabilitySpec {
    fn default() -> Self {
        VariabilitySpec {
            sigma_ls_nm: 0.5,
            n_samples: 10_000,
            seed: 0,
            n_bins: 40,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    /// Bin center of T_CZ / median(T_CZ).
    pub t_norm: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariabilityResult {
    pub n_accepted: usize,
    pub n_rejected: usize,
    /// Sample standard deviation of ln t_c.
    pub ln_tc_std: f64,
    /// √(2 m* E_b)/ħ · σ_LS.
    pub analytic_ln_tc_sensitivity: f64,
    pub t_cz_nominal_ns: f64,
    pub t_cz_median_ns: f64,
    /// Standard deviation of T_CZ / median(T_CZ).
    pub t_norm_std: f64,
    pub ln_tcz_std: f64,
    pub histogram: Vec<HistogramBin>,
}

fn std_dev(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Spacing Monte Carlo. Sample `i` draws from its own ChaCha8 stream seeded
/// with `seed ^ i`, so results do not depend on the execution order.
pub fn variability_mc(
    model: &WkbModel,
    p: &GateParams,
    l_s0_nm: f64,
    v_bg_volts: f64,
    spec: &VariabilitySpec,
    exec: Exec,
) -> Result<VariabilityResult> {
    if !(spec.sigma_ls_nm >= 0.0) || spec.n_samples < 2 || spec.n_bins == 0 {
        return Err(Error::invalid("variability spec needs sigma >= 0, >= 2 samples, >= 1 bin"));
    }
    let nominal = cz_time_at(model, p, l_s0_nm, v_bg_volts)?;
    let samples: Vec<Option<(f64, f64)>> = exec.map(spec.n_samples, |i| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(spec.seed ^ i as u64);
        let z: f64 = StandardNormal.sample(&mut rng);
        let l = l_s0_nm + spec.sigma_ls_nm * z;
        let tc = wkb_tc(model, l, v_bg_volts).ok()?;
        let t = cz_time_at(model, p, l, v_bg_volts).ok()?;
        Some((tc.ln(), t))
    });
    let ok: Vec<(f64, f64)> = samples.iter().flatten().copied().collect();
    let n_rejected = samples.len() - ok.len();
    if ok.len() < 2 {
        return Err(Error::invalid(format!("only {} samples survived", ok.len())));
    }
    let ln_tc: Vec<f64> = ok.iter().map(|s| s.0).collect();
    let t: Vec<f64> = ok.iter().map(|s| s.1).collect();
    let mut sorted = t.clone();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    };
    let t_norm: Vec<f64> = t.iter().map(|v| v / median).collect();
    let ln_t: Vec<f64> = t.iter().map(|v| v.ln()).collect();

    let lo = sorted[0] / median;
    let hi = sorted[k - 1] / median;
    let width = if hi > lo { (hi - lo) / spec.n_bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; spec.n_bins];
    for v in &t_norm {
        let b = (((v - lo) / width) as usize).min(spec.n_bins - 1);
        counts[b] += 1;
    }
    let histogram = counts
        .iter()
        .enumerate()
        .map(|(b, &count)| HistogramBin {
            t_norm: lo + (b as f64 + 0.5) * width,
            count,
        })
        .collect();

    Ok(VariabilityResult {
        n_accepted: ok.len(),
        n_rejected,
        ln_tc_std: std_dev(&ln_tc),
        analytic_ln_tc_sensitivity: model.kappa(v_bg_volts)? * spec.sigma_ls_nm,
        t_cz_nominal_ns: nominal,
        t_cz_median_ns: median,
        t_norm_std: std_dev(&t_norm),
        ln_tcz_std: std_dev(&ln_t),
        histogram,
    })
}
