//! Quantum-trajectory Monte Carlo under random-telegraph tunnel-coupling
//! noise: sampling, exact piecewise-constant propagation, fidelity, and the
//! exchange-oscillation experiment.
//!
//! Energies μeV, times ns. Trajectory `k` draws from a ChaCha8 stream
//! keyed by `(seed, k)`, so ensembles are reproducible in any execution
//! order.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gate::{build_h0, calibrated_cz_duration, computational_block, exchange_derivative, GateParams};
use crate::linalg::{levenberg_marquardt, CMatrix, CVector, LmOptions, SpectralPropagator, C64};
use crate::units::HBAR_UEV_NS;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

/// Relative norm change that counts as a propagator failure.
pub const NORM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseModel {
    /// Standard deviation of δt_c (μeV).
    pub a_n_uev: f64,
    /// Mean time between telegraph switches (ns).
    pub tau_n_ns: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel {
            a_n_uev: 0.24,
            tau_n_ns: 1000.0,
            seed: 0,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel {
            a_n_uev: 0.0,
            ..NoiseModel::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_n_uev >= 0.0 && self.a_n_uev.is_finite()) {
            return Err(Error::invalid("A_n must be finite and >= 0"));
        }
        if !(self.tau_n_ns > 0.0) {
            return Err(Error::invalid("tau_n must be positive"));
        }
        Ok(())
    }
}

/// Independent stream for trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Piecewise-constant δt_c(t). Interval `j` runs from `switch_times[j-1]`
/// (or 0) to `switch_times[j]` (or `duration`) and carries `values[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoiseTrajectory {
    pub switch_times: Vec<f64>,
    pub values: Vec<f64>,
    pub duration: f64,
}

impl NoiseTrajectory {
    pub fn constant(value: f64, duration: f64) -> Self {
        NoiseTrajectory {
            switch_times: Vec::new(),
            values: vec![value],
            duration,
        }
    }

    /// (start, end, δt_c) for each interval.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        (0..self.values.len()).map(move |j| {
            let a = if j == 0 { 0.0 } else { self.switch_times[j - 1] };
            let b = self.switch_times.get(j).copied().unwrap_or(self.duration);
            (a, b, self.values[j])
        })
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let j = self.switch_times.partition_point(|&s| s <= t);
        self.values[j]
    }
}

/// Telegraph process from `rng`: initial value from N(0, A_n), switches
/// at Poisson rate 1/τ_n, each redrawing from N(0, A_n).
pub fn sample_rtn_with<R: Rng>(model: &NoiseModel, duration: f64, rng: &mut R) -> Result<NoiseTrajectory> {
    model.validate()?;
    if !(duration > 0.0) {
        return Err(Error::invalid("noise duration must be positive"));
    }
    let normal = Normal::new(0.0, model.a_n_uev).map_err(|e| Error::invalid(e.to_string()))?;
    let wait = Exp::new(1.0 / model.tau_n_ns).map_err(|e| Error::invalid(e.to_string()))?;
    let mut values = vec![normal.sample(rng)];
    let mut switch_times = Vec::new();
    let mut t = 0.0;
    loop {
        t += wait.sample(rng);
        if t >= duration {
            break;
        }
        switch_times.push(t);
        values.push(normal.sample(rng));
    }
    Ok(NoiseTrajectory {
        switch_times,
        values,
        duration,
    })
}

pub fn sample_rtn(model: &NoiseModel, duration: f64, trajectory_index: u64) -> Result<NoiseTrajectory> {
    sample_rtn_with(model, duration, &mut trajectory_rng(model.seed, trajectory_index))
}

/// δt_c times ∂H0/∂t_c, in the six-level basis.
pub fn noise_hamiltonian(delta_tc_uev: f64) -> CMatrix {
    let mut h = CMatrix::zeros(6, 6);
    let d = C64::new(delta_tc_uev, 0.0);
    for s in [4, 5] {
        h[(1, s)] = d;
        h[(s, 1)] = d;
        h[(2, s)] = -d;
        h[(s, 2)] = -d;
    }
    h
}

/// Propagates the columns of `init` under H0 + H_n(δt_c(t)) and returns them
/// at each of `times` (ascending, within the noise duration).
pub fn propagate(h0: &CMatrix, noise: &NoiseTrajectory, init: &CMatrix, times: &[f64]) -> Result<Vec<CMatrix>> {
    if h0.nrows() != 6 || h0.ncols() != 6 || init.nrows() != 6 {
        return Err(Error::invalid("six-level propagation needs 6x6 H0 and 6-row states"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("output times must be ascending"));
    }
    if let Some(&last) = times.last() {
        if last > noise.duration * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "t_final {last} ns exceeds the noise duration {} ns",
                noise.duration
            )));
        }
    }
    let norms0: Vec<f64> = (0..init.ncols()).map(|c| init.column(c).norm()).collect();
    let mut out = Vec::with_capacity(times.len());
    let mut state = init.clone();
    let mut next = 0;
    let n_intervals = noise.values.len();
    for (j, (a, b, delta)) in noise.intervals().enumerate() {
        let last_interval = j + 1 == n_intervals;
        let h = h0 + noise_hamiltonian(delta);
        let prop = SpectralPropagator::new(&h, HBAR_UEV_NS);
        let proj = prop.project(&state);
        while next < times.len() && (times[next] < b || last_interval) {
            out.push(prop.evolve_projected(&proj, times[next] - a));
            next += 1;
        }
        if next == times.len() {
            break;
        }
        state = prop.evolve_projected(&proj, b - a);
    }
    for m in &out {
        for (c, n0) in norms0.iter().enumerate() {
            let drift = (m.column(c).norm() - n0).abs() / n0.max(f64::MIN_POSITIVE);
            if drift > NORM_TOLERANCE {
                return Err(Error::NormDrift(drift));
            }
        }
    }
    Ok(out)
}

/// Full 6×6 propagator from 0 to `t`.
pub fn propagator(h0: &CMatrix, noise: &NoiseTrajectory, t: f64) -> Result<CMatrix> {
    let mut v = propagate(h0, noise, &CMatrix::identity(6, 6), &[t])?;
    Ok(v.pop().expect("one output"))
}

/// ψ(t) sampled at `n_samples` evenly spaced times from 0 to `t_final`.
pub fn evolve_trajectory(
    psi0: &CVector,
    h0: &CMatrix,
    noise: &NoiseTrajectory,
    t_final: f64,
    n_samples: usize,
) -> Result<Vec<CVector>> {
    if (psi0.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::invalid("initial state must be normalized"));
    }
    if n_samples < 2 {
        return Err(Error::invalid("need at least two output samples"));
    }
    let times: Vec<f64> = (0..n_samples).map(|k| t_final * k as f64 / (n_samples - 1) as f64).collect();
    let init = CMatrix::from_column_slice(6, 1, psi0.as_slice());
    Ok(propagate(h0, noise, &init, &times)?
        .into_iter()
        .map(|m| m.column(0).into_owned())
        .collect())
}

#[derive(Debug, Clone)]
pub struct TrajectoryEnsemble {
    pub states: Vec<CVector>,
    pub n_traj: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityEstimate {
    pub f: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    pub n_traj: usize,
}

/// Mean of |⟨ψ_ideal|ψ_k⟩|² with its standard error. The sum runs in
/// trajectory order.
pub fn fidelity(psi_ideal: &CVector, ensemble: &TrajectoryEnsemble) -> Result<FidelityEstimate> {
    if ensemble.states.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let f: Vec<f64> = ensemble
        .states
        .iter()
        .map(|s| {
            if s.len() != psi_ideal.len() {
                return Err(Error::invalid("state dimension mismatch"));
            }
            Ok(psi_ideal.dotc(s).norm_sqr())
        })
        .collect::<Result<_>>()?;
    let n = f.len() as f64;
    let mean = f.iter().sum::<f64>() / n;
    let stderr = if f.len() > 1 {
        (f.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok(FidelityEstimate {
        f: mean,
        stderr,
        n_traj: f.len(),
    })
}

/// Tr(ρ²) of the equal-weight mixture of `states`.
pub fn ensemble_purity(states: &[CVector]) -> f64 {
    let n = states.len() as f64;
    let mut acc = 0.0;
    for a in states {
        for b in states {
            acc += a.dotc(b).norm_sqr();
        }
    }
    acc / (n * n)
}

/// Single-qubit Z frame phases (one per computational index) that zero the
/// diagonal phases of |↑↑⟩, |↑↓⟩ and |↓↑⟩ in `block`; |↓↓⟩ keeps the
/// conditional phase.
pub fn frame_correction(block: &CMatrix) -> [C64; 4] {
    let th = |i: usize| block[(i, i)].arg();
    let g = th(0);
    let a = th(2) - g;
    let b = th(1) - g;
    let mut out = [C64::new(0.0, 0.0); 4];
    for (idx, o) in out.iter_mut().enumerate() {
        let (s1, s2) = ((idx >> 1) as f64, (idx & 1) as f64);
        *o = C64::from_polar(1.0, -(g + a * s1 + b * s2));
    }
    out
}

/// How the single-qubit frame is calibrated in the oscillation experiment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameCalibration {
    /// Frame from the noiseless propagator; noise in single-qubit phases
    /// stays in the signal.
    Nominal,
    /// Frame re-derived from each noisy realization, leaving only the
    /// conditional-phase noise.
    #[default]
    PerRealization,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillationOptions {
    pub t_max_ns: f64,
    pub n_times: usize,
    pub n_traj: usize,
    pub frame: FrameCalibration,
}

impl Default for OscillationOptions {
    fn default() -> Self {
        OscillationOptions {
            t_max_ns: 400.0,
            n_times: 801,
            n_traj: 2000,
            frame: FrameCalibration::PerRealization,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeFit {
    /// Gaussian decay time of exp(−(t/τ)²); `None` when no decay is detected.
    pub tau_ns: Option<f64>,
    /// Exponent of a free exp(−(t/τ)^γ) fit; `None` without decay.
    pub gamma_fit: Option<f64>,
    pub tau_kww_ns: Option<f64>,
    pub amplitude: f64,
    pub omega_rad_per_ns: f64,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OscillationResult {
    pub times_ns: Vec<f64>,
    pub p_up: Vec<f64>,
    /// exp(−(t/τ)²) from the fit; exactly 1 when no decay is detected.
    pub envelope: Vec<f64>,
    pub fit: Option<EnvelopeFit>,
    pub fit_error: Option<String>,
    /// √2 ħ/σ_J (per-realization frame) or 2√2 ħ/σ_J (nominal frame) with
    /// σ_J = (dJ/dt_c) A_n.
    pub quasi_static_tau_ns: Option<f64>,
    pub n_traj: usize,
    pub seed: u64,
}

/// Ramsey-type CPHASE experiment: control (dot 1) rotated by X(π/2) from
/// |↑⟩, target (dot 2) in |↓⟩, exchange for time t, frame correction, then
/// X(−π/2) on the control. Returns the control spin-up probability averaged
/// over trajectories and its envelope fit.
pub fn exchange_oscillation(
    params: &GateParams,
    noise: &NoiseModel,
    opts: &OscillationOptions,
    exec: Exec,
) -> Result<OscillationResult> {
    noise.validate()?;
    if opts.n_times < 2 || !(opts.t_max_ns > 0.0) || opts.n_traj == 0 {
        return Err(Error::invalid("oscillation needs t_max > 0, n_times >= 2, n_traj >= 1"));
    }
    let h0 = build_h0(params)?;
    let times: Vec<f64> = (0..opts.n_times)
        .map(|k| opts.t_max_ns * k as f64 / (opts.n_times - 1) as f64)
        .collect();
    let init = CMatrix::identity(6, 6).columns(0, 4).into_owned();

    let nominal_frames: Vec<[C64; 4]> = if opts.frame == FrameCalibration::Nominal {
        let clean = NoiseTrajectory::constant(0.0, opts.t_max_ns);
        propagate(&h0, &clean, &init, &times)?
            .iter()
            .map(|u| frame_correction(&u.view((0, 0), (4, 4)).into_owned()))
            .collect()
    } else {
        Vec::new()
    };

    let per_traj: Vec<Vec<f64>> = exec.try_map(opts.n_traj, |k| {
        let rtn = sample_rtn(noise, opts.t_max_ns, k as u64)?;
        let us = propagate(&h0, &rtn, &init, &times)?;
        Ok::<_, Error>(
            us.iter()
                .enumerate()
                .map(|(ti, u)| {
                    let block = u.view((0, 0), (4, 4)).into_owned();
                    let frame = match opts.frame {
                        FrameCalibration::Nominal => nominal_frames[ti],
                        FrameCalibration::PerRealization => frame_correction(&block),
                    };
                    // ψ = (|↑↓⟩ − i|↓↓⟩)/√2 through the computational block
                    let amp = |r: usize| {
                        frame[r] * (block[(r, 1)] - C64::new(0.0, 1.0) * block[(r, 3)]) * FRAC_1_SQRT_2
                    };
                    // X(−π/2) on the control, keep control-up amplitudes
                    let i = C64::new(0.0, 1.0);
                    let up0 = (amp(0) + i * amp(2)) * FRAC_1_SQRT_2;
                    let up1 = (amp(1) + i * amp(3)) * FRAC_1_SQRT_2;
                    up0.norm_sqr() + up1.norm_sqr()
                })
                .collect(),
        )
    })?;
    let mut p_up = vec![0.0; times.len()];
    for row in &per_traj {
        for (p, v) in p_up.iter_mut().zip(row) {
            *p += v;
        }
    }
    p_up.iter_mut().for_each(|p| *p /= opts.n_traj as f64);

    let sigma_j = exchange_derivative(params)? * noise.a_n_uev;
    let quasi_static_tau_ns = (sigma_j > 0.0).then(|| {
        let base = SQRT_2 * HBAR_UEV_NS / sigma_j;
        match opts.frame {
            FrameCalibration::PerRealization => base,
            FrameCalibration::Nominal => 2.0 * base,
        }
    });
    let omega0 = PI / calibrated_cz_duration(params)?;
    let (fit, fit_error) = match fit_envelope(&times, &p_up, omega0, quasi_static_tau_ns) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let envelope = times
        .iter()
        .map(|&t| match fit.and_then(|f| f.tau_ns) {
            Some(tau) => (-(t / tau).powi(2)).exp(),
            None => 1.0,
        })
        .collect();
    Ok(OscillationResult {
        times_ns: times,
        p_up,
        envelope,
        fit,
        fit_error,
        quasi_static_tau_ns,
        n_traj: opts.n_traj,
        seed: noise.seed,
    })
}

/// Fits p = ½ + ½ A e^{−r t²} cos(ω t + φ) (r = 1/τ²), then frees the
/// exponent: p = ½ + ½ A e^{−(s t)^γ} cos(ω t + φ).
pub fn fit_envelope(times: &[f64], p: &[f64], omega0: f64, tau_guess: Option<f64>) -> Result<EnvelopeFit> {
    let t_max = times.iter().cloned().fold(0.0, f64::max);
    let no_decay_tau = 10.0 * t_max;
    let gauss = |q: &[f64], t: f64| 0.5 + 0.5 * q[0] * (-q[1] * t * t).exp() * (q[2] * t + q[3]).cos();
    let r0 = tau_guess.map(|t| 1.0 / (t * t)).unwrap_or(0.0);
    let fit1 = levenberg_marquardt(
        |q, r| {
            for (i, &t) in times.iter().enumerate() {
                r[i] = gauss(q, t) - p[i];
            }
        },
        |q| q[1] = q[1].max(0.0),
        &[1.0, r0, omega0, 0.0],
        times.len(),
        &LmOptions::default(),
    )?;
    let q = fit1.params;
    if !q.iter().all(|v| v.is_finite()) {
        return Err(Error::FitRejected("non-finite envelope parameters".into()));
    }
    let rms = (fit1.cost / times.len() as f64).sqrt();
    let tau = if q[1] > 0.0 { 1.0 / q[1].sqrt() } else { f64::INFINITY };
    if tau > no_decay_tau {
        return Ok(EnvelopeFit {
            tau_ns: None,
            gamma_fit: None,
            tau_kww_ns: None,
            amplitude: q[0],
            omega_rad_per_ns: q[2],
            rms_residual: rms,
        });
    }
    let kww = |w: &[f64], t: f64| 0.5 + 0.5 * w[0] * (-(w[1] * t).powf(w[2])).exp() * (w[3] * t + w[4]).cos();
    let fit2 = levenberg_marquardt(
        |w, r| {
            for (i, &t) in times.iter().enumerate() {
                r[i] = kww(w, t) - p[i];
            }
        },
        |w| {
            w[1] = w[1].max(1e-12);
            w[2] = w[2].clamp(0.2, 6.0);
        },
        &[q[0], 1.0 / tau, 2.0, q[2], q[3]],
        times.len(),
        &LmOptions::default(),
    )?;
    let w = fit2.params;
    Ok(EnvelopeFit {
        tau_ns: Some(tau),
        gamma_fit: Some(w[2]),
        tau_kww_ns: Some(1.0 / w[1]),
        amplitude: q[0],
        omega_rad_per_ns: q[2],
        rms_residual: rms,
    })
}

/// Embeds the computational block of a six-level propagator after a frame
/// correction, as used for a calibrated two-qubit gate.
pub fn framed_block(u: &CMatrix, frame: &[C64; 4]) -> CMatrix {
    let mut b = computational_block(u);
    for r in 0..4 {
        for c in 0..4 {
            b[(r, c)] *= frame[r];
        }
    }
    b
}
