//! Double-quantum-dot eigenproblem along the inter-dot axis, tunnel
//! coupling from the binding/anti-binding splitting, and the on-site
//! Coulomb integral.
//!
//! Energies are in meV (hole energies measured upward from the well
//! bottom), lengths in nm, tunnel couplings in μeV.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{SymTridiagonal, C64};
use crate::units::{COULOMB_EV_NM, HBAR2_OVER_2M0_MEV_NM2};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Smallest barrier (meV) that still counts as two separate dots.
pub const MIN_BARRIER_MEV: f64 = 2.0;

/// Double-dot geometry. `l_s_nm` is the gap between the two plunger wells;
/// the barrier gate fills it, shortened by 4 nm by default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DqdConfig {
    pub l_s_nm: f64,
    /// Plunger edge length; the square dot is `plunger_size_nm` on a side.
    pub plunger_size_nm: f64,
    /// Defaults to `l_s_nm − 4`.
    pub barrier_length_nm: Option<f64>,
    pub m_star: f64,
    /// Barrier-gate voltage magnitude (V).
    pub v_bg_volts: f64,
    pub well_depth_mev: f64,
    pub eps_r: f64,
    /// Barrier height at zero gate voltage (meV).
    pub e_b0_mev: f64,
    /// Gate lever arm: barrier drops by `beta` meV per mV.
    pub beta: f64,
    pub edge_smoothing_nm: f64,
    pub dx_nm: f64,
    /// Flat region at the confinement ceiling beyond each dot.
    pub padding_nm: f64,
}

impl Default for DqdConfig {
    fn default() -> Self {
        DqdConfig {
            l_s_nm: 35.0,
            plunger_size_nm: 20.0,
            barrier_length_nm: None,
            m_star: 0.058,
            v_bg_volts: 0.040,
            well_depth_mev: 60.0,
            eps_r: 16.0,
            e_b0_mev: 46.0,
            beta: 0.5,
            edge_smoothing_nm: 2.0,
            dx_nm: 0.1,
            padding_nm: 40.0,
        }
    }
}

impl DqdConfig {
    pub fn barrier_length(&self) -> f64 {
        self.barrier_length_nm.unwrap_or(self.l_s_nm - 4.0)
    }

    /// Barrier height above the well bottoms (meV).
    pub fn barrier_height(&self) -> f64 {
        self.e_b0_mev - self.beta * self.v_bg_volts * 1e3
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("l_s_nm", self.l_s_nm),
            ("plunger_size_nm", self.plunger_size_nm),
            ("m_star", self.m_star),
            ("well_depth_mev", self.well_depth_mev),
            ("eps_r", self.eps_r),
            ("edge_smoothing_nm", self.edge_smoothing_nm),
            ("dx_nm", self.dx_nm),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.barrier_length() > 0.0) {
            return Err(Error::invalid(format!(
                "barrier gate length {} nm must be positive (L_S = {} nm)",
                self.barrier_length(),
                self.l_s_nm
            )));
        }
        if !(self.v_bg_volts >= 0.0) {
            return Err(Error::invalid("v_bg_volts is a magnitude and must be >= 0"));
        }
        if !(self.padding_nm >= 0.0) {
            return Err(Error::invalid("padding_nm must be >= 0"));
        }
        Ok(())
    }
}

/// Potential energy for holes on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialProfile {
    pub x_nm: Vec<f64>,
    pub v_mev: Vec<f64>,
}

impl PotentialProfile {
    pub fn new(x_nm: Vec<f64>, v_mev: Vec<f64>) -> Result<Self> {
        if x_nm.len() != v_mev.len() || x_nm.len() < 3 {
            return Err(Error::invalid("profile needs >= 3 matched grid points"));
        }
        let dx = x_nm[1] - x_nm[0];
        if !(dx > 0.0) {
            return Err(Error::NonUniformGrid("grid must increase".into()));
        }
        for w in x_nm.windows(2) {
            if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx {
                return Err(Error::NonUniformGrid(format!("spacing {} vs {dx}", w[1] - w[0])));
            }
        }
        Ok(PotentialProfile { x_nm, v_mev })
    }

    pub fn dx(&self) -> f64 {
        (self.x_nm[self.x_nm.len() - 1] - self.x_nm[0]) / (self.x_nm.len() - 1) as f64
    }

    /// Exact mirror symmetry of both grid and potential about the midpoint.
    pub fn is_mirror_symmetric(&self) -> bool {
        let n = self.v_mev.len();
        n % 2 == 1
            && (0..n / 2).all(|i| {
                self.v_mev[i] == self.v_mev[n - 1 - i]
                    && (self.x_nm[i] + self.x_nm[n - 1 - i]).abs() <= 1e-9 * self.dx()
            })
    }
}

fn smooth_box(x: f64, center: f64, width: f64, s: f64) -> f64 {
    0.5 * (libm::erf((x - center + 0.5 * width) / s) - libm::erf((x - center - 0.5 * width) / s))
}

/// Two erf-smoothed plunger wells flanking a barrier plateau. `detuning_mev`
/// lowers the left well bottom by ε/2 and raises the right one by ε/2.
pub fn build_dqd_potential(cfg: &DqdConfig, detuning_mev: f64) -> Result<PotentialProfile> {
    cfg.validate()?;
    let e_b = cfg.barrier_height();
    if e_b <= MIN_BARRIER_MEV {
        return Err(Error::BarrierCollapsed { barrier_mev: e_b });
    }
    let lb = cfg.barrier_length();
    let w = cfg.plunger_size_nm;
    let s = cfg.edge_smoothing_nm;
    let c = 0.5 * (lb + w);
    let half = 0.5 * lb + w + cfg.padding_nm;
    let m = (half / cfg.dx_nm).ceil() as i64;
    let x: Vec<f64> = (-m..=m).map(|i| i as f64 * cfg.dx_nm).collect();
    let d = cfg.well_depth_mev;
    // Evaluate on |x| so the ε = 0 profile is symmetric bit for bit.
    let sym = |x: f64| {
        let a = x.abs();
        let wells = smooth_box(a, -c, w, s) + smooth_box(a, c, w, s);
        let b = smooth_box(a, 0.0, lb, s);
        d * (1.0 - wells - b) + e_b * b
    };
    let v = x
        .iter()
        .map(|&x| {
            let mut v = sym(x);
            if detuning_mev != 0.0 {
                v += 0.5 * detuning_mev * (smooth_box(x, c, w, s) - smooth_box(x, -c, w, s));
            }
            v
        })
        .collect();
    PotentialProfile::new(x, v)
}

/// Single plunger well of the double-dot geometry, centered at 0.
pub fn build_single_dot_potential(cfg: &DqdConfig) -> Result<PotentialProfile> {
    cfg.validate()?;
    let w = cfg.plunger_size_nm;
    let half = 0.5 * w + cfg.padding_nm;
    let m = (half / cfg.dx_nm).ceil() as i64;
    let x: Vec<f64> = (-m..=m).map(|i| i as f64 * cfg.dx_nm).collect();
    let v = x
        .iter()
        .map(|&x| cfg.well_depth_mev * (1.0 - smooth_box(x.abs(), 0.0, w, cfg.edge_smoothing_nm)))
        .collect();
    PotentialProfile::new(x, v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundStatePair {
    pub x_nm: Vec<f64>,
    pub e_b_mev: f64,
    pub e_ab_mev: f64,
    /// Normalized so Σ ψ² Δx = 1; positive overall sign.
    pub psi_b: Vec<f64>,
    /// Normalized; positive on the right-hand side.
    pub psi_ab: Vec<f64>,
}

fn hamiltonian(v: &[f64], t: f64) -> Result<SymTridiagonal> {
    SymTridiagonal::new(v.iter().map(|v| v + 2.0 * t).collect(), vec![-t; v.len() - 1])
}

fn count_nodes(psi: &[f64]) -> usize {
    let peak = psi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * peak;
    let mut last = 0.0f64;
    let mut nodes = 0;
    for &p in psi {
        if p.abs() <= floor {
            continue;
        }
        if last != 0.0 && p.signum() != last.signum() {
            nodes += 1;
        }
        last = p;
    }
    nodes
}

fn normalize(psi: &mut [f64], dx: f64) {
    let n = (psi.iter().map(|v| v * v).sum::<f64>() * dx).sqrt();
    psi.iter_mut().for_each(|v| *v /= n);
}

/// Lowest eigenstates of −(ħ²/2m* m0) d²/dx² + V with hard walls just
/// outside the grid. Returns energies ascending.
fn lowest_states(profile: &PotentialProfile, m_star: f64, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let dx = profile.dx();
    let t = HBAR2_OVER_2M0_MEV_NM2 / (m_star * dx * dx);
    let e = hamiltonian(&profile.v_mev, t)?.lowest(k)?;
    Ok((e.values, e.vectors))
}

/// Even and odd sectors of a mirror-symmetric profile, solved on the right
/// half so parity is exact even when the pair is degenerate to rounding.
fn symmetric_states(profile: &PotentialProfile, m_star: f64) -> Result<[(f64, Vec<f64>, bool); 3]> {
    let n = profile.v_mev.len();
    let mid = n / 2;
    let dx = profile.dx();
    let t = HBAR2_OVER_2M0_MEV_NM2 / (m_star * dx * dx);
    let half = &profile.v_mev[mid..];

    let mut off = vec![-t; half.len() - 1];
    off[0] = -std::f64::consts::SQRT_2 * t;
    let even = SymTridiagonal::new(half.iter().map(|v| v + 2.0 * t).collect(), off)?.lowest(2)?;
    let odd = hamiltonian(&half[1..], t)?.lowest(1)?;

    let unfold_even = |phi: &[f64]| {
        let mut psi = vec![0.0; n];
        psi[mid] = std::f64::consts::SQRT_2 * phi[0];
        for j in 1..phi.len() {
            psi[mid + j] = phi[j];
            psi[mid - j] = phi[j];
        }
        normalize(&mut psi, dx);
        psi
    };
    let unfold_odd = |phi: &[f64]| {
        let mut psi = vec![0.0; n];
        for j in 1..=phi.len() {
            psi[mid + j] = phi[j - 1];
            psi[mid - j] = -phi[j - 1];
        }
        normalize(&mut psi, dx);
        psi
    };
    Ok([
        (even.values[0], unfold_even(&even.vectors[0]), true),
        (even.values[1], unfold_even(&even.vectors[1]), true),
        (odd.values[0], unfold_odd(&odd.vectors[0]), false),
    ])
}

pub fn solve_bound_states(profile: &PotentialProfile, m_star: f64) -> Result<BoundStatePair> {
    if !(m_star > 0.0) {
        return Err(Error::invalid("m_star must be positive"));
    }
    let dx = profile.dx();
    let ceiling = profile.v_mev[0].min(*profile.v_mev.last().expect("non-empty"));

    let (energies, mut psis) = if profile.is_mirror_symmetric() {
        let mut states = symmetric_states(profile, m_star)?.to_vec();
        states.sort_by(|a, b| a.0.total_cmp(&b.0));
        if !states[0].2 || states[1].2 {
            return Err(Error::invalid(
                "symmetric profile gave a binding/anti-binding pair with the wrong parity",
            ));
        }
        let e = vec![states[0].0, states[1].0];
        let p = vec![states[0].1.clone(), states[1].1.clone()];
        (e, p)
    } else {
        let (e, mut v) = lowest_states(profile, m_star, 2)?;
        v.iter_mut().for_each(|p| normalize(p, dx));
        (e, v)
    };

    let bound = energies.iter().filter(|&&e| e < ceiling).count();
    if bound < 2 {
        return Err(Error::NotEnoughBoundStates { found: bound, needed: 2 });
    }
    if psis[0].iter().sum::<f64>() < 0.0 {
        psis[0].iter_mut().for_each(|v| *v = -*v);
    }
    let lean: f64 = psis[1].iter().zip(&profile.x_nm).map(|(p, x)| p * x).sum();
    if lean < 0.0 {
        psis[1].iter_mut().for_each(|v| *v = -*v);
    }
    let nodes_b = count_nodes(&psis[0]);
    if nodes_b != 0 {
        return Err(Error::WrongNodeCount {
            state: "binding",
            found: nodes_b,
            expected: 0,
        });
    }
    let nodes_ab = count_nodes(&psis[1]);
    if nodes_ab != 1 {
        return Err(Error::WrongNodeCount {
            state: "anti-binding",
            found: nodes_ab,
            expected: 1,
        });
    }
    let psi_ab = psis.pop().expect("two states");
    let psi_b = psis.pop().expect("two states");
    Ok(BoundStatePair {
        x_nm: profile.x_nm.clone(),
        e_b_mev: energies[0],
        e_ab_mev: energies[1],
        psi_b,
        psi_ab,
    })
}

/// Ground state of a single-well profile: (energy meV, normalized ψ).
pub fn solve_ground_state(profile: &PotentialProfile, m_star: f64) -> Result<(f64, Vec<f64>)> {
    let (e, mut v) = lowest_states(profile, m_star, 1)?;
    let mut psi = v.pop().expect("one state");
    normalize(&mut psi, profile.dx());
    if psi.iter().sum::<f64>() < 0.0 {
        psi.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((e[0], psi))
}

/// t_c = |E_AB − E_B| / 2 in μeV.
pub fn tunnel_coupling(pair: &BoundStatePair) -> f64 {
    0.5 * (pair.e_ab_mev - pair.e_b_mev).abs() * 1e3
}

/// Convenience chain: potential at zero detuning, bound states, t_c (μeV).
pub fn tc_for(cfg: &DqdConfig) -> Result<f64> {
    let p = build_dqd_potential(cfg, 0.0)?;
    Ok(tunnel_coupling(&solve_bound_states(&p, cfg.m_star)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub l_s_nm: f64,
    pub v_bg_mv: f64,
    /// `None` when the cell failed; see `error`.
    pub t_c_uev: Option<f64>,
    pub error: Option<String>,
}

/// Cartesian sweep over spacings and barrier-gate voltages (mV). Failed
/// cells are kept with their error message.
pub fn tc_sweep(template: &DqdConfig, l_s_nm: &[f64], v_bg_mv: &[f64], exec: Exec) -> Result<Vec<SweepRow>> {
    if l_s_nm.is_empty() || v_bg_mv.is_empty() {
        return Err(Error::invalid("sweep lists must be non-empty"));
    }
    let nv = v_bg_mv.len();
    Ok(exec.map(l_s_nm.len() * nv, |idx| {
        let (l, v) = (l_s_nm[idx / nv], v_bg_mv[idx % nv]);
        let cfg = DqdConfig {
            l_s_nm: l,
            v_bg_volts: v * 1e-3,
            ..template.clone()
        };
        match tc_for(&cfg) {
            Ok(t) => SweepRow {
                l_s_nm: l,
                v_bg_mv: v,
                t_c_uev: Some(t),
                error: None,
            },
            Err(e) => SweepRow {
                l_s_nm: l,
                v_bg_mv: v,
                t_c_uev: None,
                error: Some(e.to_string()),
            },
        }
    }))
}

/// ∬ over a unit cube of 1/|r − r'|, in units of the side length to the fifth.
pub const CUBE_SELF_INTEGRAL: f64 = 1.882_312_644;

/// Probability density on a cubic, cell-centered grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Density3d {
    pub n: usize,
    pub spacing_nm: f64,
    /// Center of cell (0, 0, 0).
    pub origin_nm: [f64; 3],
    /// Index `(ix * n + iy) * n + iz`, in nm⁻³.
    pub values: Vec<f64>,
}

impl Density3d {
    /// Averages `f` over `sub³` sample points per cell of a cube of
    /// half-width `half_width` around `center`.
    pub fn rasterize<F: Fn([f64; 3]) -> f64>(center: [f64; 3], half_width: f64, n: usize, sub: usize, f: F) -> Self {
        let h = 2.0 * half_width / n as f64;
        let origin = [
            center[0] - half_width + 0.5 * h,
            center[1] - half_width + 0.5 * h,
            center[2] - half_width + 0.5 * h,
        ];
        let sub = sub.max(1);
        let offs: Vec<f64> = (0..sub).map(|s| ((s as f64 + 0.5) / sub as f64 - 0.5) * h).collect();
        let mut values = vec![0.0; n * n * n];
        for ix in 0..n {
            for iy in 0..n {
                for iz in 0..n {
                    let c = [
                        origin[0] + ix as f64 * h,
                        origin[1] + iy as f64 * h,
                        origin[2] + iz as f64 * h,
                    ];
                    let mut acc = 0.0;
                    for ox in &offs {
                        for oy in &offs {
                            for oz in &offs {
                                acc += f([c[0] + ox, c[1] + oy, c[2] + oz]);
                            }
                        }
                    }
                    values[(ix * n + iy) * n + iz] = acc / (sub * sub * sub) as f64;
                }
            }
        }
        Density3d {
            n,
            spacing_nm: h,
            origin_nm: origin,
            values,
        }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spacing_nm.powi(3)
    }

    pub fn normalized(mut self) -> Self {
        let s = self.integral();
        self.values.iter_mut().for_each(|v| *v /= s);
        self
    }

    /// Dilates the density by `s` about the origin, keeping it normalized.
    pub fn dilated(&self, s: f64) -> Self {
        let s3 = s.powi(3);
        Density3d {
            n: self.n,
            spacing_nm: self.spacing_nm * s,
            origin_nm: self.origin_nm.map(|o| o * s),
            values: self.values.iter().map(|v| v / s3).collect(),
        }
    }

    /// Product density ρx(x) ρy(y) ρz(z) from 1-D densities on their own
    /// grids, rasterized onto `n³` cells spanning 3× the RMS radius about
    /// the mean position, then renormalized.
    pub fn from_separable(axes: [(&[f64], &[f64]); 3], n: usize) -> Result<Self> {
        let mut mean = [0.0; 3];
        let mut var = 0.0;
        for (a, (grid, rho)) in axes.iter().enumerate() {
            if grid.len() != rho.len() || grid.len() < 2 {
                return Err(Error::invalid("density axis grid/value length mismatch"));
            }
            let h = grid[1] - grid[0];
            let norm: f64 = rho.iter().sum::<f64>() * h;
            if (norm - 1.0).abs() > 1e-6 {
                return Err(Error::Unnormalized(norm));
            }
            let m: f64 = grid.iter().zip(*rho).map(|(x, r)| x * r).sum::<f64>() * h;
            let v: f64 = grid.iter().zip(*rho).map(|(x, r)| (x - m).powi(2) * r).sum::<f64>() * h;
            mean[a] = m;
            var += v;
        }
        let half = 3.0 * var.sqrt();
        let interp = |grid: &[f64], rho: &[f64], x: f64| {
            let h = grid[1] - grid[0];
            let u = (x - grid[0]) / h;
            if u < 0.0 || u > (grid.len() - 1) as f64 {
                return 0.0;
            }
            let i = (u.floor() as usize).min(grid.len() - 2);
            let f = u - i as f64;
            rho[i] * (1.0 - f) + rho[i + 1] * f
        };
        let d = Density3d::rasterize(mean, half, n, 1, |r| {
            interp(axes[0].0, axes[0].1, r[0]) * interp(axes[1].0, axes[1].1, r[1]) * interp(axes[2].0, axes[2].1, r[2])
        });
        Ok(d.normalized())
    }
}

/// U = (q²/4πε0 ε_r) ∬ ρ(r) ρ(r') / |r − r'| in meV, by grid double sum
/// (FFT convolution) with the uniform-cube self-cell term on the diagonal.
pub fn coulomb_energy(density: &Density3d, eps_r: f64) -> Result<f64> {
    let norm = density.integral();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Unnormalized(norm));
    }
    if !(eps_r > 0.0) {
        return Err(Error::invalid("eps_r must be positive"));
    }
    let n = density.n;
    let h = density.spacing_nm;
    let m = 2 * n;
    let h3 = h * h * h;
    let idx = |i: usize, j: usize, k: usize| (i * m + j) * m + k;

    let mut q = vec![C64::new(0.0, 0.0); m * m * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                q[idx(i, j, k)] = C64::new(density.values[(i * n + j) * n + k] * h3, 0.0);
            }
        }
    }
    let wrap = |d: usize| -> Option<f64> {
        match d {
            d if d < n => Some(d as f64),
            d if d > n => Some(d as f64 - m as f64),
            _ => None,
        }
    };
    let mut g = vec![C64::new(0.0, 0.0); m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let (Some(a), Some(b), Some(c)) = (wrap(i), wrap(j), wrap(k)) else {
                    continue;
                };
                let r = (a * a + b * b + c * c).sqrt() * h;
                g[idx(i, j, k)] = C64::new(if r == 0.0 { CUBE_SELF_INTEGRAL / h } else { 1.0 / r }, 0.0);
            }
        }
    }
    let mut planner = FftPlanner::new();
    fft3(&mut q, m, &mut planner, false);
    fft3(&mut g, m, &mut planner, false);
    for (a, b) in q.iter_mut().zip(&g) {
        *a *= b;
    }
    fft3(&mut q, m, &mut planner, true);
    let scale = 1.0 / (m * m * m) as f64;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let rho = density.values[(i * n + j) * n + k] * h3;
                sum += rho * q[idx(i, j, k)].re * scale;
            }
        }
    }
    Ok(COULOMB_EV_NM * 1e3 / eps_r * sum)
}

fn fft3(data: &mut [C64], m: usize, planner: &mut FftPlanner<f64>, inverse: bool) {
    let fft = if inverse {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    // innermost axis is contiguous
    fft.process(data);
    let mut line = vec![C64::new(0.0, 0.0); m];
    for axis_stride in [m, m * m] {
        for base in 0..m * m * m {
            // visit each line once, through its first element
            if (base / axis_stride) % m != 0 {
                continue;
            }
            for (t, v) in line.iter_mut().enumerate() {
                *v = data[base + t * axis_stride];
            }
            fft.process(&mut line);
            for (t, v) in line.iter().enumerate() {
                data[base + t * axis_stride] = *v;
            }
        }
    }
}

/// Grid points per axis for the Coulomb integral.
pub const COULOMB_GRID: usize = 32;

/// On-site Coulomb energy (meV) of one dot: in-plane ground envelope of a
/// single plunger well along x and y, times the supplied vertical density.
pub fn onsite_coulomb(cfg: &DqdConfig, z_nm: &[f64], rho_z: &[f64]) -> Result<f64> {
    let single = build_single_dot_potential(cfg)?;
    let (_, psi) = solve_ground_state(&single, cfg.m_star)?;
    let rho_x: Vec<f64> = psi.iter().map(|p| p * p).collect();
    let d = Density3d::from_separable(
        [(&single.x_nm, &rho_x), (&single.x_nm, &rho_x), (z_nm, rho_z)],
        COULOMB_GRID,
    )?;
    coulomb_energy(&d, cfg.eps_r)
}
