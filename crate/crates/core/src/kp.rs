//! Strained 4-band Luttinger-Kohn model of a SiGe/Ge/SiGe quantum well,
//! discretized along z, with in-plane dispersion and effective-mass
//! extraction.
//!
//! Spinor order is (HH +3/2, LH +1/2, LH −1/2, HH −3/2). Grid point `i` and
//! component `c` map to matrix index `4 i + c`, which keeps the Hamiltonian
//! banded. Energies are hole energies in eV: the top of the spectrum is the
//! ground hole subband.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{linear_fit, HermitianBand, SubspaceOptions, C64};
use crate::units::HBAR2_OVER_2M0_EV_NM2 as E0;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub const MAX_GRID_SPACING_NM: f64 = 0.5;
pub const MAX_K_INVNM: f64 = 2.0;
const BANDWIDTH: usize = 5;
const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub name: String,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    /// Valence-band edge (eV) relative to unstrained Ge.
    pub valence_band_edge: f64,
    pub dielectric_constant: f64,
}

impl Material {
    pub fn ge() -> Self {
        Material {
            name: "Ge".into(),
            gamma1: 13.25,
            gamma2: 4.20,
            gamma3: 5.56,
            valence_band_edge: 0.0,
            dielectric_constant: 16.0,
        }
    }

    /// Si Luttinger parameters. The band edge is set level with Ge so Si can
    /// stand in as the well material of the same stack.
    pub fn si() -> Self {
        Material {
            name: "Si".into(),
            gamma1: 4.26,
            gamma2: 0.34,
            gamma3: 1.45,
            valence_band_edge: 0.0,
            dielectric_constant: 11.7,
        }
    }

    /// Si(1−x)Ge(x) barrier: Luttinger parameters linearly interpolated,
    /// band edge 0.3 eV below the Ge well.
    pub fn si_ge(x_ge: f64) -> Self {
        let (ge, si) = (Material::ge(), Material::si());
        let mix = |a: f64, b: f64| x_ge * a + (1.0 - x_ge) * b;
        Material {
            name: format!("Si{:.2}Ge{:.2}", 1.0 - x_ge, x_ge),
            gamma1: mix(ge.gamma1, si.gamma1),
            gamma2: mix(ge.gamma2, si.gamma2),
            gamma3: mix(ge.gamma3, si.gamma3),
            valence_band_edge: -0.3,
            dielectric_constant: 15.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma1 > 0.0) {
            return Err(Error::invalid(format!("{}: gamma1 must be positive", self.name)));
        }
        if !(self.gamma1 > 2.0 * self.gamma2) {
            return Err(Error::invalid(format!(
                "{}: gamma1 > 2 gamma2 required for a positive HH z-mass",
                self.name
            )));
        }
        if !self.gamma3.is_finite() || !self.valence_band_edge.is_finite() {
            return Err(Error::invalid(format!("{}: non-finite parameter", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrainState {
    pub eps_xx: f64,
    pub eps_yy: f64,
    pub eps_zz: f64,
    /// Hydrostatic deformation potential (eV).
    pub a_v: f64,
    /// Shear deformation potential (eV).
    pub b_v: f64,
}

impl Default for StrainState {
    fn default() -> Self {
        StrainState {
            eps_xx: -0.006,
            eps_yy: -0.006,
            eps_zz: 0.0042,
            a_v: 2.0,
            b_v: -2.3,
        }
    }
}

impl StrainState {
    pub fn relaxed() -> Self {
        StrainState {
            eps_xx: 0.0,
            eps_yy: 0.0,
            eps_zz: 0.0,
            ..StrainState::default()
        }
    }

    pub fn hh_shift(&self) -> f64 {
        -self.a_v * (self.eps_xx + self.eps_yy + self.eps_zz)
    }

    pub fn lh_shift(&self) -> f64 {
        -0.5 * self.b_v * (self.eps_xx + self.eps_yy - 2.0 * self.eps_zz)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub material: Material,
    pub thickness_nm: f64,
    pub strain: StrainState,
}

/// Layer stack between two hard walls, sampled on a uniform grid with
/// spacing `dz_nm`. Interior points sit at `(i + 1) dz`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeterostructureProfile {
    pub layers: Vec<Layer>,
    pub dz_nm: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct PointProps {
    g1: f64,
    g2: f64,
    g3: f64,
    edge: f64,
    hh: f64,
    lh: f64,
}

impl PointProps {
    fn of(layer: &Layer) -> Self {
        let m = &layer.material;
        PointProps {
            g1: m.gamma1,
            g2: m.gamma2,
            g3: m.gamma3,
            edge: m.valence_band_edge,
            hh: layer.strain.hh_shift(),
            lh: layer.strain.lh_shift(),
        }
    }

    fn average(a: Self, b: Self) -> Self {
        PointProps {
            g1: 0.5 * (a.g1 + b.g1),
            g2: 0.5 * (a.g2 + b.g2),
            g3: 0.5 * (a.g3 + b.g3),
            edge: 0.5 * (a.edge + b.edge),
            hh: 0.5 * (a.hh + b.hh),
            lh: 0.5 * (a.lh + b.lh),
        }
    }
}

impl HeterostructureProfile {
    /// Barrier / well / barrier stack with strain in the well only.
    pub fn quantum_well(
        well: Material,
        well_nm: f64,
        barrier: Material,
        barrier_nm: f64,
        well_strain: StrainState,
        dz_nm: f64,
    ) -> Self {
        let barrier_layer = Layer {
            material: barrier,
            thickness_nm: barrier_nm,
            strain: StrainState::relaxed(),
        };
        HeterostructureProfile {
            layers: vec![
                barrier_layer.clone(),
                Layer {
                    material: well,
                    thickness_nm: well_nm,
                    strain: well_strain,
                },
                barrier_layer,
            ],
            dz_nm,
        }
    }

    /// Si0.2Ge0.8 (30 nm) / strained Ge (20 nm) / Si0.2Ge0.8 (30 nm), 0.5 nm grid.
    pub fn default_ge() -> Self {
        Self::quantum_well(
            Material::ge(),
            20.0,
            Material::si_ge(0.8),
            30.0,
            StrainState::default(),
            0.5,
        )
    }

    /// Same stack with Si as the well material.
    pub fn default_si() -> Self {
        Self::quantum_well(
            Material::si(),
            20.0,
            Material::si_ge(0.8),
            30.0,
            StrainState::default(),
            0.5,
        )
    }

    pub fn with_well_thickness(mut self, well_nm: f64) -> Self {
        if self.layers.len() == 3 {
            self.layers[1].thickness_nm = well_nm;
        }
        self
    }

    pub fn with_dz(mut self, dz_nm: f64) -> Self {
        self.dz_nm = dz_nm;
        self
    }

    /// Copy with every layer relaxed (Bir-Pikus term switched off).
    pub fn without_strain(&self) -> Self {
        let mut p = self.clone();
        for l in &mut p.layers {
            l.strain = StrainState::relaxed();
        }
        p
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness_nm).sum()
    }

    /// Valence-band discontinuities (eV) at each internal interface,
    /// positive when the band edge rises going up the stack.
    pub fn band_offsets(&self) -> Vec<f64> {
        self.layers
            .windows(2)
            .map(|w| w[1].material.valence_band_edge - w[0].material.valence_band_edge)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::invalid("heterostructure has no layers"));
        }
        for l in &self.layers {
            l.material.validate()?;
            if !(l.thickness_nm > 0.0) {
                return Err(Error::invalid(format!(
                    "layer {} has non-positive thickness",
                    l.material.name
                )));
            }
        }
        if !(self.dz_nm > 0.0) {
            return Err(Error::NonUniformGrid(format!("grid spacing {} nm", self.dz_nm)));
        }
        if self.dz_nm > MAX_GRID_SPACING_NM {
            return Err(Error::GridTooCoarse {
                spacing_nm: self.dz_nm,
                max_nm: MAX_GRID_SPACING_NM,
            });
        }
        let cells = self.total_thickness() / self.dz_nm;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::NonUniformGrid(format!(
                "total thickness {} nm is not a multiple of the {} nm spacing",
                self.total_thickness(),
                self.dz_nm
            )));
        }
        if cells.round() < 3.0 {
            return Err(Error::NonUniformGrid("fewer than two interior grid points".into()));
        }
        Ok(())
    }

    /// Number of interior grid points.
    pub fn n_points(&self) -> usize {
        (self.total_thickness() / self.dz_nm).round() as usize - 1
    }

    pub fn z_grid(&self) -> Vec<f64> {
        (0..self.n_points()).map(|i| (i + 1) as f64 * self.dz_nm).collect()
    }

    fn props_at(&self, z: f64) -> PointProps {
        let tol = 1e-9 * self.dz_nm;
        let mut top = 0.0;
        for (i, l) in self.layers.iter().enumerate() {
            top += l.thickness_nm;
            if (z - top).abs() < tol && i + 1 < self.layers.len() {
                return PointProps::average(PointProps::of(l), PointProps::of(&self.layers[i + 1]));
            }
            if z < top {
                return PointProps::of(l);
            }
        }
        PointProps::of(self.layers.last().expect("validated non-empty"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// Full Luttinger-Kohn coupling (S and R blocks).
    #[default]
    Full,
    /// S = R = 0: independent HH and LH ladders.
    Diagonal,
}

/// Discretized Hamiltonian together with the grid it lives on.
#[derive(Debug, Clone)]
pub struct LkHamiltonian {
    pub matrix: HermitianBand,
    pub dz_nm: f64,
    pub n_points: usize,
}

pub fn assemble_lk_hamiltonian(profile: &HeterostructureProfile, k_par: (f64, f64)) -> Result<LkHamiltonian> {
    assemble_with(profile, k_par, Coupling::Full)
}

pub fn assemble_with(
    profile: &HeterostructureProfile,
    k_par: (f64, f64),
    coupling: Coupling,
) -> Result<LkHamiltonian> {
    profile.validate()?;
    let (kx, ky) = k_par;
    if !(kx.is_finite() && ky.is_finite()) || kx.hypot(ky) > MAX_K_INVNM {
        return Err(Error::invalid(format!(
            "|k_par| = {} nm^-1 outside the envelope-function range (max {MAX_K_INVNM})",
            kx.hypot(ky)
        )));
    }
    let n = profile.n_points();
    let dz = profile.dz_nm;
    let pts: Vec<PointProps> = profile.z_grid().iter().map(|&z| profile.props_at(z)).collect();
    // mids[j] sits between points j-1 and j; mids[0] and mids[n] touch the walls.
    let mids: Vec<PointProps> = (0..=n).map(|j| profile.props_at((j as f64 + 0.5) * dz)).collect();

    let kpar2 = kx * kx + ky * ky;
    let km = C64::new(kx, -ky);
    let mut h = HermitianBand::zeros(4 * n, BANDWIDTH);
    let inv_dz2 = 1.0 / (dz * dz);

    for i in 0..n {
        let p = pts[i];
        let a_hh = |m: &PointProps| m.g1 - 2.0 * m.g2;
        let a_lh = |m: &PointProps| m.g1 + 2.0 * m.g2;
        let hh = -E0 * (a_hh(&mids[i]) + a_hh(&mids[i + 1])) * inv_dz2 - E0 * (p.g1 + p.g2) * kpar2
            + p.edge
            + p.hh;
        let lh = -E0 * (a_lh(&mids[i]) + a_lh(&mids[i + 1])) * inv_dz2 - E0 * (p.g1 - p.g2) * kpar2
            + p.edge
            + p.lh;
        for (c, d) in [(0, hh), (1, lh), (2, lh), (3, hh)] {
            h.add(4 * i + c, 4 * i + c, C64::new(d, 0.0));
        }
        if i + 1 < n {
            let m = &mids[i + 1];
            let t_hh = C64::new(E0 * a_hh(m) * inv_dz2, 0.0);
            let t_lh = C64::new(E0 * a_lh(m) * inv_dz2, 0.0);
            for (c, t) in [(0, t_hh), (1, t_lh), (2, t_lh), (3, t_hh)] {
                h.add(4 * i + c, 4 * (i + 1) + c, t);
            }
        }
        if coupling == Coupling::Diagonal {
            continue;
        }
        let r = -SQRT3 * E0 * C64::new(-p.g3 * (kx * kx - ky * ky), 2.0 * p.g2 * kx * ky);
        h.add(4 * i, 4 * i + 2, r);
        h.add(4 * i + 1, 4 * i + 3, r);
        if i + 1 < n {
            // S = −2√3 ε0 k₋ ½{γ3, k_z}; the symmetrized k_z term couples i and i+1 only.
            let g3 = mids[i + 1].g3;
            let k_up = C64::new(0.0, -g3 / (2.0 * dz));
            let k_dn = C64::new(0.0, g3 / (2.0 * dz));
            let s_up = -2.0 * SQRT3 * E0 * km * k_up;
            let s_dn = -2.0 * SQRT3 * E0 * km * k_dn;
            h.add(4 * i, 4 * (i + 1) + 1, -s_up);
            h.add(4 * (i + 1), 4 * i + 1, -s_dn);
            h.add(4 * i + 2, 4 * (i + 1) + 3, s_up);
            h.add(4 * (i + 1) + 2, 4 * i + 3, s_dn);
        }
    }
    Ok(LkHamiltonian {
        matrix: h,
        dz_nm: dz,
        n_points: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandLabel {
    #[serde(rename = "HH")]
    Hh,
    #[serde(rename = "LH")]
    Lh,
}

impl std::fmt::Display for BandLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BandLabel::Hh => "HH",
            BandLabel::Lh => "LH",
        })
    }
}

/// Subband energies (eV, descending) with envelopes normalized so that
/// Σ_i Σ_c |ψ_c(z_i)|² Δz = 1.
#[derive(Debug, Clone)]
pub struct Subbands {
    pub energies: Vec<f64>,
    /// Column `s` is state `s`, length 4N in interleaved order.
    pub envelopes: DMatrix<C64>,
    /// Spinor weight on the HH components (0 to 1).
    pub hh_weight: Vec<f64>,
    pub dz_nm: f64,
    pub residual: f64,
}

impl Subbands {
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Component `c` of state `s` along the grid.
    pub fn component(&self, s: usize, c: usize) -> Vec<C64> {
        let n = self.envelopes.nrows() / 4;
        (0..n).map(|i| self.envelopes[(4 * i + c, s)]).collect()
    }

    /// Probability density of state `s` per grid point (nm⁻¹).
    pub fn density(&self, s: usize) -> Vec<f64> {
        let n = self.envelopes.nrows() / 4;
        (0..n)
            .map(|i| (0..4).map(|c| self.envelopes[(4 * i + c, s)].norm_sqr()).sum())
            .collect()
    }

    pub fn label(&self, s: usize) -> BandLabel {
        if self.hh_weight[s] >= 0.5 {
            BandLabel::Hh
        } else {
            BandLabel::Lh
        }
    }
}

pub fn solve_subbands(h: &LkHamiltonian, n_states: usize) -> Result<Subbands> {
    if n_states == 0 || n_states > h.matrix.dim() {
        return Err(Error::invalid(format!(
            "n_states = {n_states} must be in 1..={}",
            h.matrix.dim()
        )));
    }
    let res = h.matrix.top_eigenpairs(n_states, &SubspaceOptions::default())?;
    let scale = 1.0 / h.dz_nm.sqrt();
    let mut envelopes = res.vectors;
    envelopes.iter_mut().for_each(|v| *v *= scale);
    let n = h.n_points;
    let hh_weight = (0..n_states)
        .map(|s| {
            let w: f64 = (0..n)
                .map(|i| envelopes[(4 * i, s)].norm_sqr() + envelopes[(4 * i + 3, s)].norm_sqr())
                .sum();
            w * h.dz_nm
        })
        .collect();
    Ok(Subbands {
        energies: res.values,
        envelopes,
        hh_weight,
        dz_nm: h.dz_nm,
        residual: res.residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SubbandDispersion {
    /// In-plane unit direction.
    pub direction: (f64, f64),
    /// Signed |k| along `direction` (nm⁻¹).
    pub k: Vec<f64>,
    pub k_points: Vec<(f64, f64)>,
    /// Per k-point, descending (eV).
    pub energies: Vec<Vec<f64>>,
    pub band_labels: Vec<Vec<BandLabel>>,
    pub hh_weights: Vec<Vec<f64>>,
}

/// Subband energies at `n_k` evenly spaced points from 0 to `k_max` along
/// `direction`.
pub fn dispersion_sweep(
    profile: &HeterostructureProfile,
    direction: (f64, f64),
    k_max: f64,
    n_k: usize,
    n_states: usize,
    exec: Exec,
) -> Result<SubbandDispersion> {
    if n_k < 8 {
        return Err(Error::invalid(format!("dispersion sweep needs n_k >= 8, got {n_k}")));
    }
    let k: Vec<f64> = (0..n_k).map(|i| k_max * i as f64 / (n_k - 1) as f64).collect();
    dispersion_at(profile, direction, &k, n_states, exec)
}

/// Subband energies at explicit signed |k| values along `direction`.
pub fn dispersion_at(
    profile: &HeterostructureProfile,
    direction: (f64, f64),
    k: &[f64],
    n_states: usize,
    exec: Exec,
) -> Result<SubbandDispersion> {
    profile.validate()?;
    let norm = direction.0.hypot(direction.1);
    if !(norm > 0.0) {
        return Err(Error::invalid("direction must be a non-zero in-plane vector"));
    }
    let dir = (direction.0 / norm, direction.1 / norm);
    let k_points: Vec<(f64, f64)> = k.iter().map(|&q| (q * dir.0, q * dir.1)).collect();
    let solved = exec.try_map(k_points.len(), |i| {
        assemble_lk_hamiltonian(profile, k_points[i])
            .and_then(|h| solve_subbands(&h, n_states))
            .map_err(|e| Error::AtKPoint {
                index: i,
                source: Box::new(e),
            })
    })?;
    let mut energies = Vec::with_capacity(k.len());
    let mut hh_weights = Vec::with_capacity(k.len());
    let mut band_labels: Vec<Vec<BandLabel>> = Vec::with_capacity(k.len());
    for sb in solved {
        let labels = (0..sb.len())
            .map(|s| {
                let w = sb.hh_weight[s];
                match band_labels.last() {
                    Some(prev) if (w - 0.5).abs() < 1e-6 => prev[s],
                    _ => sb.label(s),
                }
            })
            .collect();
        band_labels.push(labels);
        energies.push(sb.energies);
        hh_weights.push(sb.hh_weight);
    }
    Ok(SubbandDispersion {
        direction: dir,
        k: k.to_vec(),
        k_points,
        energies,
        band_labels,
        hh_weights,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassFit {
    /// m*/m0.
    pub mass: f64,
    /// Band-edge energy from the fit (eV).
    pub e0: f64,
    /// RMS fit residual relative to the band's energy drop over the window.
    pub relative_residual: f64,
    /// Set when `relative_residual` exceeds 5%.
    pub nonparabolic: bool,
    pub n_points: usize,
    pub subband: usize,
}

/// Fits E(k) = E0 − ħ²k²/(2 m* m0) to the highest subband carrying `band`
/// at k = 0, using points with |k| ≤ `fit_window`.
pub fn extract_effective_mass(disp: &SubbandDispersion, band: BandLabel, fit_window: f64) -> Result<MassFit> {
    let k0 = disp
        .k
        .iter()
        .position(|k| k.abs() < 1e-12)
        .ok_or_else(|| Error::invalid("dispersion has no k = 0 point"))?;
    let subband = disp.band_labels[k0]
        .iter()
        .position(|&l| l == band)
        .ok_or_else(|| Error::invalid(format!("no {band} subband among the computed states")))?;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, &k) in disp.k.iter().enumerate() {
        if k.abs() <= fit_window * (1.0 + 1e-12) {
            x.push(k * k);
            y.push(disp.energies[i][subband]);
        }
    }
    if x.len() < 5 {
        return Err(Error::invalid(format!(
            "fit window {fit_window} nm^-1 holds {} k-points, need at least 5",
            x.len()
        )));
    }
    let fit = linear_fit(&x, &y)?;
    if !(fit.slope < 0.0) {
        return Err(Error::FitRejected(format!(
            "{band} subband curvature {} eV nm^2 is not hole-like",
            fit.slope
        )));
    }
    let x_max = x.iter().cloned().fold(0.0, f64::max);
    let drop = (fit.slope * x_max).abs();
    let relative_residual = fit.rms_residual / drop;
    Ok(MassFit {
        mass: -E0 / fit.slope,
        e0: fit.intercept,
        relative_residual,
        nonparabolic: relative_residual > 0.05,
        n_points: x.len(),
        subband,
    })
}

#[derive(Debug, Clone)]
pub struct MassOptions {
    pub fit_window: f64,
    /// k-points across [0, fit_window].
    pub n_k: usize,
    pub n_states: usize,
    pub exec: Exec,
}

impl Default for MassOptions {
    fn default() -> Self {
        MassOptions {
            fit_window: 0.15,
            n_k: 8,
            n_states: 4,
            exec: Exec::default(),
        }
    }
}

/// In-plane HH mass along the direction at angle `theta_deg` from [100].
pub fn hh_mass_along(profile: &HeterostructureProfile, theta_deg: f64, opts: &MassOptions) -> Result<MassFit> {
    let t = theta_deg.to_radians();
    let disp = dispersion_sweep(profile, (t.cos(), t.sin()), opts.fit_window, opts.n_k, opts.n_states, opts.exec)?;
    extract_effective_mass(&disp, BandLabel::Hh, opts.fit_window)
}

#[derive(Debug, Clone, Serialize)]
pub struct AngleMassTable {
    pub theta_deg: Vec<f64>,
    pub mass: Vec<f64>,
    /// (max − min) / mean.
    pub anisotropy: f64,
}

/// HH mass at `n_angles` directions evenly spanning [0°, 90°].
pub fn mass_vs_angle(profile: &HeterostructureProfile, n_angles: usize, opts: &MassOptions) -> Result<AngleMassTable> {
    if n_angles < 4 {
        return Err(Error::invalid(format!("mass_vs_angle needs n_angles >= 4, got {n_angles}")));
    }
    let theta_deg: Vec<f64> = (0..n_angles).map(|i| 90.0 * i as f64 / (n_angles - 1) as f64).collect();
    let mass = theta_deg
        .iter()
        .map(|&t| hh_mass_along(profile, t, opts).map(|f| f.mass))
        .collect::<Result<Vec<_>>>()?;
    let max = mass.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = mass.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = mass.iter().sum::<f64>() / mass.len() as f64;
    Ok(AngleMassTable {
        theta_deg,
        mass,
        anisotropy: (max - min) / mean,
    })
}

/// Zone-center energies of the top HH and LH subbands (eV).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZoneCenterEdges {
    pub hh: f64,
    pub lh: f64,
}

impl ZoneCenterEdges {
    pub fn split(&self) -> f64 {
        self.hh - self.lh
    }
}

pub fn zone_center_edges(profile: &HeterostructureProfile, n_states: usize) -> Result<ZoneCenterEdges> {
    let sb = solve_subbands(&assemble_lk_hamiltonian(profile, (0.0, 0.0))?, n_states)?;
    let find = |b: BandLabel| {
        (0..sb.len())
            .find(|&s| sb.label(s) == b)
            .map(|s| sb.energies[s])
            .ok_or_else(|| Error::invalid(format!("no {b} subband in the top {n_states} states")))
    };
    Ok(ZoneCenterEdges {
        hh: find(BandLabel::Hh)?,
        lh: find(BandLabel::Lh)?,
    })
}

/// Vertical probability density (nm⁻¹) of the ground hole subband at k = 0,
/// with its grid.
pub fn ground_vertical_density(profile: &HeterostructureProfile) -> Result<(Vec<f64>, Vec<f64>)> {
    let sb = solve_subbands(&assemble_lk_hamiltonian(profile, (0.0, 0.0))?, 2)?;
    // Average the Kramers pair so the density does not depend on how the
    // degenerate subspace was rotated.
    let d0 = sb.density(0);
    let d1 = sb.density(1);
    Ok((profile.z_grid(), d0.iter().zip(&d1).map(|(a, b)| 0.5 * (a + b)).collect()))
}
