//! Run configuration. Every section has defaults; unknown keys are errors.
//! The resolved config is echoed into the manifest.

use clap::ValueEnum;
use holeqd::circuit::NoiseCorrelation;
use holeqd::dqd::DqdConfig;
use holeqd::gate::{GateParams, VariabilitySpec, WkbModel};
use holeqd::kp::{HeterostructureProfile, Material, StrainState};
use holeqd::qtm::{FrameCalibration, NoiseModel, OscillationOptions};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Bands,
    MassVsAngle,
    DqdSweep,
    WkbFit,
    ExchangeVsVbg,
    GateTime,
    Variability,
    Oscillation,
    AnsatzFidelity,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Bands => "bands",
            Experiment::MassVsAngle => "mass-vs-angle",
            Experiment::DqdSweep => "dqd-sweep",
            Experiment::WkbFit => "wkb-fit",
            Experiment::ExchangeVsVbg => "exchange-vs-vbg",
            Experiment::GateTime => "gate-time",
            Experiment::Variability => "variability",
            Experiment::Oscillation => "oscillation",
            Experiment::AnsatzFidelity => "ansatz-fidelity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WellMaterial {
    Ge,
    Si,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    /// Drives every stochastic component: noise, variability and ansatz angles.
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub structure: StructureSection,
    pub bands: BandsSection,
    pub mass: MassSection,
    pub dqd: DqdConfig,
    pub sweep: SweepSection,
    pub wkb: WkbSection,
    pub exchange: ExchangeSection,
    pub gate_time: GateTimeSection,
    pub gate: GateParams,
    pub noise: NoiseSection,
    pub variability: VariabilitySection,
    pub oscillation: OscillationSection,
    pub ansatz: AnsatzSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: None,
            seed: 0,
            out: None,
            threads: None,
            structure: StructureSection::default(),
            bands: BandsSection::default(),
            mass: MassSection::default(),
            dqd: DqdConfig::default(),
            sweep: SweepSection::default(),
            wkb: WkbSection::default(),
            exchange: ExchangeSection::default(),
            gate_time: GateTimeSection::default(),
            gate: GateParams::default(),
            noise: NoiseSection::default(),
            variability: VariabilitySection::default(),
            oscillation: OscillationSection::default(),
            ansatz: AnsatzSection::default(),
        }
    }
}

/// Barrier / well / barrier stack. `profile`, when given, replaces the
/// generated stack entirely.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StructureSection {
    pub well: WellMaterial,
    pub well_thickness_nm: f64,
    pub barrier_thickness_nm: f64,
    /// Ge fraction x of the Si(1-x)Ge(x) barriers.
    pub barrier_ge_fraction: f64,
    pub dz_nm: f64,
    pub strain: bool,
    pub profile: Option<HeterostructureProfile>,
}

impl Default for StructureSection {
    fn default() -> Self {
        StructureSection {
            well: WellMaterial::Ge,
            well_thickness_nm: 20.0,
            barrier_thickness_nm: 30.0,
            barrier_ge_fraction: 0.8,
            dz_nm: 0.5,
            strain: true,
            profile: None,
        }
    }
}

impl StructureSection {
    pub fn profile(&self) -> HeterostructureProfile {
        if let Some(p) = &self.profile {
            return p.clone();
        }
        let well = match self.well {
            WellMaterial::Ge => Material::ge(),
            WellMaterial::Si => Material::si(),
        };
        let strain = if self.strain {
            StrainState::default()
        } else {
            StrainState::relaxed()
        };
        HeterostructureProfile::quantum_well(
            well,
            self.well_thickness_nm,
            Material::si_ge(self.barrier_ge_fraction),
            self.barrier_thickness_nm,
            strain,
            self.dz_nm,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BandsSection {
    /// In-plane direction, degrees from [100].
    pub theta_deg: f64,
    pub k_max_invnm: f64,
    pub n_k: usize,
    pub n_states: usize,
}

impl Default for BandsSection {
    fn default() -> Self {
        BandsSection {
            theta_deg: 0.0,
            k_max_invnm: 0.5,
            n_k: 51,
            n_states: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MassSection {
    pub fit_window_invnm: f64,
    pub n_k: usize,
    pub n_states: usize,
    pub n_angles: usize,
}

impl Default for MassSection {
    fn default() -> Self {
        MassSection {
            fit_window_invnm: 0.15,
            n_k: 8,
            n_states: 4,
            n_angles: 19,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub l_s_nm: Vec<f64>,
    pub v_bg_mv: Vec<f64>,
    /// Tunnel-coupling window (ueV) used by the WKB fit.
    pub fit_min_uev: f64,
    pub fit_max_uev: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            l_s_nm: vec![20.0, 25.0, 30.0, 35.0, 40.0, 45.0],
            v_bg_mv: vec![0.0, 20.0, 40.0],
            fit_min_uev: 1.0,
            fit_max_uev: 100.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WkbSection {
    pub preset: WellMaterial,
    /// Replaces the preset when given.
    pub model: Option<WkbModel>,
}

impl Default for WkbSection {
    fn default() -> Self {
        WkbSection {
            preset: WellMaterial::Ge,
            model: None,
        }
    }
}

impl WkbSection {
    pub fn model(&self) -> WkbModel {
        self.model.unwrap_or(match self.preset {
            WellMaterial::Ge => WkbModel::ge(),
            WellMaterial::Si => WkbModel::si(),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExchangeSection {
    pub l_s_nm: Vec<f64>,
    pub v_bg_min_mv: f64,
    pub v_bg_max_mv: f64,
    pub n_v: usize,
    /// Range for the reported slope.
    pub slope_range_mv: (f64, f64),
}

impl Default for ExchangeSection {
    fn default() -> Self {
        ExchangeSection {
            l_s_nm: vec![20.0, 25.0, 30.0, 35.0, 40.0],
            v_bg_min_mv: 0.0,
            v_bg_max_mv: 60.0,
            n_v: 61,
            slope_range_mv: (0.0, 40.0),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateTimeSection {
    pub v_bg_mv: f64,
    pub l_s_min_nm: f64,
    pub l_s_max_nm: f64,
    pub l_s_step_nm: f64,
    pub target_ns: f64,
}

impl Default for GateTimeSection {
    fn default() -> Self {
        GateTimeSection {
            v_bg_mv: 40.0,
            l_s_min_nm: 10.0,
            l_s_max_nm: 50.0,
            l_s_step_nm: 1.0,
            target_ns: 10.0,
        }
    }
}

/// Telegraph noise on t_c; its seed comes from the top-level `seed`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    pub a_n_uev: f64,
    pub tau_n_ns: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let n = NoiseModel::default();
        NoiseSection {
            a_n_uev: n.a_n_uev,
            tau_n_ns: n.tau_n_ns,
        }
    }
}

impl NoiseSection {
    pub fn model(&self, seed: u64) -> NoiseModel {
        NoiseModel {
            a_n_uev: self.a_n_uev,
            tau_n_ns: self.tau_n_ns,
            seed,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariabilitySection {
    pub l_s_nm: f64,
    pub v_bg_mv: f64,
    pub sigma_ls_nm: f64,
    pub n_samples: usize,
    pub n_bins: usize,
}

impl Default for VariabilitySection {
    fn default() -> Self {
        let s = VariabilitySpec::default();
        VariabilitySection {
            l_s_nm: 35.0,
            v_bg_mv: 40.0,
            sigma_ls_nm: s.sigma_ls_nm,
            n_samples: s.n_samples,
            n_bins: s.n_bins,
        }
    }
}

impl VariabilitySection {
    pub fn spec(&self, seed: u64) -> VariabilitySpec {
        VariabilitySpec {
            sigma_ls_nm: self.sigma_ls_nm,
            n_samples: self.n_samples,
            seed,
            n_bins: self.n_bins,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillationSection {
    pub t_max_ns: f64,
    pub n_times: usize,
    pub n_traj: usize,
    pub frame: FrameCalibration,
}

impl Default for OscillationSection {
    fn default() -> Self {
        let o = OscillationOptions::default();
        OscillationSection {
            t_max_ns: o.t_max_ns,
            n_times: o.n_times,
            n_traj: o.n_traj,
            frame: o.frame,
        }
    }
}

impl OscillationSection {
    pub fn options(&self) -> OscillationOptions {
        OscillationOptions {
            t_max_ns: self.t_max_ns,
            n_times: self.n_times,
            n_traj: self.n_traj,
            frame: self.frame,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnsatzSection {
    pub rows: usize,
    pub cols: usize,
    pub n_stages: Vec<usize>,
    pub n_traj: usize,
    pub correlation: NoiseCorrelation,
    /// Explicit rotation angles; seeded from the top-level seed otherwise.
    pub angles: Option<Vec<f64>>,
}

impl Default for AnsatzSection {
    fn default() -> Self {
        AnsatzSection {
            rows: 2,
            cols: 3,
            n_stages: (1..=6).collect(),
            n_traj: 1000,
            correlation: NoiseCorrelation::PerGate,
            angles: None,
        }
    }
}
