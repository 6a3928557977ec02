//! Catalog of built-in material and device constants, read from the same
//! constructors the solvers use so the listing cannot drift from them.

use crate::dqd::DqdConfig;
use crate::gate::{GateParams, WkbModel};
use crate::kp::{HeterostructureProfile, Material, StrainState};
use crate::qtm::NoiseModel;
use serde::{Deserialize, Serialize};

/// Relative permittivity of the Al2O3 gate oxide. Listed for completeness;
/// no solver uses it.
pub const AL2O3_DIELECTRIC_CONSTANT: f64 = 9.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub group: String,
    pub name: String,
    pub values: Vec<f64>,
    pub unit: String,
    /// "nominal", "fitted", "derived" or "calibration default".
    pub provenance: String,
}

fn p(group: &str, name: &str, values: &[f64], unit: &str, provenance: &str) -> Preset {
    Preset {
        group: group.into(),
        name: name.into(),
        values: values.to_vec(),
        unit: unit.into(),
        provenance: provenance.into(),
    }
}

pub fn catalog() -> Vec<Preset> {
    let (ge, si, sige) = (Material::ge(), Material::si(), Material::si_ge(0.8));
    let gam = |m: &Material| [m.gamma1, m.gamma2, m.gamma3];
    let strain = StrainState::default();
    let stack = HeterostructureProfile::default_ge();
    let dqd = DqdConfig::default();
    let gate = GateParams::default();
    let noise = NoiseModel::default();
    let (wge, wsi) = (WkbModel::ge(), WkbModel::si());
    vec![
        p("material", "Ge gamma1,gamma2,gamma3", &gam(&ge), "1", "nominal"),
        p("material", "Si gamma1,gamma2,gamma3", &gam(&si), "1", "nominal"),
        p("material", "Si0.2Ge0.8 gamma1,gamma2,gamma3", &gam(&sige), "1", "derived"),
        p("material", "Ge eps_r", &[ge.dielectric_constant], "1", "nominal"),
        p("material", "Si eps_r", &[si.dielectric_constant], "1", "nominal"),
        p("material", "Si0.2Ge0.8 eps_r", &[sige.dielectric_constant], "1", "nominal"),
        p("material", "Al2O3 eps_r", &[AL2O3_DIELECTRIC_CONSTANT], "1", "nominal"),
        p("material", "valence band offset", &[-sige.valence_band_edge], "eV", "nominal"),
        p("strain", "eps_xx,eps_yy,eps_zz", &[strain.eps_xx, strain.eps_yy, strain.eps_zz], "1", "nominal"),
        p("strain", "a_v,b_v", &[strain.a_v, strain.b_v], "eV", "nominal"),
        p("geometry", "Ge thickness", &[stack.layers[1].thickness_nm], "nm", "nominal"),
        p("geometry", "plunger gate", &[dqd.plunger_size_nm, dqd.plunger_size_nm], "nm", "nominal"),
        p("geometry", "barrier gate length offset (L_s - x)", &[4.0], "nm", "nominal"),
        p("gate", "E_z", &[gate.e_z_mev], "meV", "nominal"),
        p("gate", "dE_z", &[gate.de_z_mev], "meV", "nominal"),
        p("gate", "t_c", &[gate.t_c_uev], "ueV", "nominal"),
        p("gate", "U1,U2", &[gate.u1_mev, gate.u2_mev], "meV", "nominal"),
        p("noise", "A_n", &[noise.a_n_uev], "ueV", "nominal"),
        p("noise", "tau_n", &[noise.tau_n_ns], "ns", "calibration default"),
        p("wkb", "Ge t0", &[wge.t0_mev], "meV", "fitted"),
        p("wkb", "Si t0", &[wsi.t0_mev], "meV", "fitted"),
        p("wkb", "E_b0", &[wge.e_b0_mev], "meV", "fitted"),
        p("wkb", "beta", &[wge.beta], "1", "fitted"),
        p("wkb", "Ge m*", &[wge.m_star], "m0", "fitted"),
        p("wkb", "Si m*", &[wsi.m_star], "m0", "fitted"),
        p("dqd", "E_b0 (grid solver)", &[dqd.e_b0_mev], "meV", "calibration default"),
        p("dqd", "well depth", &[dqd.well_depth_mev], "meV", "calibration default"),
    ]
}
