//! Physical constants in the unit systems used across the crate.

/// ħ²/(2 m0) in eV·nm².
pub const HBAR2_OVER_2M0_EV_NM2: f64 = 0.0381;

/// ħ²/(2 m0) in meV·nm².
pub const HBAR2_OVER_2M0_MEV_NM2: f64 = 38.1;

/// ħ in μeV·ns.
pub const HBAR_UEV_NS: f64 = 0.658_211_956_9;

/// q²/(4π ε0) in eV·nm.
pub const COULOMB_EV_NM: f64 = 1.439_964_548;

/// Bohr magneton in meV/T.
pub const BOHR_MAGNETON_MEV_PER_T: f64 = 0.057_883_818_06;

/// WKB decay constant √(2 m* m0 E)/ħ in nm⁻¹ for a barrier `energy_mev`
/// above the tunnelling energy.
pub fn decay_constant(m_star: f64, energy_mev: f64) -> f64 {
    (m_star * energy_mev / HBAR2_OVER_2M0_MEV_NM2).sqrt()
}
