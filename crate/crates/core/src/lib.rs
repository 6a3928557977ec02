//! Multiscale simulation of hole-spin quantum-dot processors in strained
//! germanium.
//!
//! The crate chains five layers, each usable on its own:
//!
//! - [`kp`]: strained 4-band Luttinger-Kohn subbands of a SiGe/Ge/SiGe well
//!   and in-plane effective masses.
//! - [`dqd`]: 1-D double-dot eigenproblem for tunnel coupling, plus the
//!   on-site Coulomb integral.
//! - [`gate`]: WKB tunnel model, six-level exchange gate Hamiltonian, CZ
//!   timing and spacing-variability Monte Carlo.
//! - [`qtm`]: quantum-trajectory propagation under random-telegraph
//!   tunnel-coupling noise.
//! - [`circuit`]: state-vector simulation of a small dot array running a
//!   hardware-efficient ansatz with noisy CZ gates.
//!
//! Units: the band solver works in eV and nm; the dot and gate layers use
//! meV or μeV (noted per field) with times in ns.

pub mod circuit;
pub mod dqd;
pub mod error;
pub mod exec;
pub mod gate;
pub mod kp;
pub mod linalg;
pub mod presets;
pub mod qtm;
pub mod units;

pub use error::{Error, Result};
pub use exec::Exec;
