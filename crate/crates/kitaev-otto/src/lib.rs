//! Thermodynamics of an ideal quantum Otto cycle whose working substance
//! is a Kitaev chain with power-law hopping and pairing.
//!
//! The crate computes quasiparticle spectra (momentum-space for
//! translation-invariant chains, Nambu/Bogoliubov-de Gennes for open or
//! disordered ones), the heats, work, efficiencies and operation modes of
//! the cycle, relaxation dynamics under thermal baths, and deterministic
//! parameter sweeps with peak extraction and power-law scaling fits.
//! Everything is cross-checked against brute-force references in
//! [`oracle`].

pub mod bdg;
pub mod cli;
pub mod couplings;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod otto;
pub mod spectrum;
pub mod sweep;

pub use couplings::{Boundary, CouplingSpec};
pub use error::{Error, Result};
pub use otto::{run_cycle, CycleOutcome, CycleParams, Mode};
pub use spectrum::{critical_field, dispersion, momentum_grid, ModeTable};
