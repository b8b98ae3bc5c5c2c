//! Vibronic spectra of the neutral group-IV vacancy centers in diamond
//! (SiV, GeV, SnV, PbV) from the linear `(e_g ⊗ e_u) ⊗ E_g` product
//! Jahn-Teller Hamiltonian, solved by exact diagonalization in a truncated
//! two-mode Fock basis.
//!
//! ```no_run
//! use xv_pjt::{analysis, presets::Defect};
//!
//! let delta = analysis::delta_splitting(&Defect::SiV.params(), 15).unwrap();
//! println!("SiV(0) A2u-Eu gap: {delta:.2} meV");
//! ```

pub mod analysis;
pub mod cli;
pub mod eigensolver;
pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod lanczos;
pub mod params;
pub mod presets;
pub mod sparse;

pub use error::{Error, Result};
pub use hamiltonian::{PjtParams, VibronicHamiltonian};
