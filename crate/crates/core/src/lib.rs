//! Dark-state counting and construction for N-level quantum systems.
//!
//! The pipeline is: parse a system document, reduce it to the rotating-frame
//! Hamiltonian, split it into upper/lower blocks, dress both blocks into the
//! thick arrowhead form, then read off bright and dark states per degenerate
//! dressed-lower block from the SVD of the coupling slice. The [`verifier`]
//! checks the result against exact unitary evolution of the full Hamiltonian.
//!
//! Units are `ħ = 1`; every frequency is angular. All vectors and matrices
//! over bare states use descending level labels (`|N⟩` first).

pub mod catalog;
pub mod darkstate;
pub mod dot;
pub mod dressing;
pub mod error;
pub mod linalg;
pub mod par;
pub mod partition;
pub mod pipeline;
pub mod system_model;
pub mod verifier;

pub use darkstate::{analyze, BlockAnalysis, DarkStateReport};
pub use dressing::{dress, DressedSystem, Tolerances};
pub use error::Error;
pub use partition::{partition, BlockHamiltonian, Partition};
pub use pipeline::{analyze_batch, analyze_batch_sequential, run, Analysis};
pub use system_model::{parse_system, to_rotating_frame, LevelId, RotatingHamiltonian, SystemSpec};
pub use num_complex::Complex64 as C64;
