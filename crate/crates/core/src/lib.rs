//! Exact spectrum of the separable pairing Hamiltonian `h = S+_0 S-_0`.
//!
//! [`oracle`] diagonalizes the Hamiltonian in the pair basis; [`bethe`]
//! solves the rapidity equations; [`state`] rebuilds eigenvectors from
//! rapidities and [`spectrum`] assembles and cross-checks full spectra.

pub mod basis;
pub mod bethe;
pub mod error;
pub mod model;
pub mod oracle;
pub mod spectrum;
pub mod state;

pub use basis::{enumerate_basis, Occupation, PairBasis};
pub use bethe::{RapiditySet, SeedStrategy, SolverOptions, ZeroModeRoots};
pub use error::{Error, Result};
pub use model::{ModelConfig, ModelSpace, RawShell, ShellLevel};
pub use oracle::OracleEigenpairs;
pub use spectrum::{Mode, SectorReport, SpectrumLine, SpectrumReport};
pub use state::{CollectivePair, ExpandedState};
