//! Tripartite entanglement dynamics of a trapped two-level ion coupled to an
//! external laser and a quantized cavity mode.
//!
//! The composite system is qubit (A) ⊗ phonon (B) ⊗ photon (C). Hamiltonians
//! come in three tiers (`block`, `ld`, `full`), states are evolved exactly by
//! eigendecomposition, and one-vs-rest negativity and linear entropy are
//! tabulated over (θ, T) grids.
//!
//! Units: ħ = 1 and the scaled time `T = a·t` is always given in degrees,
//! where `a = g·η_c / 2`.

pub mod error;
pub mod fock;
pub mod hamiltonian;
pub mod initial;
pub mod io;
pub mod measures;
pub mod propagator;
pub mod sweep;

pub use error::{Error, Result};
pub use fock::{basis_index, HermitianOperator, Qubit, SpaceDims, StateVector, C64};
pub use hamiltonian::{BlockSpec, ModelParams, Tier};
pub use initial::{Family, InitialSpec};
pub use measures::{DensityMatrix, MeasureResult, Subsystem};
pub use propagator::Propagator;
pub use sweep::{DMode, GhzCheckConfig, GhzReport, Grid, SweepConfig, SweepOutput, SweepRecord};
