//! Qubit arrays with parametrically modulated waveguide coupling: photon-pair emission, driven
//! steady states and their entanglement, and mechanical backaction.
//!
//! Two engines are provided. [`lindblad`] solves the Markovian master equation exactly on the full
//! qubit Hilbert space (or, in [`collective`], on the permutation-symmetric sector), and
//! [`perturbative`] evaluates the diagrammatic expansion to first order in the motion amplitude.

pub mod collective;
pub mod error;
pub mod experiments;
pub mod lindblad;
pub mod linalg;
pub mod observables;
pub mod perturbative;
pub mod quadrature;
pub mod system;

pub use error::{Error, Result};
pub use linalg::{c64, CMat};
pub use system::{
    build_effective_hamiltonian, build_jump_operators, build_liouvillian, build_lowering_ops,
    Direction, MotionKind, MotionSpec, OperatorSet, Superoperator, SystemSpec,
};
