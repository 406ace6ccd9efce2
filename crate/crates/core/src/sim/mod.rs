//! Exact simulation of pure quantum states under a fixed gate set.
//!
//! The default backend stores amplitudes in a sorted sparse map keyed by
//! basis-state integer; the dense backend stores the full 2^n vector and
//! exists as a cross-check oracle. Both represent the same mathematical
//! state and every operation is implemented for both.

mod gate;
mod state;
mod unitary;

pub use gate::{Circuit, Gate};
pub use state::{Backend, MeasurementRecord, QuantumState, NORM_TOLERANCE};
pub use unitary::{circuit_unitary, UnitaryMatrix, UNITARY_QUBIT_LIMIT};

use thiserror::Error;

/// Errors from state construction, gate application, and measurement.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("qubit index {index} out of range for {n}-qubit state")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("gate uses qubit {index} more than once")]
    DuplicateQubit { index: usize },
    #[error("basis index {basis} out of range for {n} qubits")]
    BasisOutOfRange { basis: u64, n: usize },
    #[error("{backend:?} backend supports 1..={max} qubits, got {n}")]
    UnsupportedQubitCount {
        n: usize,
        max: usize,
        backend: Backend,
    },
    #[error("qubit counts differ: {left} vs {right}")]
    QubitCountMismatch { left: usize, right: usize },
    #[error("state norm degenerated below tolerance")]
    DegenerateNorm,
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("unitary extraction limited to {max} qubits, circuit has {n}")]
    UnitaryTooLarge { n: usize, max: usize },
}
