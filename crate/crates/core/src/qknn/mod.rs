//! Quantum K-nearest-neighbors over Hamming distance.
//!
//! The training set is encoded as an equal-amplitude superposition of basis
//! states holding each bit vector and its class label. A reversible pipeline
//! then compares every branch against the (classical) test vector, tallies
//! per-feature agreement into an accumulator register with a controlled
//! incrementer cascade, and raises a flag qubit exactly on branches whose
//! Hamming distance is below a threshold `t`. Classification reads the class
//! register conditioned on the flag.
//!
//! Register map for `n` features and `C` classes (`l = ⌈log₂(n+1)⌉`):
//!
//! ```text
//! diff:  n qubits        per-feature agreement bits
//! cls:   ⌈log₂C⌉ qubits  class label
//! acc:   l + 1 qubits    running count, pre-loaded with a threshold offset
//! flag:  1 qubit         1 ⟺ HammingDistance < t
//! ```

mod circuits;
mod classify;
mod types;

pub use circuits::{
    apply_accumulator, apply_difference, apply_flag, build_accumulator_circuit,
    build_difference_circuit, build_flag_circuit, build_incrementer, build_or_circuit, or_gate,
    threshold_offset, FlagMode,
};
pub use classify::{
    calibrate_threshold, classify, encode_training_superposition, ClassificationResult,
    ExecutionMode, QknnConfig, ThresholdMode,
};
pub use types::{BitVector, LabeledBitVector, QknnLayout, TrainingSet};

use thiserror::Error;

use crate::sim::SimError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QknnError {
    #[error("bit vector string must contain only '0' and '1', got {0:?}")]
    InvalidBitString(char),
    #[error("training set must not be empty")]
    EmptyTrainingSet,
    #[error("bit vector length {got} does not match feature count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("class label {label} out of range for {class_count} classes")]
    LabelOutOfRange { label: u32, class_count: u32 },
    #[error("class count must be at least 1")]
    NoClasses,
    #[error("threshold {t} outside valid range 1..={max}")]
    ThresholdOutOfRange { t: usize, max: usize },
    #[error("neighbor count {k} outside valid range 1..={max}")]
    NeighborCountOutOfRange { k: usize, max: usize },
    #[error("or-highbits flag mode requires a power-of-two threshold, got {t}")]
    ThresholdNotPowerOfTwo { t: usize },
    #[error("accumulator init {value} does not fit in {width} qubits")]
    AccumulatorInitTooWide { value: u64, width: usize },
    #[error("no training branch within threshold {t} and widening disabled")]
    NoNeighbors { t: usize },
    #[error("problem needs {needed} qubits, exceeding the supported {max}")]
    TooManyQubits { needed: usize, max: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}
