//! Quantum-circuit simulation and a Hamming-distance quantum K-nearest-neighbors
//! classifier, with the classical pieces needed to benchmark it: a plain KNN
//! baseline and a CSV ingestion/split/normalize/binarize pipeline for the
//! Wisconsin Diagnostic Breast Cancer dataset.
//!
//! Modules:
//!
//! - [`sim`] — exact pure-state simulation over {H, X, CNOT, CCX, MCX, SWAP,
//!   CSWAP, ID} with a sparse default backend and a dense cross-check backend.
//! - [`swap_test`] — the C-SWAP fidelity test and the fidelity-derived distance.
//! - [`grover`] — marked-item phase oracle, diffusion operator, and search.
//! - [`qknn`] — training-set superposition, reversible distance accumulation,
//!   threshold flagging, and post-selected classification.
//! - [`knn`] — classical K-nearest-neighbors baseline.
//! - [`data`] — WDBC ingestion, seeded stratified splits, scaling, binarization.
//!
//! Bit ordering convention, used everywhere: qubit `i` is bit `i` (the i-th
//! least significant bit) of a basis-state integer.

pub mod data;
pub mod grover;
pub mod knn;
pub mod qknn;
pub mod sim;
pub mod swap_test;

pub use sim::{Backend, Circuit, Gate, MeasurementRecord, QuantumState, SimError};
