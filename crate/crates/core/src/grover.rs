//! Grover search over n-qubit basis states: marked-item phase oracle,
//! diffusion operator, and the amplified-measurement loop.

use rand::Rng;
use thiserror::Error;

use crate::sim::{Backend, Circuit, QuantumState, SimError};

/// Size guard on [`grover_search`]: the outcome table has 2^n entries.
pub const SEARCH_QUBIT_LIMIT: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroverError {
    #[error("marked state {marked} out of range for {n} qubits")]
    MarkedOutOfRange { marked: u64, n: usize },
    #[error("iteration count {iterations} exceeds the 2^n guard for n = {n}")]
    TooManyIterations { iterations: usize, n: usize },
    #[error("search requires 1..={max} qubits, got {n}")]
    UnsupportedQubitCount { n: usize, max: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// A search instance: register width, the marked basis state, and how many
/// oracle+diffusion rounds to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroverSpec {
    pub n: usize,
    pub marked: u64,
    pub iterations: usize,
}

impl GroverSpec {
    pub fn new(n: usize, marked: u64, iterations: usize) -> Result<Self, GroverError> {
        if n < 1 || n > SEARCH_QUBIT_LIMIT {
            return Err(GroverError::UnsupportedQubitCount { n, max: SEARCH_QUBIT_LIMIT });
        }
        if marked >> n != 0 {
            return Err(GroverError::MarkedOutOfRange { marked, n });
        }
        if iterations > 1 << n {
            return Err(GroverError::TooManyIterations { iterations, n });
        }
        Ok(GroverSpec { n, marked, iterations })
    }
}

/// Multi-controlled Z on all n qubits, as H on the last qubit around an MCX.
fn push_mcz(circuit: &mut Circuit, n: usize) {
    let target = n - 1;
    circuit.h(target);
    circuit.mcx((0..target).collect(), target);
    circuit.h(target);
}

/// Phase oracle flipping the sign of `|marked⟩` only: X gates on the zero
/// bits of `marked`, a multi-controlled Z, and the X gates undone.
pub fn build_oracle(n: usize, marked: u64) -> Result<Circuit, GroverError> {
    if n < 1 {
        return Err(GroverError::UnsupportedQubitCount { n, max: SEARCH_QUBIT_LIMIT });
    }
    if marked >> n != 0 {
        return Err(GroverError::MarkedOutOfRange { marked, n });
    }
    let mut circuit = Circuit::new(n);
    let zero_bits: Vec<usize> = (0..n).filter(|&q| marked >> q & 1 == 0).collect();
    for &q in &zero_bits {
        circuit.x(q);
    }
    push_mcz(&mut circuit, n);
    for &q in &zero_bits {
        circuit.x(q);
    }
    Ok(circuit)
}

/// Diffusion operator `2|s⟩⟨s| − I` (up to global sign) about the uniform
/// superposition: H layer, phase flip about |0…0⟩, H layer.
pub fn build_diffusion(n: usize) -> Result<Circuit, GroverError> {
    if n < 1 {
        return Err(GroverError::UnsupportedQubitCount { n, max: SEARCH_QUBIT_LIMIT });
    }
    let mut circuit = Circuit::new(n);
    for q in 0..n {
        circuit.h(q);
    }
    for q in 0..n {
        circuit.x(q);
    }
    push_mcz(&mut circuit, n);
    for q in 0..n {
        circuit.x(q);
    }
    for q in 0..n {
        circuit.h(q);
    }
    Ok(circuit)
}

/// Exact outcome distribution plus one sampled measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct GroverOutcome {
    /// `probabilities[k]` = exact probability of measuring basis state `k`.
    pub probabilities: Vec<f64>,
    /// One full-register measurement drawn from that distribution.
    pub sampled: u64,
}

impl GroverOutcome {
    pub fn probability_of(&self, basis: u64) -> f64 {
        self.probabilities[basis as usize]
    }
}

/// Run `(diffusion ∘ oracle)^iterations` on the uniform superposition.
pub fn grover_search<R: Rng + ?Sized>(
    spec: &GroverSpec,
    rng: &mut R,
) -> Result<GroverOutcome, GroverError> {
    let spec = GroverSpec::new(spec.n, spec.marked, spec.iterations)?;
    let mut state = QuantumState::zero(spec.n, Backend::Dense)?;
    let mut prep = Circuit::new(spec.n);
    for q in 0..spec.n {
        prep.h(q);
    }
    state.apply_circuit(&prep)?;

    let oracle = build_oracle(spec.n, spec.marked)?;
    let diffusion = build_diffusion(spec.n)?;
    for _ in 0..spec.iterations {
        state.apply_circuit(&oracle)?;
        state.apply_circuit(&diffusion)?;
    }

    let mut probabilities = vec![0.0; 1 << spec.n];
    for (k, amp) in state.support() {
        probabilities[k as usize] = amp.norm_sqr();
    }
    let qubits: Vec<usize> = (0..spec.n).collect();
    let sampled = *state
        .sample_counts(&qubits, 1, rng)?
        .keys()
        .next()
        .expect("one shot yields one outcome");
    Ok(GroverOutcome { probabilities, sampled })
}

/// Iteration heuristic `⌊π/4·√(2^n)⌋`, clamped to at least 1. The floor
/// avoids overshooting at n = 2, where a single iteration is already exact.
pub fn optimal_iterations(n: usize) -> usize {
    let amplitude = (1u64 << n) as f64;
    ((std::f64::consts::FRAC_PI_4 * amplitude.sqrt()).floor() as usize).max(1)
}
