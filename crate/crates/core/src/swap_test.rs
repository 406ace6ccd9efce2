//! The C-SWAP (swap-test) circuit: ancilla statistics encode the fidelity
//! |⟨x|y⟩| of two states, which converts to a distance in [0, √2].

use rand::Rng;
use thiserror::Error;

use crate::sim::{Circuit, QuantumState, SimError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SwapTestError {
    #[error("swap-test registers must not overlap (qubit {index} reused)")]
    OverlappingRegisters { index: usize },
    #[error("swap-test registers must have equal nonzero length ({x} vs {y})")]
    RegisterLengthMismatch { x: usize, y: usize },
    #[error("input states must have equal qubit counts ({x} vs {y})")]
    StateSizeMismatch { x: usize, y: usize },
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Register assignment for a swap test: one ancilla plus two equal-length
/// registers holding the compared states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapTestLayout {
    ancilla: usize,
    register_x: Vec<usize>,
    register_y: Vec<usize>,
}

impl SwapTestLayout {
    pub fn new(
        ancilla: usize,
        register_x: Vec<usize>,
        register_y: Vec<usize>,
    ) -> Result<Self, SwapTestError> {
        if register_x.is_empty() || register_x.len() != register_y.len() {
            return Err(SwapTestError::RegisterLengthMismatch {
                x: register_x.len(),
                y: register_y.len(),
            });
        }
        let mut seen = vec![ancilla];
        for &q in register_x.iter().chain(&register_y) {
            if seen.contains(&q) {
                return Err(SwapTestError::OverlappingRegisters { index: q });
            }
            seen.push(q);
        }
        Ok(SwapTestLayout { ancilla, register_x, register_y })
    }

    /// Packed layout: ancilla at qubit 0, x at 1..=m, y above x.
    pub fn packed(register_len: usize) -> Self {
        SwapTestLayout {
            ancilla: 0,
            register_x: (1..=register_len).collect(),
            register_y: (register_len + 1..=2 * register_len).collect(),
        }
    }

    pub fn ancilla(&self) -> usize {
        self.ancilla
    }

    pub fn register_x(&self) -> &[usize] {
        &self.register_x
    }

    pub fn register_y(&self) -> &[usize] {
        &self.register_y
    }

    pub fn qubit_count(&self) -> usize {
        1 + self
            .register_x
            .iter()
            .chain(&self.register_y)
            .chain(std::iter::once(&self.ancilla))
            .max()
            .copied()
            .unwrap_or(0)
    }
}

/// H on the ancilla, one CSWAP per register pair, H on the ancilla.
pub fn build_swap_test(layout: &SwapTestLayout) -> Circuit {
    let mut circuit = Circuit::new(layout.qubit_count());
    circuit.h(layout.ancilla);
    for (&a, &b) in layout.register_x.iter().zip(&layout.register_y) {
        circuit.cswap(layout.ancilla, a, b);
    }
    circuit.h(layout.ancilla);
    circuit
}

fn composite_state(x: &QuantumState, y: &QuantumState) -> Result<QuantumState, SwapTestError> {
    if x.qubit_count() != y.qubit_count() {
        return Err(SwapTestError::StateSizeMismatch {
            x: x.qubit_count(),
            y: y.qubit_count(),
        });
    }
    let ancilla = QuantumState::zero(1, x.backend())?;
    Ok(ancilla.tensor(x)?.tensor(y)?)
}

/// Exact P(ancilla = 0) of the swap test on `|0⟩ ⊗ x ⊗ y`; equals
/// `1/2 + 1/2·|⟨x|y⟩|²`.
pub fn swap_test_p0(x: &QuantumState, y: &QuantumState) -> Result<f64, SwapTestError> {
    let mut state = composite_state(x, y)?;
    let layout = SwapTestLayout::packed(x.qubit_count());
    state.apply_circuit(&build_swap_test(&layout))?;
    Ok(state.probability_of(layout.ancilla(), false)?)
}

/// Fidelity recovered from a swap-test P(ancilla = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityEstimate {
    /// |⟨x|y⟩| in [0, 1].
    pub fidelity: f64,
    /// Set when p0 fell outside [0.5, 1] (possible under sampling noise)
    /// and the result was clamped.
    pub clamped: bool,
}

/// Invert `p0 = 1/2 + 1/2·f²` to `f = √(2·p0 − 1)`, clamped to [0, 1].
///
/// The returned value is the fidelity |⟨x|y⟩| itself, not the squared
/// overlap the ancilla statistics measure directly.
pub fn fidelity_from_p0(p0: f64) -> FidelityEstimate {
    const EPS: f64 = 1e-9;
    let clamped = !(0.5 - EPS..=1.0 + EPS).contains(&p0);
    let fidelity = (2.0 * p0 - 1.0).max(0.0).sqrt().min(1.0);
    FidelityEstimate { fidelity, clamped }
}

/// Distance induced by fidelity: `√(2 − 2·f)`, in [0, √2].
/// 0 for identical states, √2 for orthogonal ones, decreasing in `f`.
pub fn quantum_euclidean_distance(fidelity: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&fidelity));
    (2.0 - 2.0 * fidelity).max(0.0).sqrt()
}

/// Shot-based swap test result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampledSwapTest {
    pub shots: u64,
    /// Fraction of shots with ancilla 0.
    pub p0_estimate: f64,
    pub fidelity: FidelityEstimate,
}

/// Estimate the swap test from ancilla samples instead of exact amplitudes.
pub fn swap_test_sampled<R: Rng + ?Sized>(
    x: &QuantumState,
    y: &QuantumState,
    shots: u64,
    rng: &mut R,
) -> Result<SampledSwapTest, SwapTestError> {
    let mut state = composite_state(x, y)?;
    let layout = SwapTestLayout::packed(x.qubit_count());
    state.apply_circuit(&build_swap_test(&layout))?;
    let counts = state.sample_counts(&[layout.ancilla()], shots, rng)?;
    let zeros = counts.get(&0).copied().unwrap_or(0);
    let p0_estimate = zeros as f64 / shots as f64;
    Ok(SampledSwapTest {
        shots,
        p0_estimate,
        fidelity: fidelity_from_p0(p0_estimate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{Backend, Gate};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero() -> QuantumState {
        QuantumState::zero(1, Backend::Sparse).unwrap()
    }

    fn one() -> QuantumState {
        QuantumState::new_basis_state(1, 1, Backend::Sparse).unwrap()
    }

    fn plus() -> QuantumState {
        let mut s = zero();
        s.apply_gate(&Gate::H(0)).unwrap();
        s
    }

    #[test]
    fn circuit_shape_for_one_qubit_registers() {
        let c = build_swap_test(&SwapTestLayout::packed(1));
        assert_eq!(c.qubit_count(), 3);
        let gates = c.gates();
        assert_eq!(gates.len(), 3);
        assert_eq!(gates[0], Gate::H(0));
        assert_eq!(gates[1], Gate::Cswap { control: 0, a: 1, b: 2 });
        assert_eq!(gates[2], Gate::H(0));
    }

    #[test]
    fn circuit_shape_for_two_qubit_registers() {
        let c = build_swap_test(&SwapTestLayout::packed(2));
        assert_eq!(c.qubit_count(), 5);
        assert_eq!(c.len(), 4);
        assert!(matches!(c.gates()[1], Gate::Cswap { .. }));
        assert!(matches!(c.gates()[2], Gate::Cswap { .. }));
    }

    #[test]
    fn overlapping_registers_are_rejected() {
        let err = SwapTestLayout::new(0, vec![1, 2], vec![2, 3]).unwrap_err();
        assert_eq!(err, SwapTestError::OverlappingRegisters { index: 2 });
    }

    #[test]
    fn p0_contract_identical_orthogonal_and_plus() {
        assert!((swap_test_p0(&zero(), &zero()).unwrap() - 1.0).abs() < 1e-12);
        assert!((swap_test_p0(&zero(), &one()).unwrap() - 0.5).abs() < 1e-12);
        // 1/2 + 1/2·|⟨+|0⟩|² = 3/4, cross-checked against the inner product.
        let ip = plus().inner_product(&zero()).unwrap().norm();
        let expected = 0.5 + 0.5 * ip * ip;
        assert!((expected - 0.75).abs() < 1e-12);
        assert!((swap_test_p0(&plus(), &zero()).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn p0_rejects_mismatched_sizes() {
        let two = QuantumState::zero(2, Backend::Sparse).unwrap();
        assert!(matches!(
            swap_test_p0(&zero(), &two),
            Err(SwapTestError::StateSizeMismatch { .. })
        ));
    }

    #[test]
    fn fidelity_inversion_values() {
        assert_eq!(fidelity_from_p0(1.0).fidelity, 1.0);
        assert_eq!(fidelity_from_p0(0.5).fidelity, 0.0);
        let est = fidelity_from_p0(0.75);
        assert!((est.fidelity - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!(!est.clamped);
    }

    #[test]
    fn fidelity_clamps_noisy_p0() {
        let est = fidelity_from_p0(0.47);
        assert_eq!(est.fidelity, 0.0);
        assert!(est.clamped);
    }

    #[test]
    fn distance_endpoints_and_midpoint() {
        assert_eq!(quantum_euclidean_distance(1.0), 0.0);
        assert!((quantum_euclidean_distance(0.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((quantum_euclidean_distance(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampled_identical_inputs_are_degenerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let res = swap_test_sampled(&zero(), &zero(), 1000, &mut rng).unwrap();
        assert_eq!(res.p0_estimate, 1.0);
        assert_eq!(res.fidelity.fidelity, 1.0);
    }

    #[test]
    fn sampled_orthogonal_and_plus_within_three_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let shots = 4096;
        let res = swap_test_sampled(&zero(), &one(), shots, &mut rng).unwrap();
        let sigma = (0.25f64 / shots as f64).sqrt();
        assert!((res.p0_estimate - 0.5).abs() < 3.0 * sigma);

        let res = swap_test_sampled(&plus(), &zero(), shots, &mut rng).unwrap();
        let sigma = (0.75 * 0.25 / shots as f64).sqrt();
        assert!((res.p0_estimate - 0.75).abs() < 3.0 * sigma);
    }
}
