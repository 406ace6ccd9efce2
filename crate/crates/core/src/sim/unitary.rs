//! Full unitary extraction for small circuits.

use num_complex::Complex64;

use super::gate::Circuit;
use super::state::{Backend, QuantumState};
use super::SimError;

/// Size guard for [`circuit_unitary`].
pub const UNITARY_QUBIT_LIMIT: usize = 10;

/// A 2^n x 2^n complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Largest entry of |U†U - I|; ~0 for a unitary matrix.
    pub fn max_unitarity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let mut sum = Complex64::new(0.0, 0.0);
                for k in 0..self.dim {
                    sum += self.entry(k, i).conj() * self.entry(k, j);
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((sum - expected).norm());
            }
        }
        worst
    }

    /// Largest entrywise difference against another matrix of the same size.
    pub fn max_difference(&self, other: &UnitaryMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Compute the circuit's unitary by applying it to every basis state;
/// column `j` is the image of `|j⟩`.
pub fn circuit_unitary(circuit: &Circuit) -> Result<UnitaryMatrix, SimError> {
    let n = circuit.qubit_count();
    if n > UNITARY_QUBIT_LIMIT {
        return Err(SimError::UnitaryTooLarge { n, max: UNITARY_QUBIT_LIMIT });
    }
    circuit.validate()?;
    let dim = 1usize << n;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut state = QuantumState::new_basis_state(n, col as u64, Backend::Dense)?;
        state.apply_circuit(circuit)?;
        for (row, amp) in state.support() {
            data[row as usize * dim + col] = amp;
        }
    }
    Ok(UnitaryMatrix { dim, data })
}
