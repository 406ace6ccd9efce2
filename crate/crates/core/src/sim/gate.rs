//! Gate records and ordered gate sequences.

use super::SimError;

/// A single gate over qubit indices. Qubit `i` is bit `i` of the basis integer.
///
/// Every gate in this set is its own inverse, so a circuit is inverted by
/// reversing its gate order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Gate {
    /// Hadamard on one qubit.
    H(usize),
    /// Pauli-X (bit flip) on one qubit.
    X(usize),
    /// Identity placeholder; occupies one qubit, does nothing.
    Id(usize),
    /// Controlled-X.
    Cnot { control: usize, target: usize },
    /// Toffoli (doubly-controlled X).
    Ccx { controls: [usize; 2], target: usize },
    /// Multi-controlled X. An empty control list degenerates to `X`.
    Mcx { controls: Vec<usize>, target: usize },
    /// Exchange two qubits.
    Swap(usize, usize),
    /// Fredkin (controlled swap).
    Cswap { control: usize, a: usize, b: usize },
}

impl Gate {
    /// All qubit indices the gate touches, controls first.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::Id(q) => vec![*q],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Ccx { controls, target } => vec![controls[0], controls[1], *target],
            Gate::Mcx { controls, target } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Cswap { control, a, b } => vec![*control, *a, *b],
        }
    }

    /// Check index range and pairwise distinctness against an `n`-qubit state.
    pub fn validate(&self, n: usize) -> Result<(), SimError> {
        let qs = self.qubits();
        for &q in &qs {
            if q >= n {
                return Err(SimError::QubitOutOfRange { index: q, n });
            }
        }
        for (i, &q) in qs.iter().enumerate() {
            if qs[i + 1..].contains(&q) {
                return Err(SimError::DuplicateQubit { index: q });
            }
        }
        Ok(())
    }

    /// True for gates that only permute basis states (everything but `H`).
    pub fn is_permutation(&self) -> bool {
        !matches!(self, Gate::H(_))
    }

    /// Image of one basis state under a permutation gate.
    ///
    /// Must not be called on `H`, which is not a basis-state permutation.
    pub(crate) fn permute_basis(&self, key: u64) -> u64 {
        let bit = |q: usize| key >> q & 1 == 1;
        match self {
            Gate::Id(_) => key,
            Gate::X(q) => key ^ (1 << q),
            Gate::Cnot { control, target } => {
                if bit(*control) {
                    key ^ (1 << target)
                } else {
                    key
                }
            }
            Gate::Ccx { controls, target } => {
                if bit(controls[0]) && bit(controls[1]) {
                    key ^ (1 << target)
                } else {
                    key
                }
            }
            Gate::Mcx { controls, target } => {
                if controls.iter().all(|&c| bit(c)) {
                    key ^ (1 << target)
                } else {
                    key
                }
            }
            Gate::Swap(a, b) => {
                if bit(*a) != bit(*b) {
                    key ^ (1 << a) ^ (1 << b)
                } else {
                    key
                }
            }
            Gate::Cswap { control, a, b } => {
                if bit(*control) && bit(*a) != bit(*b) {
                    key ^ (1 << a) ^ (1 << b)
                } else {
                    key
                }
            }
            Gate::H(_) => unreachable!("H is not a basis permutation"),
        }
    }
}

/// An ordered gate sequence over a fixed number of qubits.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Append a gate. Indices are checked when the circuit is applied.
    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(Gate::H(q))
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(Gate::X(q))
    }

    pub fn id(&mut self, q: usize) -> &mut Self {
        self.push(Gate::Id(q))
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> &mut Self {
        self.push(Gate::Cnot { control, target })
    }

    pub fn ccx(&mut self, c0: usize, c1: usize, target: usize) -> &mut Self {
        self.push(Gate::Ccx { controls: [c0, c1], target })
    }

    pub fn mcx(&mut self, controls: Vec<usize>, target: usize) -> &mut Self {
        self.push(Gate::Mcx { controls, target })
    }

    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(Gate::Swap(a, b))
    }

    pub fn cswap(&mut self, control: usize, a: usize, b: usize) -> &mut Self {
        self.push(Gate::Cswap { control, a, b })
    }

    /// Append every gate of `other`, which must span the same qubit count.
    pub fn extend(&mut self, other: &Circuit) -> &mut Self {
        debug_assert_eq!(self.n, other.n);
        self.gates.extend(other.gates.iter().cloned());
        self
    }

    /// Validate every gate against this circuit's qubit count.
    pub fn validate(&self) -> Result<(), SimError> {
        self.gates.iter().try_for_each(|g| g.validate(self.n))
    }

    /// The inverse circuit: gate order reversed (each gate is self-inverse).
    pub fn inverted(&self) -> Circuit {
        Circuit {
            n: self.n,
            gates: self.gates.iter().rev().cloned().collect(),
        }
    }
}
