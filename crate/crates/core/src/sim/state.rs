//! Pure-state representation, gate kernels, measurement, and sampling.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::gate::{Circuit, Gate};
use super::SimError;

/// Tolerance on `|norm - 1|` that every operation preserves.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Sparse entries with |amplitude| below this are dropped after each H
/// application; below double-precision meaningful scale, they are pure
/// cancellation residue and would otherwise pollute the support.
const PRUNE_THRESHOLD: f64 = 1e-15;

/// State storage strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Sorted map from basis integer to amplitude; the default.
    Sparse,
    /// Full 2^n amplitude vector; cross-check oracle for small registers.
    Dense,
}

impl Backend {
    /// Largest supported qubit count: 63 keeps basis keys in a u64 (sparse),
    /// 30 bounds the dense allocation.
    pub fn max_qubits(self) -> usize {
        match self {
            Backend::Sparse => 63,
            Backend::Dense => 30,
        }
    }
}

/// Outcome of measuring one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementRecord {
    pub qubit: usize,
    /// Observed bit (`true` = 1).
    pub bit: bool,
    /// Pre-measurement probability of that bit.
    pub probability: f64,
}

#[derive(Debug, Clone)]
enum Repr {
    Sparse(BTreeMap<u64, Complex64>),
    Dense(Vec<Complex64>),
}

/// A pure n-qubit state. Qubit `i` is bit `i` of the basis integer.
#[derive(Debug, Clone)]
pub struct QuantumState {
    n: usize,
    repr: Repr,
}

impl QuantumState {
    /// Prepare the computational basis state `|basis⟩`.
    pub fn new_basis_state(n: usize, basis: u64, backend: Backend) -> Result<Self, SimError> {
        if n < 1 || n > backend.max_qubits() {
            return Err(SimError::UnsupportedQubitCount {
                n,
                max: backend.max_qubits(),
                backend,
            });
        }
        if basis >> n != 0 {
            return Err(SimError::BasisOutOfRange { basis, n });
        }
        let repr = match backend {
            Backend::Sparse => {
                let mut map = BTreeMap::new();
                map.insert(basis, Complex64::new(1.0, 0.0));
                Repr::Sparse(map)
            }
            Backend::Dense => {
                let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
                amps[basis as usize] = Complex64::new(1.0, 0.0);
                Repr::Dense(amps)
            }
        };
        Ok(QuantumState { n, repr })
    }

    /// Prepare `|0…0⟩`.
    pub fn zero(n: usize, backend: Backend) -> Result<Self, SimError> {
        Self::new_basis_state(n, 0, backend)
    }

    /// Build a state from `(basis, amplitude)` pairs, normalizing the result.
    /// Errors if an index is out of range or the total norm is degenerate.
    pub fn from_amplitudes(
        n: usize,
        entries: &[(u64, Complex64)],
        backend: Backend,
    ) -> Result<Self, SimError> {
        let mut state = Self::zero(n, backend)?;
        match &mut state.repr {
            Repr::Sparse(map) => {
                map.clear();
                for &(basis, amp) in entries {
                    if basis >> n != 0 {
                        return Err(SimError::BasisOutOfRange { basis, n });
                    }
                    *map.entry(basis).or_insert(Complex64::new(0.0, 0.0)) += amp;
                }
            }
            Repr::Dense(amps) => {
                amps[0] = Complex64::new(0.0, 0.0);
                for &(basis, amp) in entries {
                    if basis >> n != 0 {
                        return Err(SimError::BasisOutOfRange { basis, n });
                    }
                    amps[basis as usize] += amp;
                }
            }
        }
        let norm = state.norm();
        if norm < 1e-9 {
            return Err(SimError::DegenerateNorm);
        }
        state.scale(1.0 / norm);
        Ok(state)
    }

    pub fn qubit_count(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> Backend {
        match self.repr {
            Repr::Sparse(_) => Backend::Sparse,
            Repr::Dense(_) => Backend::Dense,
        }
    }

    /// Amplitude at a basis state (zero when absent from the support).
    pub fn amplitude(&self, basis: u64) -> Complex64 {
        match &self.repr {
            Repr::Sparse(map) => map.get(&basis).copied().unwrap_or_default(),
            Repr::Dense(amps) => amps
                .get(basis as usize)
                .copied()
                .unwrap_or_default(),
        }
    }

    /// Nonzero `(basis, amplitude)` entries in ascending basis order.
    pub fn support(&self) -> Vec<(u64, Complex64)> {
        match &self.repr {
            Repr::Sparse(map) => map.iter().map(|(&k, &a)| (k, a)).collect(),
            Repr::Dense(amps) => amps
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > PRUNE_THRESHOLD * PRUNE_THRESHOLD)
                .map(|(k, &a)| (k as u64, a))
                .collect(),
        }
    }

    /// Number of basis states carrying nonzero amplitude.
    pub fn support_len(&self) -> usize {
        match &self.repr {
            Repr::Sparse(map) => map.len(),
            Repr::Dense(_) => self.support().len(),
        }
    }

    /// Euclidean norm of the amplitude vector; 1 for a valid state.
    pub fn norm(&self) -> f64 {
        let sum: f64 = match &self.repr {
            Repr::Sparse(map) => map.values().map(|a| a.norm_sqr()).sum(),
            Repr::Dense(amps) => amps.iter().map(|a| a.norm_sqr()).sum(),
        };
        sum.sqrt()
    }

    fn scale(&mut self, factor: f64) {
        match &mut self.repr {
            Repr::Sparse(map) => map.values_mut().for_each(|a| *a *= factor),
            Repr::Dense(amps) => amps.iter_mut().for_each(|a| *a *= factor),
        }
    }

    /// Convert to the requested backend (no-op when already there).
    pub fn to_backend(&self, backend: Backend) -> Result<Self, SimError> {
        if self.backend() == backend {
            return Ok(self.clone());
        }
        if self.n > backend.max_qubits() {
            return Err(SimError::UnsupportedQubitCount {
                n: self.n,
                max: backend.max_qubits(),
                backend,
            });
        }
        let repr = match (&self.repr, backend) {
            (Repr::Sparse(map), Backend::Dense) => {
                let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << self.n];
                for (&k, &a) in map {
                    amps[k as usize] = a;
                }
                Repr::Dense(amps)
            }
            (Repr::Dense(amps), Backend::Sparse) => {
                let map = amps
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD)
                    .map(|(k, &a)| (k as u64, a))
                    .collect();
                Repr::Sparse(map)
            }
            _ => unreachable!(),
        };
        Ok(QuantumState { n: self.n, repr })
    }

    /// Tensor product. `self` keeps the low qubits, `other` is shifted above
    /// them. The result is sparse only when both inputs are sparse.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState, SimError> {
        let n = self.n + other.n;
        let backend = if self.backend() == Backend::Sparse && other.backend() == Backend::Sparse {
            Backend::Sparse
        } else {
            Backend::Dense
        };
        if n > backend.max_qubits() {
            return Err(SimError::UnsupportedQubitCount {
                n,
                max: backend.max_qubits(),
                backend,
            });
        }
        let repr = match backend {
            Backend::Sparse => {
                let mut map = BTreeMap::new();
                for (ka, a) in self.support() {
                    for (kb, b) in other.support() {
                        map.insert(ka | (kb << self.n), a * b);
                    }
                }
                Repr::Sparse(map)
            }
            Backend::Dense => {
                let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
                for (ka, a) in self.support() {
                    for (kb, b) in other.support() {
                        amps[(ka | (kb << self.n)) as usize] = a * b;
                    }
                }
                Repr::Dense(amps)
            }
        };
        Ok(QuantumState { n, repr })
    }

    /// Apply one gate in place.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), SimError> {
        gate.validate(self.n)?;
        match gate {
            Gate::H(q) => self.apply_hadamard(*q),
            _ => self.apply_permutation(gate),
        }
        Ok(())
    }

    /// Apply every gate of a circuit in order.
    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.qubit_count() != self.n {
            return Err(SimError::QubitCountMismatch {
                left: circuit.qubit_count(),
                right: self.n,
            });
        }
        circuit.gates().iter().try_for_each(|g| self.apply_gate(g))
    }

    fn apply_permutation(&mut self, gate: &Gate) {
        match &mut self.repr {
            Repr::Sparse(map) => {
                let moved: BTreeMap<u64, Complex64> = map
                    .iter()
                    .map(|(&k, &a)| (gate.permute_basis(k), a))
                    .collect();
                *map = moved;
            }
            Repr::Dense(amps) => {
                // Every permutation gate in the set is an involution, so each
                // orbit is a 2-cycle or a fixed point; swap each pair once.
                for k in 0..amps.len() as u64 {
                    let image = gate.permute_basis(k);
                    if image > k {
                        amps.swap(k as usize, image as usize);
                    }
                }
            }
        }
    }

    fn apply_hadamard(&mut self, q: usize) {
        let mask = 1u64 << q;
        match &mut self.repr {
            Repr::Sparse(map) => {
                let mut next: BTreeMap<u64, Complex64> = BTreeMap::new();
                for (&k, &a) in map.iter() {
                    let contribution = a * FRAC_1_SQRT_2;
                    if k & mask == 0 {
                        *next.entry(k).or_default() += contribution;
                        *next.entry(k | mask).or_default() += contribution;
                    } else {
                        *next.entry(k ^ mask).or_default() += contribution;
                        *next.entry(k).or_default() -= contribution;
                    }
                }
                next.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
                *map = next;
            }
            Repr::Dense(amps) => {
                for k in 0..amps.len() {
                    if k as u64 & mask == 0 {
                        let low = amps[k];
                        let high = amps[k | mask as usize];
                        amps[k] = (low + high) * FRAC_1_SQRT_2;
                        amps[k | mask as usize] = (low - high) * FRAC_1_SQRT_2;
                    }
                }
            }
        }
    }

    /// Probability that measuring `qubit` yields `bit`.
    pub fn probability_of(&self, qubit: usize, bit: bool) -> Result<f64, SimError> {
        if qubit >= self.n {
            return Err(SimError::QubitOutOfRange { index: qubit, n: self.n });
        }
        let mask = 1u64 << qubit;
        let want = if bit { mask } else { 0 };
        let p = self
            .support()
            .iter()
            .filter(|(k, _)| k & mask == want)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>();
        Ok(p.clamp(0.0, 1.0))
    }

    /// Measure one qubit, collapsing the state and renormalizing.
    pub fn measure_qubit<R: Rng + ?Sized>(
        &mut self,
        qubit: usize,
        rng: &mut R,
    ) -> Result<MeasurementRecord, SimError> {
        let p1 = self.probability_of(qubit, true)?;
        let bit = rng.random::<f64>() < p1;
        let probability = if bit { p1 } else { 1.0 - p1 };
        let mask = 1u64 << qubit;
        let want = if bit { mask } else { 0 };
        match &mut self.repr {
            Repr::Sparse(map) => map.retain(|k, _| k & mask == want),
            Repr::Dense(amps) => {
                for (k, a) in amps.iter_mut().enumerate() {
                    if k as u64 & mask != want {
                        *a = Complex64::new(0.0, 0.0);
                    }
                }
            }
        }
        let norm = self.norm();
        if norm < 1e-9 {
            return Err(SimError::DegenerateNorm);
        }
        self.scale(1.0 / norm);
        Ok(MeasurementRecord { qubit, bit, probability })
    }

    /// Joint outcome distribution over the listed qubits.
    ///
    /// Outcome bit `j` of a key is the value of `qubits[j]`. Entries are in
    /// ascending outcome order and the probabilities sum to 1.
    pub fn outcome_distribution(&self, qubits: &[usize]) -> Result<Vec<(u64, f64)>, SimError> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.n {
                return Err(SimError::QubitOutOfRange { index: q, n: self.n });
            }
            if qubits[i + 1..].contains(&q) {
                return Err(SimError::DuplicateQubit { index: q });
            }
        }
        let mut dist: BTreeMap<u64, f64> = BTreeMap::new();
        for (k, a) in self.support() {
            let mut outcome = 0u64;
            for (j, &q) in qubits.iter().enumerate() {
                outcome |= (k >> q & 1) << j;
            }
            *dist.entry(outcome).or_default() += a.norm_sqr();
        }
        Ok(dist.into_iter().collect())
    }

    /// Draw `shots` independent samples of the listed qubits without
    /// collapsing the state. Counts sum to `shots`.
    pub fn sample_counts<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        shots: u64,
        rng: &mut R,
    ) -> Result<BTreeMap<u64, u64>, SimError> {
        if shots < 1 {
            return Err(SimError::ZeroShots);
        }
        let dist = self.outcome_distribution(qubits)?;
        let mut cumulative = Vec::with_capacity(dist.len());
        let mut total = 0.0;
        for &(outcome, p) in &dist {
            total += p;
            cumulative.push((total, outcome));
        }
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cumulative.partition_point(|&(edge, _)| edge <= u);
            let outcome = cumulative[idx.min(cumulative.len() - 1)].1;
            *counts.entry(outcome).or_default() += 1;
        }
        Ok(counts)
    }

    /// Inner product `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &QuantumState) -> Result<Complex64, SimError> {
        if self.n != other.n {
            return Err(SimError::QubitCountMismatch { left: self.n, right: other.n });
        }
        // Iterate whichever support is explicit; both give the same sum.
        let sum = if self.backend() == Backend::Sparse {
            self.support()
                .iter()
                .map(|(k, a)| a.conj() * other.amplitude(*k))
                .sum()
        } else {
            other
                .support()
                .iter()
                .map(|(k, b)| self.amplitude(*k).conj() * *b)
                .sum()
        };
        Ok(sum)
    }

    /// Largest amplitude difference against another state of equal size.
    pub fn max_amplitude_difference(&self, other: &QuantumState) -> f64 {
        let mut keys: Vec<u64> = self.support().iter().map(|(k, _)| *k).collect();
        keys.extend(other.support().iter().map(|(k, _)| *k));
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|k| (self.amplitude(k) - other.amplitude(k)).norm())
            .fold(0.0, f64::max)
    }
}
