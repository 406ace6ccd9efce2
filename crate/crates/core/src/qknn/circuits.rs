//! Reversible subcircuits of the QKNN pipeline: difference marking, the
//! incrementer cascade, threshold-offset arithmetic, OR, and the flag stage.

use super::types::{ceil_log2, BitVector, QknnLayout};
use super::QknnError;
use crate::sim::{Circuit, QuantumState};

/// How the flag qubit is derived from the accumulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlagMode {
    /// Default: the accumulator was pre-loaded with [`threshold_offset`], so
    /// its carry (top) qubit already equals `HammingDistance < t`; copy it
    /// with a CNOT.
    #[default]
    OffsetCarry,
    /// Alternative for power-of-two `t` with no offset: the accumulator then
    /// holds the distance itself, and `d < t = 2^m` means every accumulator
    /// bit at or above `m` is zero. OR those bits into the flag and invert.
    OrHighBits,
}

/// The offset `2^l − (n − t + 1)` pre-loaded into the accumulator so that its
/// top bit comes on exactly when the agreement count `s` reaches `n − t + 1`,
/// i.e. when HammingDistance `< t`. Valid for `t` in `[1, n+1]`.
pub fn threshold_offset(feature_count: usize, t: usize) -> Result<u64, QknnError> {
    if t < 1 || t > feature_count + 1 {
        return Err(QknnError::ThresholdOutOfRange { t, max: feature_count + 1 });
    }
    let l = ceil_log2(feature_count as u64 + 1);
    Ok((1u64 << l) - (feature_count + 1 - t) as u64)
}

/// The `a + 1` circuit on `acc_width` qubits: a descending cascade
/// `MCX(a[0..w−1] → a[w−1]), …, CNOT(a[0] → a[1]), X(a[0])` mapping
/// `|a⟩` to `|(a+1) mod 2^w⟩`.
pub fn build_incrementer(acc_width: usize) -> Circuit {
    let mut circuit = Circuit::new(acc_width);
    for target in (1..acc_width).rev() {
        circuit.mcx((0..target).collect(), target);
    }
    circuit.x(0);
    circuit
}

/// The incrementer cascade on the accumulator register, with every gate
/// additionally controlled on `control`.
fn push_controlled_incrementer(circuit: &mut Circuit, control: usize, acc: &[usize]) {
    for target in (1..acc.len()).rev() {
        let mut controls = vec![control];
        controls.extend_from_slice(&acc[..target]);
        circuit.mcx(controls, acc[target]);
    }
    circuit.cnot(control, acc[0]);
}

/// Write the comparison of the difference register against a classical test
/// vector. X is applied to `diff[i]` exactly when `test[i] = 1`, turning the
/// register into per-feature XOR; when `invert_to_agreement` is set a second
/// X layer flips every qubit so that 1 means the feature agrees.
pub fn build_difference_circuit(
    test: &BitVector,
    layout: &QknnLayout,
    invert_to_agreement: bool,
) -> Result<Circuit, QknnError> {
    if test.len() != layout.feature_count() {
        return Err(QknnError::LengthMismatch {
            expected: layout.feature_count(),
            got: test.len(),
        });
    }
    let mut circuit = Circuit::new(layout.qubit_count());
    for (i, bit) in test.iter().enumerate() {
        if bit {
            circuit.x(layout.diff()[i]);
        }
    }
    if invert_to_agreement {
        for &q in layout.diff() {
            circuit.x(q);
        }
    }
    Ok(circuit)
}

/// Mark agreement: diff qubit `i` becomes `NOT(v_i XOR test_i)`, so value 1
/// means feature `i` agrees with the test vector.
pub fn apply_difference(
    state: &mut QuantumState,
    test: &BitVector,
    layout: &QknnLayout,
) -> Result<(), QknnError> {
    let circuit = build_difference_circuit(test, layout, true)?;
    state.apply_circuit(&circuit)?;
    Ok(())
}

/// One controlled incrementer per difference qubit: the accumulator gains 1
/// for every diff qubit that reads 1.
pub fn build_accumulator_circuit(layout: &QknnLayout) -> Circuit {
    let mut circuit = Circuit::new(layout.qubit_count());
    for &control in layout.diff() {
        push_controlled_incrementer(&mut circuit, control, layout.acc());
    }
    circuit
}

/// Accumulate the agreement count on top of the pre-loaded offset. With the
/// offset for threshold `t` in place, the accumulator ends at `offset + s`
/// without wraparound and its top bit equals `HammingDistance < t`.
pub fn apply_accumulator(
    state: &mut QuantumState,
    layout: &QknnLayout,
    t: usize,
) -> Result<(), QknnError> {
    // The circuit itself does not depend on t, but a threshold outside
    // [1, n+1] has no valid offset and signals a configuration bug.
    threshold_offset(layout.feature_count(), t)?;
    state.apply_circuit(&build_accumulator_circuit(layout))?;
    Ok(())
}

/// De Morgan OR: X on all inputs, MCX(inputs → target), X on the target and
/// on all inputs again. Leaves `target ⊕= input₁ ∨ … ∨ input_k` with the
/// inputs restored.
pub fn build_or_circuit(n: usize, inputs: &[usize], target: usize) -> Circuit {
    let mut circuit = Circuit::new(n);
    for &q in inputs {
        circuit.x(q);
    }
    circuit.mcx(inputs.to_vec(), target);
    circuit.x(target);
    for &q in inputs {
        circuit.x(q);
    }
    circuit
}

/// Apply the OR subroutine to a state. Index collisions surface as gate
/// validation errors.
pub fn or_gate(
    state: &mut QuantumState,
    inputs: &[usize],
    target: usize,
) -> Result<(), QknnError> {
    let circuit = build_or_circuit(state.qubit_count(), inputs, target);
    state.apply_circuit(&circuit)?;
    Ok(())
}

/// The flag stage for threshold `t` (ignored by `OffsetCarry`, which baked
/// the threshold into the accumulator offset).
pub fn build_flag_circuit(
    layout: &QknnLayout,
    mode: FlagMode,
    t: usize,
) -> Result<Circuit, QknnError> {
    match mode {
        FlagMode::OffsetCarry => {
            let mut circuit = Circuit::new(layout.qubit_count());
            circuit.cnot(layout.acc_carry(), layout.flag());
            Ok(circuit)
        }
        FlagMode::OrHighBits => {
            if !t.is_power_of_two() {
                return Err(QknnError::ThresholdNotPowerOfTwo { t });
            }
            if t > layout.feature_count() + 1 {
                return Err(QknnError::ThresholdOutOfRange {
                    t,
                    max: layout.feature_count() + 1,
                });
            }
            let m = t.trailing_zeros() as usize;
            let mut circuit =
                build_or_circuit(layout.qubit_count(), &layout.acc()[m..], layout.flag());
            // d < 2^m means the OR of the high bits is 0, so invert.
            circuit.x(layout.flag());
            Ok(circuit)
        }
    }
}

/// Raise the flag qubit on every branch with `HammingDistance < t`.
pub fn apply_flag(
    state: &mut QuantumState,
    layout: &QknnLayout,
    mode: FlagMode,
    t: usize,
) -> Result<(), QknnError> {
    state.apply_circuit(&build_flag_circuit(layout, mode, t)?)?;
    Ok(())
}
