//! Bit vectors, labeled training data, and the QKNN register layout.

use std::fmt;
use std::str::FromStr;

use super::QknnError;
use crate::sim::Backend;

/// A fixed-length vector over {0, 1}. Element `i` maps to qubit `i` (and so
/// to bit `i` of a basis integer).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    bits: Vec<bool>,
}

impl BitVector {
    pub fn new(bits: Vec<bool>) -> Self {
        BitVector { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Pack into a basis integer: element `i` becomes bit `i`.
    /// Only valid for vectors of at most 64 elements.
    pub fn as_basis(&self) -> u64 {
        debug_assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i))
    }

    /// Unpack `len` low bits of a basis integer.
    pub fn from_basis(basis: u64, len: usize) -> Self {
        BitVector {
            bits: (0..len).map(|i| basis >> i & 1 == 1).collect(),
        }
    }
}

impl FromStr for BitVector {
    type Err = QknnError;

    /// Parse "00101" left to right as elements 0..n.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(QknnError::InvalidBitString(other)),
            })
            .collect::<Result<Vec<bool>, _>>()
            .map(BitVector::new)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// A training record: bit vector plus class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledBitVector {
    pub vector: BitVector,
    pub label: u32,
}

impl LabeledBitVector {
    pub fn new(vector: BitVector, label: u32) -> Self {
        LabeledBitVector { vector, label }
    }
}

/// A validated set of labeled bit vectors with uniform length and labels
/// inside `[0, class_count)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSet {
    items: Vec<LabeledBitVector>,
    feature_count: usize,
    class_count: u32,
}

impl TrainingSet {
    pub fn new(items: Vec<LabeledBitVector>, class_count: u32) -> Result<Self, QknnError> {
        if items.is_empty() {
            return Err(QknnError::EmptyTrainingSet);
        }
        if class_count == 0 {
            return Err(QknnError::NoClasses);
        }
        let feature_count = items[0].vector.len();
        if feature_count == 0 {
            return Err(QknnError::LengthMismatch { expected: 1, got: 0 });
        }
        for item in &items {
            if item.vector.len() != feature_count {
                return Err(QknnError::LengthMismatch {
                    expected: feature_count,
                    got: item.vector.len(),
                });
            }
            if item.label >= class_count {
                return Err(QknnError::LabelOutOfRange { label: item.label, class_count });
            }
        }
        Ok(TrainingSet { items, feature_count, class_count })
    }

    pub fn items(&self) -> &[LabeledBitVector] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn class_count(&self) -> u32 {
        self.class_count
    }
}

pub(crate) fn ceil_log2(x: u64) -> usize {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros() as usize
}

/// Qubit assignment for the QKNN pipeline, packed as
/// `[diff | cls | acc | flag]` from qubit 0 upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QknnLayout {
    diff: Vec<usize>,
    cls: Vec<usize>,
    acc: Vec<usize>,
    flag: usize,
}

impl QknnLayout {
    pub fn for_problem(feature_count: usize, class_count: u32) -> Result<Self, QknnError> {
        if feature_count == 0 {
            return Err(QknnError::LengthMismatch { expected: 1, got: 0 });
        }
        if class_count == 0 {
            return Err(QknnError::NoClasses);
        }
        let cls_width = ceil_log2(u64::from(class_count));
        let acc_width = ceil_log2(feature_count as u64 + 1) + 1;
        let total = feature_count + cls_width + acc_width + 1;
        let max = Backend::Sparse.max_qubits();
        if total > max {
            return Err(QknnError::TooManyQubits { needed: total, max });
        }
        let mut next = 0..;
        Ok(QknnLayout {
            diff: (&mut next).take(feature_count).collect(),
            cls: (&mut next).take(cls_width).collect(),
            acc: (&mut next).take(acc_width).collect(),
            flag: next.next().unwrap(),
        })
    }

    /// Difference register, one qubit per feature.
    pub fn diff(&self) -> &[usize] {
        &self.diff
    }

    /// Class register.
    pub fn cls(&self) -> &[usize] {
        &self.cls
    }

    /// Accumulator register, least significant qubit first.
    pub fn acc(&self) -> &[usize] {
        &self.acc
    }

    /// The flag (ancilla) qubit.
    pub fn flag(&self) -> usize {
        self.flag
    }

    /// Top accumulator qubit; carries the threshold comparison result.
    pub fn acc_carry(&self) -> usize {
        *self.acc.last().unwrap()
    }

    pub fn feature_count(&self) -> usize {
        self.diff.len()
    }

    pub fn qubit_count(&self) -> usize {
        self.flag + 1
    }
}

/// Scatter bit `j` of `value` to position `positions[j]`.
pub(crate) fn scatter_bits(value: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0u64, |acc, (j, &pos)| acc | ((value >> j & 1) << pos))
}

/// Gather bit `positions[j]` of `key` into bit `j` of the result.
pub(crate) fn gather_bits(key: u64, positions: &[usize]) -> u64 {
    positions
        .iter()
        .enumerate()
        .fold(0u64, |acc, (j, &pos)| acc | ((key >> pos & 1) << j))
}
