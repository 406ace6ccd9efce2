//! Training-set encoding and post-selected classification.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::circuits::{
    build_accumulator_circuit, build_difference_circuit, build_flag_circuit, threshold_offset,
    FlagMode,
};
use super::types::{gather_bits, scatter_bits, BitVector, QknnLayout, TrainingSet};
use super::QknnError;
use crate::sim::{Backend, QuantumState};

/// How to read classification statistics off the final state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecutionMode {
    /// Read exact probabilities from the amplitudes.
    Exact,
    /// Sample the flag and class registers this many times and discard
    /// shots whose flag reads 0.
    Shots(u64),
}

/// Threshold selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    /// Use this `t` directly.
    Fixed(usize),
    /// Choose the smallest `t` whose acceptance covers at least `neighbors`
    /// training branches (see [`calibrate_threshold`]).
    Auto { neighbors: usize },
}

/// Run parameters for [`classify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QknnConfig {
    pub threshold: ThresholdMode,
    pub mode: ExecutionMode,
    pub backend: Backend,
    /// On empty post-selection, widen `t` by 1 (up to `n+1`) instead of
    /// failing. Ties are always broken toward the lowest class label.
    pub widen_on_empty: bool,
    /// Flag derivation; `OffsetCarry` unless cross-checking the OR variant.
    pub flag_mode: FlagMode,
}

impl QknnConfig {
    /// Exact-mode defaults with a fixed threshold.
    pub fn exact(t: usize) -> Self {
        QknnConfig {
            threshold: ThresholdMode::Fixed(t),
            mode: ExecutionMode::Exact,
            backend: Backend::Sparse,
            widen_on_empty: true,
            flag_mode: FlagMode::OffsetCarry,
        }
    }

    /// Exact-mode defaults with auto-calibrated threshold for `k` neighbors.
    pub fn auto(k: usize) -> Self {
        QknnConfig {
            threshold: ThresholdMode::Auto { neighbors: k },
            ..Self::exact(1)
        }
    }
}

/// Outcome of one classification.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassificationResult {
    pub predicted: u32,
    /// Class distribution conditioned on flag = 1, indexed by label.
    pub class_distribution: Vec<f64>,
    /// P(flag = 1): exact in `Exact` mode, accepted/shots in `Shots` mode.
    pub acceptance_probability: f64,
    /// The threshold actually used (after any widening).
    pub effective_threshold: usize,
    /// Shots surviving post-selection (`Shots` mode only).
    pub accepted_shots: Option<u64>,
}

/// Encode the training set as an equal superposition: one basis state per
/// distinct (vector, label) pair holding `v` in the difference register, the
/// label in the class register, `acc_init` in the accumulator, and flag 0.
/// Duplicates merge with multiplicity weighting `√(m/N)`, which keeps the
/// state normalized and the branch weights proportional to record counts.
pub fn encode_training_superposition(
    ts: &TrainingSet,
    layout: &QknnLayout,
    acc_init: u64,
    backend: Backend,
) -> Result<QuantumState, QknnError> {
    if ts.feature_count() != layout.feature_count() {
        return Err(QknnError::LengthMismatch {
            expected: layout.feature_count(),
            got: ts.feature_count(),
        });
    }
    if acc_init >> layout.acc().len() != 0 {
        return Err(QknnError::AccumulatorInitTooWide {
            value: acc_init,
            width: layout.acc().len(),
        });
    }
    let acc_part = scatter_bits(acc_init, layout.acc());
    let mut multiplicity: BTreeMap<u64, u64> = BTreeMap::new();
    for item in ts.items() {
        let key = scatter_bits(item.vector.as_basis(), layout.diff())
            | scatter_bits(u64::from(item.label), layout.cls())
            | acc_part;
        *multiplicity.entry(key).or_default() += 1;
    }
    let total = ts.len() as f64;
    let entries: Vec<(u64, Complex64)> = multiplicity
        .into_iter()
        .map(|(key, m)| (key, Complex64::new((m as f64 / total).sqrt(), 0.0)))
        .collect();
    Ok(QuantumState::from_amplitudes(layout.qubit_count(), &entries, backend)?)
}

/// Exact acceptance probability and conditional class distribution read off
/// a final pipeline state.
fn read_exact(
    state: &QuantumState,
    layout: &QknnLayout,
    class_count: u32,
) -> (f64, Vec<f64>) {
    let flag_mask = 1u64 << layout.flag();
    let mut acceptance = 0.0;
    let mut by_class = vec![0.0; class_count as usize];
    for (key, amp) in state.support() {
        if key & flag_mask != 0 {
            let p = amp.norm_sqr();
            acceptance += p;
            by_class[gather_bits(key, layout.cls()) as usize] += p;
        }
    }
    if acceptance > 0.0 {
        for p in &mut by_class {
            *p /= acceptance;
        }
    }
    (acceptance, by_class)
}

/// Lowest label wins ties. Probabilities within 1e-12 count as tied: exact
/// branch weights are m/N rationals whose float sums can drift by an ulp,
/// and genuine gaps are never that small.
fn argmax_lowest_label(distribution: &[f64]) -> u32 {
    let mut best = 0usize;
    for (label, &p) in distribution.iter().enumerate() {
        if p > distribution[best] + 1e-12 {
            best = label;
        }
    }
    best as u32
}

/// Run the full pipeline (encode, difference, accumulate, flag) for one
/// threshold and return the final state.
fn run_pipeline(
    ts: &TrainingSet,
    test: &BitVector,
    layout: &QknnLayout,
    t: usize,
    mode: FlagMode,
    backend: Backend,
) -> Result<QuantumState, QknnError> {
    let acc_init = match mode {
        FlagMode::OffsetCarry => threshold_offset(ts.feature_count(), t)?,
        // The OR variant reads the distance itself, so the accumulator
        // starts at zero and the difference register keeps disagreement
        // bits (no inversion to agreement).
        FlagMode::OrHighBits => 0,
    };
    let mut state = encode_training_superposition(ts, layout, acc_init, backend)?;
    let invert = matches!(mode, FlagMode::OffsetCarry);
    state.apply_circuit(&build_difference_circuit(test, layout, invert)?)?;
    state.apply_circuit(&build_accumulator_circuit(layout))?;
    state.apply_circuit(&build_flag_circuit(layout, mode, t)?)?;
    Ok(state)
}

/// Classify `test` against the training superposition.
///
/// The per-branch flag marks Hamming distance strictly below the threshold;
/// the prediction is the argmax of the class distribution conditioned on an
/// accepted flag. An empty post-selection widens the threshold by one when
/// `widen_on_empty` is set (the result reports the effective threshold) and
/// errors otherwise.
pub fn classify<R: Rng + ?Sized>(
    ts: &TrainingSet,
    test: &BitVector,
    cfg: &QknnConfig,
    rng: &mut R,
) -> Result<ClassificationResult, QknnError> {
    let n = ts.feature_count();
    if test.len() != n {
        return Err(QknnError::LengthMismatch { expected: n, got: test.len() });
    }
    let layout = QknnLayout::for_problem(n, ts.class_count())?;
    let start_t = match cfg.threshold {
        ThresholdMode::Fixed(t) => {
            threshold_offset(n, t)?;
            t
        }
        ThresholdMode::Auto { neighbors } => calibrate_threshold(ts, test, neighbors)?,
    };

    let mut t = start_t;
    loop {
        let state = run_pipeline(ts, test, &layout, t, cfg.flag_mode, cfg.backend)?;
        let outcome = match cfg.mode {
            ExecutionMode::Exact => {
                let (acceptance, distribution) = read_exact(&state, &layout, ts.class_count());
                (acceptance > 0.0).then_some(ClassificationResult {
                    predicted: argmax_lowest_label(&distribution),
                    class_distribution: distribution,
                    acceptance_probability: acceptance,
                    effective_threshold: t,
                    accepted_shots: None,
                })
            }
            ExecutionMode::Shots(shots) => {
                let mut qubits = vec![layout.flag()];
                qubits.extend_from_slice(layout.cls());
                let counts = state.sample_counts(&qubits, shots, rng)?;
                let mut accepted = 0u64;
                let mut by_class = vec![0u64; ts.class_count() as usize];
                for (outcome, count) in counts {
                    if outcome & 1 == 1 {
                        accepted += count;
                        by_class[(outcome >> 1) as usize] += count;
                    }
                }
                (accepted > 0).then(|| {
                    let distribution: Vec<f64> =
                        by_class.iter().map(|&c| c as f64 / accepted as f64).collect();
                    ClassificationResult {
                        predicted: argmax_lowest_label(&distribution),
                        class_distribution: distribution,
                        acceptance_probability: accepted as f64 / shots as f64,
                        effective_threshold: t,
                        accepted_shots: Some(accepted),
                    }
                })
            }
        };
        match outcome {
            Some(result) => return Ok(result),
            None if cfg.widen_on_empty && t <= n => t += 1,
            None => return Err(QknnError::NoNeighbors { t }),
        }
    }
}

/// Smallest `t` in `[1, n+1]` whose acceptance probability reaches `k/N`,
/// i.e. that captures at least `k` training branches. Bridges the classical
/// notion of "k nearest" to the threshold circuit.
pub fn calibrate_threshold(
    ts: &TrainingSet,
    test: &BitVector,
    k: usize,
) -> Result<usize, QknnError> {
    if k < 1 || k > ts.len() {
        return Err(QknnError::NeighborCountOutOfRange { k, max: ts.len() });
    }
    if test.len() != ts.feature_count() {
        return Err(QknnError::LengthMismatch {
            expected: ts.feature_count(),
            got: test.len(),
        });
    }
    let test_bits = test.as_basis();
    let mut distance_histogram = vec![0usize; ts.feature_count() + 1];
    for item in ts.items() {
        let d = (item.vector.as_basis() ^ test_bits).count_ones() as usize;
        distance_histogram[d] += 1;
    }
    let mut captured = 0;
    for (d, &count) in distance_histogram.iter().enumerate() {
        captured += count;
        if captured >= k {
            return Ok(d + 1);
        }
    }
    Ok(ts.feature_count() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qknn::LabeledBitVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(99)
    }

    fn ts(pairs: &[(&str, u32)], classes: u32) -> TrainingSet {
        let items = pairs
            .iter()
            .map(|(v, label)| LabeledBitVector::new(v.parse().unwrap(), *label))
            .collect();
        TrainingSet::new(items, classes).unwrap()
    }

    #[test]
    fn encoding_single_item_has_unit_amplitude() {
        let ts = ts(&[("0", 0)], 1);
        let layout = QknnLayout::for_problem(1, 1).unwrap();
        let state = encode_training_superposition(&ts, &layout, 0, Backend::Sparse).unwrap();
        assert_eq!(state.support_len(), 1);
        assert!((state.support()[0].1.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn encoding_two_items_splits_amplitude() {
        let ts = ts(&[("00", 0), ("11", 1)], 2);
        let layout = QknnLayout::for_problem(2, 2).unwrap();
        let state = encode_training_superposition(&ts, &layout, 0, Backend::Sparse).unwrap();
        assert_eq!(state.support_len(), 2);
        for (_, amp) in state.support() {
            assert!((amp.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn encoding_merges_duplicates_with_multiplicity() {
        let ts = ts(&[("01", 0), ("01", 0), ("10", 1)], 2);
        let layout = QknnLayout::for_problem(2, 2).unwrap();
        let state = encode_training_superposition(&ts, &layout, 0, Backend::Sparse).unwrap();
        assert_eq!(state.support_len(), 2);
        assert!((state.norm() - 1.0).abs() < 1e-12);
        let amps: Vec<f64> = state.support().iter().map(|(_, a)| a.norm_sqr()).collect();
        // |amp|² must be m/N: 2/3 and 1/3.
        assert!((amps.iter().fold(0.0f64, |a, &b| a.max(b)) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn classify_unique_neighbor() {
        let ts = ts(&[("00", 0), ("11", 1)], 2);
        let result = classify(
            &ts,
            &"00".parse().unwrap(),
            &QknnConfig::exact(1),
            &mut rng(),
        )
        .unwrap();
        assert_eq!(result.predicted, 0);
        assert!((result.class_distribution[0] - 1.0).abs() < 1e-12);
        assert!((result.acceptance_probability - 0.5).abs() < 1e-12);
        assert_eq!(result.effective_threshold, 1);
    }

    #[test]
    fn classify_breaks_ties_toward_lowest_label() {
        let ts = ts(&[("01", 0), ("10", 1)], 2);
        let result = classify(
            &ts,
            &"11".parse().unwrap(),
            &QknnConfig::exact(2),
            &mut rng(),
        )
        .unwrap();
        assert!((result.class_distribution[0] - 0.5).abs() < 1e-12);
        assert!((result.class_distribution[1] - 0.5).abs() < 1e-12);
        assert_eq!(result.predicted, 0);
    }

    #[test]
    fn classify_identity_case_accepts_everything() {
        let ts = ts(&[("000", 0)], 1);
        for t in 1..=4 {
            let result = classify(
                &ts,
                &"000".parse().unwrap(),
                &QknnConfig::exact(t),
                &mut rng(),
            )
            .unwrap();
            assert_eq!(result.predicted, 0);
            assert!((result.acceptance_probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_widens_threshold_on_empty_selection() {
        let ts = ts(&[("1111", 0)], 1);
        let result = classify(
            &ts,
            &"0000".parse().unwrap(),
            &QknnConfig::exact(1),
            &mut rng(),
        )
        .unwrap();
        // Distance is 4, so the first accepting threshold is 5 = n + 1.
        assert_eq!(result.effective_threshold, 5);

        let mut cfg = QknnConfig::exact(1);
        cfg.widen_on_empty = false;
        let err = classify(&ts, &"0000".parse().unwrap(), &cfg, &mut rng()).unwrap_err();
        assert_eq!(err, QknnError::NoNeighbors { t: 1 });
    }

    #[test]
    fn calibrate_threshold_counts_branches() {
        // Distances to test 0000: 0, 1, 2, 3.
        let ts = ts(&[("0000", 0), ("0001", 0), ("0011", 1), ("0111", 1)], 2);
        let test: BitVector = "0000".parse().unwrap();
        assert_eq!(calibrate_threshold(&ts, &test, 2).unwrap(), 2);
        assert_eq!(calibrate_threshold(&ts, &test, 4).unwrap(), 4);
        assert_eq!(calibrate_threshold(&ts, &test, 1).unwrap(), 1);
        assert!(calibrate_threshold(&ts, &test, 5).is_err());
        assert!(calibrate_threshold(&ts, &test, 0).is_err());
    }

    #[test]
    fn shots_mode_matches_exact_on_a_degenerate_case() {
        let ts = ts(&[("01", 0), ("01", 0), ("11", 1)], 2);
        let mut cfg = QknnConfig::exact(1);
        cfg.mode = ExecutionMode::Shots(512);
        let result = classify(&ts, &"01".parse().unwrap(), &cfg, &mut rng()).unwrap();
        // Every accepted shot lands on class 0 here.
        assert_eq!(result.predicted, 0);
        assert_eq!(result.class_distribution[0], 1.0);
        assert!(result.accepted_shots.unwrap() > 0);
    }
}
