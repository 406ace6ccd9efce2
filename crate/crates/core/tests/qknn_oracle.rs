//! The central correctness property: the quantum pipeline's post-selected
//! statistics must match brute-force Hamming counting exactly.

use qknn_core::qknn::{
    build_accumulator_circuit, build_difference_circuit, build_flag_circuit, calibrate_threshold,
    classify, encode_training_superposition, threshold_offset, BitVector, FlagMode,
    LabeledBitVector, QknnConfig, QknnLayout, ThresholdMode, TrainingSet,
};
use qknn_core::sim::Backend;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Classical reference: count branches with popcount(XOR) < t.
struct BruteForce<'a> {
    ts: &'a TrainingSet,
}

impl BruteForce<'_> {
    /// (acceptance probability, conditional class distribution, majority label)
    fn evaluate(&self, test: &BitVector, t: usize) -> (f64, Vec<f64>, Option<u32>) {
        let test_bits = test.as_basis();
        let mut inside = 0usize;
        let mut by_class = vec![0usize; self.ts.class_count() as usize];
        for item in self.ts.items() {
            let d = (item.vector.as_basis() ^ test_bits).count_ones() as usize;
            if d < t {
                inside += 1;
                by_class[item.label as usize] += 1;
            }
        }
        let acceptance = inside as f64 / self.ts.len() as f64;
        if inside == 0 {
            return (0.0, vec![0.0; by_class.len()], None);
        }
        let distribution: Vec<f64> =
            by_class.iter().map(|&c| c as f64 / inside as f64).collect();
        let mut best = 0usize;
        for (label, &count) in by_class.iter().enumerate() {
            if count > by_class[best] {
                best = label;
            }
        }
        (acceptance, distribution, Some(best as u32))
    }
}

fn random_training_set(n: usize, rng: &mut ChaCha8Rng) -> TrainingSet {
    let size = rng.random_range(1..=8);
    let items = (0..size)
        .map(|_| {
            let bits = rng.random_range(0..1u64 << n);
            LabeledBitVector::new(BitVector::from_basis(bits, n), rng.random_range(0..2))
        })
        .collect();
    TrainingSet::new(items, 2).unwrap()
}

#[test]
fn exact_distribution_matches_brute_force_counting() {
    let mut rng = ChaCha8Rng::seed_from_u64(31337);
    for round in 0..40 {
        let n = rng.random_range(1..=6);
        let ts = random_training_set(n, &mut rng);
        let oracle = BruteForce { ts: &ts };
        for t in 1..=n + 1 {
            for test_bits in 0..1u64 << n {
                let test = BitVector::from_basis(test_bits, n);
                let (acceptance, distribution, _) = oracle.evaluate(&test, t);
                let mut cfg = QknnConfig::exact(t);
                cfg.widen_on_empty = false;
                match classify(&ts, &test, &cfg, &mut rng) {
                    Ok(result) => {
                        assert!(
                            (result.acceptance_probability - acceptance).abs() < 1e-9,
                            "round {round} n={n} t={t} test={test}: acceptance"
                        );
                        for (label, &p) in result.class_distribution.iter().enumerate() {
                            assert!(
                                (p - distribution[label]).abs() < 1e-9,
                                "round {round} n={n} t={t} test={test}: class {label}"
                            );
                        }
                    }
                    Err(_) => assert_eq!(acceptance, 0.0, "round {round} n={n} t={t}"),
                }
            }
        }
    }
}

#[test]
fn predictions_match_brute_force_majority_with_low_label_ties() {
    let mut rng = ChaCha8Rng::seed_from_u64(414);
    for _ in 0..60 {
        let n = rng.random_range(2..=5);
        let ts = random_training_set(n, &mut rng);
        let oracle = BruteForce { ts: &ts };
        let t = rng.random_range(1..=n + 1);
        let test = BitVector::from_basis(rng.random_range(0..1u64 << n), n);
        let (_, distribution, majority) = oracle.evaluate(&test, t);
        let mut cfg = QknnConfig::exact(t);
        cfg.widen_on_empty = false;
        if let Ok(result) = classify(&ts, &test, &cfg, &mut rng) {
            let majority = majority.unwrap();
            if (distribution[majority as usize]
                - distribution[result.predicted as usize])
                .abs()
                < 1e-12
            {
                // Tied vote: the implementation promises the lowest label.
                assert!(result.predicted <= majority);
            } else {
                assert_eq!(result.predicted, majority);
            }
        }
    }
}

#[test]
fn flag_modes_agree_wherever_or_highbits_is_defined() {
    let mut rng = ChaCha8Rng::seed_from_u64(2187);
    let n = 4;
    for _ in 0..10 {
        let ts = random_training_set(n, &mut rng);
        for t in [1usize, 2, 4] {
            for test_bits in 0..1u64 << n {
                let test = BitVector::from_basis(test_bits, n);
                let mut carry_cfg = QknnConfig::exact(t);
                carry_cfg.widen_on_empty = false;
                let mut or_cfg = carry_cfg;
                or_cfg.flag_mode = FlagMode::OrHighBits;
                let carry = classify(&ts, &test, &carry_cfg, &mut rng);
                let or = classify(&ts, &test, &or_cfg, &mut rng);
                match (carry, or) {
                    (Ok(a), Ok(b)) => {
                        assert!(
                            (a.acceptance_probability - b.acceptance_probability).abs() < 1e-12
                        );
                        assert_eq!(a.predicted, b.predicted);
                        for (pa, pb) in
                            a.class_distribution.iter().zip(&b.class_distribution)
                        {
                            assert!((pa - pb).abs() < 1e-12);
                        }
                    }
                    (Err(_), Err(_)) => {}
                    (a, b) => panic!("modes disagree on emptiness: {a:?} vs {b:?}"),
                }
            }
        }
    }
}

#[test]
fn pipeline_followed_by_its_inverse_restores_the_encoding() {
    let mut rng = ChaCha8Rng::seed_from_u64(140);
    for _ in 0..20 {
        let n = rng.random_range(1..=4);
        let ts = random_training_set(n, &mut rng);
        let layout = QknnLayout::for_problem(n, 2).unwrap();
        let t = rng.random_range(1..=n + 1);
        let test = BitVector::from_basis(rng.random_range(0..1u64 << n), n);

        let offset = threshold_offset(n, t).unwrap();
        let encoded =
            encode_training_superposition(&ts, &layout, offset, Backend::Sparse).unwrap();

        let mut pipeline = build_difference_circuit(&test, &layout, true).unwrap();
        pipeline.extend(&build_accumulator_circuit(&layout));
        pipeline.extend(&build_flag_circuit(&layout, FlagMode::OffsetCarry, t).unwrap());

        let mut state = encoded.clone();
        state.apply_circuit(&pipeline).unwrap();
        state.apply_circuit(&pipeline.inverted()).unwrap();
        assert!(state.max_amplitude_difference(&encoded) < 1e-12);
    }
}

#[test]
fn acceptance_probability_equals_branch_fraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for _ in 0..40 {
        let n = rng.random_range(1..=5);
        let ts = random_training_set(n, &mut rng);
        let t = rng.random_range(1..=n + 1);
        let test = BitVector::from_basis(rng.random_range(0..1u64 << n), n);
        let inside = ts
            .items()
            .iter()
            .filter(|item| {
                ((item.vector.as_basis() ^ test.as_basis()).count_ones() as usize) < t
            })
            .count();
        let mut cfg = QknnConfig::exact(t);
        cfg.widen_on_empty = false;
        match classify(&ts, &test, &cfg, &mut rng) {
            Ok(result) => assert!(
                (result.acceptance_probability - inside as f64 / ts.len() as f64).abs() < 1e-9
            ),
            Err(_) => assert_eq!(inside, 0),
        }
    }
}

#[test]
fn widest_threshold_returns_the_training_prior() {
    let mut rng = ChaCha8Rng::seed_from_u64(999);
    for _ in 0..10 {
        let n = rng.random_range(1..=4);
        let ts = random_training_set(n, &mut rng);
        let prior: Vec<f64> = (0..2u32)
            .map(|label| {
                ts.items().iter().filter(|item| item.label == label).count() as f64
                    / ts.len() as f64
            })
            .collect();
        let test = BitVector::from_basis(rng.random_range(0..1u64 << n), n);
        let result = classify(&ts, &test, &QknnConfig::exact(n + 1), &mut rng).unwrap();
        assert!((result.acceptance_probability - 1.0).abs() < 1e-12);
        for (got, want) in result.class_distribution.iter().zip(&prior) {
            assert!((got - want).abs() < 1e-9);
        }
    }
}

#[test]
fn shots_mode_frequencies_within_four_sigma_of_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let shots = 4096u64;
    for round in 0..10 {
        let n = rng.random_range(2..=5);
        let ts = random_training_set(n, &mut rng);
        let t = rng.random_range(1..=n + 1);
        let test = BitVector::from_basis(rng.random_range(0..1u64 << n), n);

        let mut exact_cfg = QknnConfig::exact(t);
        exact_cfg.widen_on_empty = false;
        let exact = match classify(&ts, &test, &exact_cfg, &mut rng) {
            Ok(result) => result,
            Err(_) => continue,
        };
        let mut shots_cfg = exact_cfg;
        shots_cfg.mode = qknn_core::qknn::ExecutionMode::Shots(shots);
        let sampled = classify(&ts, &test, &shots_cfg, &mut rng).unwrap();
        assert_eq!(sampled.effective_threshold, exact.effective_threshold);

        let accepted = sampled.accepted_shots.unwrap() as f64;
        for (label, &p) in exact.class_distribution.iter().enumerate() {
            let sigma = (p * (1.0 - p) / accepted).sqrt();
            let diff = (sampled.class_distribution[label] - p).abs();
            assert!(
                diff <= 4.0 * sigma + 1e-12,
                "round {round} label {label}: |{} - {p}| > 4σ = {}",
                sampled.class_distribution[label],
                4.0 * sigma
            );
        }
    }
}

#[test]
fn auto_threshold_reaches_the_requested_neighbor_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    for _ in 0..30 {
        let n = rng.random_range(2..=5);
        let ts = random_training_set(n, &mut rng);
        let k = rng.random_range(1..=ts.len());
        let test = BitVector::from_basis(rng.random_range(0..1u64 << n), n);
        let t = calibrate_threshold(&ts, &test, k).unwrap();

        let count_within = |limit: usize| {
            ts.items()
                .iter()
                .filter(|item| {
                    ((item.vector.as_basis() ^ test.as_basis()).count_ones() as usize) < limit
                })
                .count()
        };
        assert!(count_within(t) >= k, "t={t} misses k={k}");
        assert!(t == 1 || count_within(t - 1) < k, "t={t} is not minimal for k={k}");

        let mut cfg = QknnConfig::exact(1);
        cfg.threshold = ThresholdMode::Auto { neighbors: k };
        let result = classify(&ts, &test, &cfg, &mut rng).unwrap();
        assert_eq!(result.effective_threshold, t);
        assert!(result.acceptance_probability >= k as f64 / ts.len() as f64 - 1e-12);
    }
}
