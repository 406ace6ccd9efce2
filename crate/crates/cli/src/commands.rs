//! The five subcommands.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qknn_core::data::{
    binarize, load_csv, min_max_normalize, select_mean_features, split, CleaningReport, Dataset,
    SplitSpec,
};
use qknn_core::grover::{grover_search, optimal_iterations, GroverSpec};
use qknn_core::knn::{k_sweep, suggest_k, FeatureVector, KnnModel, Metric};
use qknn_core::qknn::{
    classify, BitVector, ExecutionMode, LabeledBitVector, QknnConfig, ThresholdMode, TrainingSet,
};
use qknn_core::sim::Backend;
use qknn_core::swap_test::{quantum_euclidean_distance, swap_test_p0, swap_test_sampled};

use crate::args::{
    CompareArgs, GroverArgs, KnnArgs, QknnArgs, ShotsSpec, SwapTestArgs, ThresholdSpec,
};
use crate::report::{
    bitstring, emit_report, mean, stddev, tool_version, AlgorithmSummary, ConfigEcho,
    ExperimentReport, GroverReport, KSweepPoint, OutcomeProbability, RunRecord, SampledSwapBlock,
    Summary, SwapTestReport, SCHEMA_VERSION,
};
use crate::CliError;

pub fn cmd_swap_test(args: &SwapTestArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let x = args.x.to_state(Backend::Sparse).map_err(CliError::Usage)?;
    let y = args.y.to_state(Backend::Sparse).map_err(CliError::Usage)?;
    if x.qubit_count() != y.qubit_count() {
        return Err(CliError::Usage(format!(
            "states must have equal qubit counts ({} vs {})",
            x.qubit_count(),
            y.qubit_count()
        )));
    }

    let p0 = swap_test_p0(&x, &y).map_err(|err| CliError::Internal(err.to_string()))?;
    let fidelity = qknn_core::swap_test::fidelity_from_p0(p0);
    let sampled = match args.shots {
        ShotsSpec::Exact => None,
        ShotsSpec::Count(shots) => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed.seed);
            let sample = swap_test_sampled(&x, &y, shots, &mut rng)
                .map_err(|err| CliError::Internal(err.to_string()))?;
            Some(SampledSwapBlock {
                shots,
                p0_estimate: sample.p0_estimate,
                fidelity_estimate: sample.fidelity.fidelity,
                fidelity_clamped: sample.fidelity.clamped,
                distance_estimate: quantum_euclidean_distance(sample.fidelity.fidelity),
            })
        }
    };

    let report = SwapTestReport {
        schema_version: SCHEMA_VERSION,
        tool_version: tool_version(),
        command: "swap-test".into(),
        x: args.x.source.clone(),
        y: args.y.source.clone(),
        seed: args.seed.seed,
        p0_exact: p0,
        fidelity_exact: fidelity.fidelity,
        distance_exact: quantum_euclidean_distance(fidelity.fidelity),
        sampled,
        total_elapsed_ms: started.elapsed().as_millis() as u64,
    };
    emit_report(&report, args.output.format, args.output.out.as_deref())
}

pub fn cmd_grover(args: &GroverArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let iterations = args.iterations.unwrap_or_else(|| optimal_iterations(args.n));
    let spec = GroverSpec::new(args.n, args.marked, iterations)
        .map_err(|err| CliError::Usage(err.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed.seed);
    let outcome = grover_search(&spec, &mut rng)
        .map_err(|err| CliError::Internal(err.to_string()))?;

    let distribution: Vec<OutcomeProbability> = outcome
        .probabilities
        .iter()
        .enumerate()
        .map(|(k, &p)| OutcomeProbability {
            outcome: k as u64,
            bits: bitstring(k as u64, args.n),
            probability: p,
        })
        .collect();
    let report = GroverReport {
        schema_version: SCHEMA_VERSION,
        tool_version: tool_version(),
        command: "grover".into(),
        n: args.n,
        marked: args.marked,
        iterations,
        seed: args.seed.seed,
        marked_probability: outcome.probability_of(args.marked),
        sampled_outcome: outcome.sampled,
        distribution,
        total_elapsed_ms: started.elapsed().as_millis() as u64,
    };
    emit_report(&report, args.output.format, args.output.out.as_deref())
}

/// Load, select the mean features, and validate the split fraction.
fn load_dataset(path: &Path, fraction: f64) -> Result<(Dataset, CleaningReport), CliError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(CliError::Usage(format!(
            "--split must be inside (0, 1), got {fraction}"
        )));
    }
    let (records, cleaning) = load_csv(path).map_err(|err| CliError::Data(err.to_string()))?;
    let dataset = select_mean_features(&records).map_err(|err| CliError::Data(err.to_string()))?;
    Ok((dataset, cleaning))
}

/// FNV-1a over the partition contents; identifies a split independent of
/// which algorithm consumes it.
fn split_hash(train: &Dataset, test: &Dataset) -> String {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |byte: u8| {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for dataset in [train, test] {
        for (row, &label) in dataset.features.iter().zip(&dataset.labels) {
            for &value in row {
                for byte in value.to_bits().to_le_bytes() {
                    eat(byte);
                }
            }
            for byte in label.to_le_bytes() {
                eat(byte);
            }
            eat(0xff);
        }
        eat(0xfe);
    }
    format!("{hash:016x}")
}

struct KnnRun {
    record: RunRecord,
    sweep: Option<Vec<KSweepPoint>>,
    best_k: Option<usize>,
}

fn run_knn_once(
    dataset: &Dataset,
    fraction: f64,
    seed: u64,
    k: Option<usize>,
    k_range: Option<(usize, usize)>,
) -> Result<KnnRun, CliError> {
    let started = Instant::now();
    let spec = SplitSpec::new(fraction, seed).map_err(|err| CliError::Usage(err.to_string()))?;
    let (train, test) = split(dataset, &spec).map_err(|err| CliError::Data(err.to_string()))?;
    let hash = split_hash(&train, &test);
    let (train, test) = min_max_normalize(&train, &test)
        .map_err(|err| CliError::Data(err.to_string()))?;

    let training: Vec<(FeatureVector, u32)> = train
        .features
        .iter()
        .zip(&train.labels)
        .map(|(row, &label)| (FeatureVector::Real(row.clone()), label))
        .collect();
    let validation: Vec<(FeatureVector, u32)> = test
        .features
        .iter()
        .zip(&test.labels)
        .map(|(row, &label)| (FeatureVector::Real(row.clone()), label))
        .collect();

    let (sweep, best_k) = match k_range {
        Some((start, end)) => {
            let end = end.min(training.len());
            let points = k_sweep(&training, &validation, start..=end, Metric::Euclidean)
                .map_err(|err| CliError::Usage(err.to_string()))?;
            let best = points
                .iter()
                .fold(None::<(usize, f64)>, |best, &(k, accuracy)| match best {
                    Some((_, best_accuracy)) if accuracy <= best_accuracy => best,
                    _ => Some((k, accuracy)),
                })
                .map(|(k, _)| k);
            (
                Some(points.into_iter().map(|(k, accuracy)| KSweepPoint { k, accuracy }).collect()),
                best,
            )
        }
        None => (None, None),
    };

    let chosen_k = k.or(best_k).unwrap_or_else(|| suggest_k(training.len()));
    let model = KnnModel::new(training, Metric::Euclidean, chosen_k)
        .map_err(|err| CliError::Usage(err.to_string()))?;
    let correct = validation
        .iter()
        .filter(|(v, label)| model.predict(v).map(|p| p == *label).unwrap_or(false))
        .count();

    Ok(KnnRun {
        record: RunRecord {
            seed,
            algorithm: "knn".into(),
            accuracy: correct as f64 / validation.len() as f64,
            correct,
            total: validation.len(),
            k: Some(chosen_k),
            mean_acceptance: None,
            effective_t_histogram: None,
            split_hash: hash,
            elapsed_ms: started.elapsed().as_millis() as u64,
        },
        sweep,
        best_k,
    })
}

fn run_qknn_once(
    dataset: &Dataset,
    fraction: f64,
    seed: u64,
    threshold: ThresholdSpec,
    k_for_auto: usize,
    shots: ShotsSpec,
    backend: Backend,
) -> Result<RunRecord, CliError> {
    let started = Instant::now();
    let spec = SplitSpec::new(fraction, seed).map_err(|err| CliError::Usage(err.to_string()))?;
    let (train, test) = split(dataset, &spec).map_err(|err| CliError::Data(err.to_string()))?;
    let hash = split_hash(&train, &test);
    let (train, test) = min_max_normalize(&train, &test)
        .map_err(|err| CliError::Data(err.to_string()))?;
    let (train_bits, test_bits) =
        binarize(&train, &test).map_err(|err| CliError::Data(err.to_string()))?;

    let items: Vec<LabeledBitVector> = train_bits
        .vectors
        .iter()
        .zip(&train_bits.labels)
        .map(|(vector, &label)| LabeledBitVector::new(vector.clone(), label))
        .collect();
    let training = TrainingSet::new(items, 2).map_err(|err| CliError::Data(err.to_string()))?;

    let threshold_mode = match threshold {
        ThresholdSpec::Auto => {
            if k_for_auto < 1 || k_for_auto > training.len() {
                return Err(CliError::Usage(format!(
                    "--k-for-auto must be inside 1..={}, got {k_for_auto}",
                    training.len()
                )));
            }
            ThresholdMode::Auto { neighbors: k_for_auto }
        }
        ThresholdSpec::Fixed(t) => {
            if t > training.feature_count() + 1 {
                return Err(CliError::Usage(format!(
                    "--threshold must be inside 1..={}, got {t}",
                    training.feature_count() + 1
                )));
            }
            ThresholdMode::Fixed(t)
        }
    };
    let cfg = QknnConfig {
        threshold: threshold_mode,
        mode: match shots {
            ShotsSpec::Exact => ExecutionMode::Exact,
            ShotsSpec::Count(count) => ExecutionMode::Shots(count),
        },
        backend,
        ..QknnConfig::exact(1)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut correct = 0usize;
    let mut acceptance_sum = 0.0;
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for (vector, &label) in test_bits.vectors.iter().zip(&test_bits.labels) {
        let result = classify(&training, vector, &cfg, &mut rng)
            .map_err(|err| CliError::Internal(err.to_string()))?;
        correct += usize::from(result.predicted == label);
        acceptance_sum += result.acceptance_probability;
        *histogram.entry(result.effective_threshold).or_default() += 1;
    }

    Ok(RunRecord {
        seed,
        algorithm: "qknn".into(),
        accuracy: correct as f64 / test_bits.len() as f64,
        correct,
        total: test_bits.len(),
        k: matches!(threshold, ThresholdSpec::Auto).then_some(k_for_auto),
        mean_acceptance: Some(acceptance_sum / test_bits.len() as f64),
        effective_t_histogram: Some(histogram),
        split_hash: hash,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

fn summarize(runs: &[RunRecord]) -> Vec<AlgorithmSummary> {
    let mut order: Vec<String> = Vec::new();
    let mut grouped: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for run in runs {
        if !grouped.contains_key(&run.algorithm) {
            order.push(run.algorithm.clone());
        }
        grouped.entry(run.algorithm.clone()).or_default().push(run.accuracy);
    }
    order
        .into_iter()
        .map(|algorithm| {
            let per_seed = grouped[&algorithm].clone();
            AlgorithmSummary {
                algorithm,
                mean_accuracy: mean(&per_seed),
                stddev_accuracy: stddev(&per_seed),
                per_seed,
            }
        })
        .collect()
}

pub fn cmd_knn(args: &KnnArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (dataset, cleaning) = load_dataset(&args.data.data, args.data.split)?;
    let run = run_knn_once(
        &dataset,
        args.data.split,
        args.seed.seed,
        args.k,
        args.k_range.map(|r| (r.start, r.end)),
    )?;

    let runs = vec![run.record];
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        tool_version: tool_version(),
        command: "knn".into(),
        config: ConfigEcho {
            data_path: args.data.data.display().to_string(),
            base_seed: args.seed.seed,
            train_fraction: args.data.split,
            repetitions: 1,
            k: args.k,
            k_range: args.k_range.map(|r| r.to_string()),
            threshold: None,
            k_for_auto: None,
            shots: "exact".into(),
            backend: "classical".into(),
        },
        cleaning,
        summary: Summary {
            algorithms: summarize(&runs),
            k_sweep: run.sweep,
            best_k: run.best_k,
            ..Summary::default()
        },
        runs,
        total_elapsed_ms: started.elapsed().as_millis() as u64,
    };
    emit_report(&report, args.output.format, args.output.out.as_deref())
}

pub fn cmd_qknn(args: &QknnArgs) -> Result<(), CliError> {
    let started = Instant::now();
    let (dataset, cleaning) = load_dataset(&args.data.data, args.data.split)?;
    let record = run_qknn_once(
        &dataset,
        args.data.split,
        args.seed.seed,
        args.threshold,
        args.k_for_auto,
        args.shots,
        args.backend.into(),
    )?;

    let runs = vec![record];
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        tool_version: tool_version(),
        command: "qknn".into(),
        config: ConfigEcho {
            data_path: args.data.data.display().to_string(),
            base_seed: args.seed.seed,
            train_fraction: args.data.split,
            repetitions: 1,
            k: None,
            k_range: None,
            threshold: Some(args.threshold.to_string()),
            k_for_auto: Some(args.k_for_auto),
            shots: args.shots.to_string(),
            backend: format!("{:?}", Backend::from(args.backend)).to_lowercase(),
        },
        cleaning,
        summary: Summary { algorithms: summarize(&runs), ..Summary::default() },
        runs,
        total_elapsed_ms: started.elapsed().as_millis() as u64,
    };
    emit_report(&report, args.output.format, args.output.out.as_deref())
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let started = Instant::now();
    if args.reps < 1 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let (dataset, cleaning) = load_dataset(&args.data.data, args.data.split)?;
    let k_for_auto = args.k_for_auto.unwrap_or(args.k);

    let mut runs = Vec::new();
    let mut knn_accuracies = Vec::new();
    let mut qknn_accuracies = Vec::new();
    for rep in 0..args.reps {
        let seed = args.seed.seed + u64::from(rep);
        let knn = run_knn_once(&dataset, args.data.split, seed, Some(args.k), None)?;
        let qknn = run_qknn_once(
            &dataset,
            args.data.split,
            seed,
            ThresholdSpec::Auto,
            k_for_auto,
            args.shots,
            args.backend.into(),
        )?;
        debug_assert_eq!(knn.record.split_hash, qknn.split_hash);
        knn_accuracies.push(knn.record.accuracy);
        qknn_accuracies.push(qknn.accuracy);
        runs.push(knn.record);
        runs.push(qknn);
    }

    let paired: Vec<f64> = qknn_accuracies
        .iter()
        .zip(&knn_accuracies)
        .map(|(q, k)| q - k)
        .collect();
    let report = ExperimentReport {
        schema_version: SCHEMA_VERSION,
        tool_version: tool_version(),
        command: "compare".into(),
        config: ConfigEcho {
            data_path: args.data.data.display().to_string(),
            base_seed: args.seed.seed,
            train_fraction: args.data.split,
            repetitions: args.reps,
            k: Some(args.k),
            k_range: None,
            threshold: Some("auto".into()),
            k_for_auto: Some(k_for_auto),
            shots: args.shots.to_string(),
            backend: format!("{:?}", Backend::from(args.backend)).to_lowercase(),
        },
        cleaning,
        summary: Summary {
            algorithms: summarize(&runs),
            mean_paired_difference: Some(mean(&paired)),
            paired_differences: Some(paired),
            ..Summary::default()
        },
        runs,
        total_elapsed_ms: started.elapsed().as_millis() as u64,
    };
    emit_report(&report, args.output.format, args.output.out.as_deref())
}
