//! WDBC ingestion and preparation: CSV loading with a cleaning report,
//! mean-feature selection, seeded stratified splits, train-fitted min-max
//! scaling, and train-fitted median binarization.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qknn::BitVector;

/// WDBC rows carry an id, an M/B diagnosis, and 30 real features.
pub const RAW_FEATURE_COUNT: usize = 30;
/// The first ten features are the per-record means; the benchmark uses them.
pub const MEAN_FEATURE_COUNT: usize = 10;

pub const MEAN_FEATURE_NAMES: [&str; MEAN_FEATURE_COUNT] = [
    "radius_mean",
    "texture_mean",
    "perimeter_mean",
    "area_mean",
    "smoothness_mean",
    "compactness_mean",
    "concavity_mean",
    "concave_points_mean",
    "symmetry_mean",
    "fractal_dimension_mean",
];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: csv::Error,
    },
    #[error("no valid rows after cleaning")]
    NoValidRows,
    #[error("dataset must not be empty")]
    EmptyDataset,
    #[error("train fraction must be in (0, 1), got {0}")]
    InvalidFraction(f64),
    #[error("records must not be empty")]
    NoRecords,
}

/// One raw WDBC row.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRecord {
    pub id: String,
    /// 'M' (malignant) or 'B' (benign).
    pub diagnosis: char,
    pub features: Vec<f64>,
}

/// Counts of rows read and dropped, by reason.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleaningReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    /// Missing, non-numeric, or non-finite feature fields.
    pub dropped_missing_value: usize,
    /// Diagnosis token other than M or B.
    pub dropped_bad_label: usize,
    /// Wrong field count or unreadable row.
    pub dropped_malformed: usize,
}

impl CleaningReport {
    pub fn dropped(&self) -> usize {
        self.dropped_missing_value + self.dropped_bad_label + self.dropped_malformed
    }
}

enum RowDefect {
    MissingValue,
    BadLabel,
    Malformed,
}

fn parse_row(record: &csv::StringRecord) -> Result<RawRecord, RowDefect> {
    if record.len() != 2 + RAW_FEATURE_COUNT {
        return Err(RowDefect::Malformed);
    }
    let id = record.get(0).unwrap_or("").trim().to_string();
    let diagnosis = match record.get(1).map(str::trim) {
        Some("M") => 'M',
        Some("B") => 'B',
        _ => return Err(RowDefect::BadLabel),
    };
    let mut features = Vec::with_capacity(RAW_FEATURE_COUNT);
    for field in record.iter().skip(2) {
        match field.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => features.push(v),
            _ => return Err(RowDefect::MissingValue),
        }
    }
    Ok(RawRecord { id, diagnosis, features })
}

/// A header row is recognized by non-numeric feature fields in the first line.
fn looks_like_header(record: &csv::StringRecord) -> bool {
    record
        .iter()
        .skip(2)
        .any(|field| field.trim().parse::<f64>().is_err())
}

/// Load a WDBC-layout CSV (id, M/B diagnosis, 30 features; comma-separated,
/// optional header). Defective rows are dropped and counted, never fatal.
pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<(Vec<RawRecord>, CleaningReport), DataError> {
    let path_text = path.as_ref().display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path.as_ref())
        .map_err(|source| DataError::Io { path: path_text.clone(), source })?;

    let mut records = Vec::new();
    let mut report = CleaningReport::default();
    for (index, row) in reader.records().enumerate() {
        let row = match row {
            Ok(row) => row,
            Err(_) => {
                report.rows_read += 1;
                report.dropped_malformed += 1;
                continue;
            }
        };
        if index == 0 && looks_like_header(&row) {
            continue;
        }
        report.rows_read += 1;
        match parse_row(&row) {
            Ok(record) => {
                report.rows_kept += 1;
                records.push(record);
            }
            Err(RowDefect::MissingValue) => report.dropped_missing_value += 1,
            Err(RowDefect::BadLabel) => report.dropped_bad_label += 1,
            Err(RowDefect::Malformed) => report.dropped_malformed += 1,
        }
    }
    if records.is_empty() {
        return Err(DataError::NoValidRows);
    }
    Ok((records, report))
}

/// Feature matrix plus labels (malignant = 1, benign = 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u32>,
    pub feature_names: Vec<String>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_names.len()
    }

    fn take(&self, indices: &[usize]) -> Dataset {
        Dataset {
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            feature_names: self.feature_names.clone(),
        }
    }
}

/// Keep the ten mean columns and map the diagnosis to a binary label.
pub fn select_mean_features(records: &[RawRecord]) -> Result<Dataset, DataError> {
    if records.is_empty() {
        return Err(DataError::NoRecords);
    }
    Ok(Dataset {
        features: records
            .iter()
            .map(|r| r.features[..MEAN_FEATURE_COUNT].to_vec())
            .collect(),
        labels: records
            .iter()
            .map(|r| u32::from(r.diagnosis == 'M'))
            .collect(),
        feature_names: MEAN_FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
    })
}

/// Split parameters: train fraction (0.65 for the benchmark) and the shuffle
/// seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self, DataError> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(DataError::InvalidFraction(train_fraction));
        }
        Ok(SplitSpec { train_fraction, seed })
    }
}

/// Deterministic stratified split. The train side gets
/// `round(fraction·total)` rows overall while each class stays within one
/// row of its proportional share; both sides keep original row order.
pub fn split(dataset: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset), DataError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(DataError::InvalidFraction(spec.train_fraction));
    }
    if dataset.is_empty() {
        return Err(DataError::EmptyDataset);
    }
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, &label) in dataset.labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }

    let total_target = (spec.train_fraction * dataset.len() as f64).round() as usize;
    // Largest-remainder apportionment of the train quota across classes.
    let mut quotas: Vec<(u32, usize, f64)> = by_class
        .iter()
        .map(|(&label, members)| {
            let ideal = spec.train_fraction * members.len() as f64;
            (label, ideal.floor() as usize, ideal.fract())
        })
        .collect();
    let mut remaining = total_target.saturating_sub(quotas.iter().map(|q| q.1).sum::<usize>());
    quotas.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    for quota in &mut quotas {
        if remaining == 0 {
            break;
        }
        if quota.1 < by_class[&quota.0].len() {
            quota.1 += 1;
            remaining -= 1;
        }
    }
    let targets: BTreeMap<u32, usize> = quotas.iter().map(|&(label, n, _)| (label, n)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train_indices = Vec::new();
    let mut test_indices = Vec::new();
    for (label, mut members) in by_class {
        members.shuffle(&mut rng);
        let cut = targets[&label];
        train_indices.extend_from_slice(&members[..cut]);
        test_indices.extend_from_slice(&members[cut..]);
    }
    train_indices.sort_unstable();
    test_indices.sort_unstable();
    Ok((dataset.take(&train_indices), dataset.take(&test_indices)))
}

/// Per-feature affine map to [0, 1], fitted on the training partition only.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxNormalizer {
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl MinMaxNormalizer {
    pub fn fit(train: &Dataset) -> Result<Self, DataError> {
        if train.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        let d = train.feature_count();
        let mut mins = vec![f64::INFINITY; d];
        let mut maxs = vec![f64::NEG_INFINITY; d];
        for row in &train.features {
            for (j, &v) in row.iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        Ok(MinMaxNormalizer { mins, maxs })
    }

    pub fn params(&self) -> (&[f64], &[f64]) {
        (&self.mins, &self.maxs)
    }

    /// Scale into [0, 1]; constant features map to 0, out-of-range values
    /// (possible on the test side) clamp.
    pub fn apply(&self, dataset: &Dataset) -> Dataset {
        let features = dataset
            .features
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        let range = self.maxs[j] - self.mins[j];
                        if range > 0.0 {
                            ((v - self.mins[j]) / range).clamp(0.0, 1.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Dataset {
            features,
            labels: dataset.labels.clone(),
            feature_names: dataset.feature_names.clone(),
        }
    }
}

/// Fit min-max scaling on `train` and apply it to both partitions.
pub fn min_max_normalize(
    train: &Dataset,
    test: &Dataset,
) -> Result<(Dataset, Dataset), DataError> {
    let normalizer = MinMaxNormalizer::fit(train)?;
    Ok((normalizer.apply(train), normalizer.apply(test)))
}

/// Bit vectors plus labels, for the Hamming-space classifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct BitDataset {
    pub vectors: Vec<BitVector>,
    pub labels: Vec<u32>,
}

impl BitDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Per-feature median thresholds, fitted on the training partition only.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianBinarizer {
    thresholds: Vec<f64>,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

impl MedianBinarizer {
    pub fn fit(train: &Dataset) -> Result<Self, DataError> {
        if train.is_empty() {
            return Err(DataError::EmptyDataset);
        }
        let thresholds = (0..train.feature_count())
            .map(|j| {
                let mut column: Vec<f64> = train.features.iter().map(|row| row[j]).collect();
                median(&mut column)
            })
            .collect();
        Ok(MedianBinarizer { thresholds })
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Bit `i` is 1 exactly when feature `i` exceeds its training median
    /// (strict, so values at the median and constant features give 0).
    pub fn apply(&self, dataset: &Dataset) -> BitDataset {
        BitDataset {
            vectors: dataset
                .features
                .iter()
                .map(|row| {
                    BitVector::new(
                        row.iter()
                            .enumerate()
                            .map(|(j, &v)| v > self.thresholds[j])
                            .collect(),
                    )
                })
                .collect(),
            labels: dataset.labels.clone(),
        }
    }
}

/// Fit median thresholds on `train` and binarize both partitions.
pub fn binarize(train: &Dataset, test: &Dataset) -> Result<(BitDataset, BitDataset), DataError> {
    let binarizer = MedianBinarizer::fit(train)?;
    Ok((binarizer.apply(train), binarizer.apply(test)))
}
