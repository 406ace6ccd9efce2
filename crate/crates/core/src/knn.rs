//! Classical K-nearest-neighbors baseline: lazy storage, a full distance
//! pass per query, majority vote among the k closest.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::qknn::BitVector;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KnnError {
    #[error("training set must not be empty")]
    EmptyTrainingSet,
    #[error("k = {k} outside valid range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("feature vector kind does not match the {metric:?} metric")]
    MetricMismatch { metric: Metric },
    #[error("feature values must be finite")]
    NonFiniteValue,
}

/// Distance metric over feature vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// √(Σ (aᵢ − bᵢ)²) over real-valued vectors.
    Euclidean,
    /// Count of differing positions over bit vectors.
    Hamming,
}

/// Either a real-valued vector or a binarized one.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureVector {
    Real(Vec<f64>),
    Bits(BitVector),
}

impl FeatureVector {
    pub fn len(&self) -> usize {
        match self {
            FeatureVector::Real(v) => v.len(),
            FeatureVector::Bits(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64, KnnError> {
    if a.len() != b.len() {
        return Err(KnnError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

pub fn hamming_distance(a: &BitVector, b: &BitVector) -> Result<usize, KnnError> {
    if a.len() != b.len() {
        return Err(KnnError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter().zip(b.iter()).filter(|(x, y)| x != y).count())
}

fn distance(metric: Metric, a: &FeatureVector, b: &FeatureVector) -> Result<f64, KnnError> {
    match (metric, a, b) {
        (Metric::Euclidean, FeatureVector::Real(x), FeatureVector::Real(y)) => {
            euclidean_distance(x, y)
        }
        (Metric::Hamming, FeatureVector::Bits(x), FeatureVector::Bits(y)) => {
            hamming_distance(x, y).map(|d| d as f64)
        }
        (metric, _, _) => Err(KnnError::MetricMismatch { metric }),
    }
}

/// A lazy KNN model: stores the training data and defers everything to
/// prediction time.
#[derive(Debug, Clone)]
pub struct KnnModel {
    training: Vec<(FeatureVector, u32)>,
    metric: Metric,
    k: usize,
}

impl KnnModel {
    pub fn new(
        training: Vec<(FeatureVector, u32)>,
        metric: Metric,
        k: usize,
    ) -> Result<Self, KnnError> {
        if training.is_empty() {
            return Err(KnnError::EmptyTrainingSet);
        }
        if k < 1 || k > training.len() {
            return Err(KnnError::KOutOfRange { k, max: training.len() });
        }
        let len = training[0].0.len();
        for (v, _) in &training {
            if v.len() != len {
                return Err(KnnError::LengthMismatch { left: len, right: v.len() });
            }
            if let FeatureVector::Real(values) = v {
                if values.iter().any(|x| !x.is_finite()) {
                    return Err(KnnError::NonFiniteValue);
                }
            }
        }
        Ok(KnnModel { training, metric, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn training_len(&self) -> usize {
        self.training.len()
    }

    /// Predict the label of `x`.
    pub fn predict(&self, x: &FeatureVector) -> Result<u32, KnnError> {
        self.predict_counted(x).map(|(label, _)| label)
    }

    /// Predict and report the number of distance evaluations performed
    /// (always exactly N, one per training point).
    pub fn predict_counted(&self, x: &FeatureVector) -> Result<(u32, usize), KnnError> {
        let mut scored: Vec<(f64, usize, u32)> = Vec::with_capacity(self.training.len());
        let mut evaluations = 0usize;
        for (index, (v, label)) in self.training.iter().enumerate() {
            let d = distance(self.metric, v, x)?;
            evaluations += 1;
            scored.push((d, index, *label));
        }
        // Distance ties at the k-th position resolve by training order.
        scored.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut votes: BTreeMap<u32, usize> = BTreeMap::new();
        for &(_, _, label) in scored.iter().take(self.k) {
            *votes.entry(label).or_default() += 1;
        }
        // Ascending label order plus strict comparison = lowest label wins ties.
        let mut best = (0u32, 0usize);
        for (&label, &count) in &votes {
            if count > best.1 {
                best = (label, count);
            }
        }
        Ok((best.0, evaluations))
    }
}

/// The √N heuristic for k, rounded and bumped to the next odd value to cut
/// down two-class voting ties.
pub fn suggest_k(training_size: usize) -> usize {
    let k = ((training_size as f64).sqrt().round() as usize).max(1);
    if k % 2 == 0 {
        k + 1
    } else {
        k
    }
}

/// Accuracy of a k-NN model on `validation` for every k in the range.
pub fn k_sweep(
    training: &[(FeatureVector, u32)],
    validation: &[(FeatureVector, u32)],
    k_range: RangeInclusive<usize>,
    metric: Metric,
) -> Result<Vec<(usize, f64)>, KnnError> {
    if validation.is_empty() {
        return Err(KnnError::EmptyTrainingSet);
    }
    let mut results = Vec::new();
    for k in k_range {
        let model = KnnModel::new(training.to_vec(), metric, k)?;
        let correct = validation
            .iter()
            .map(|(v, label)| Ok(usize::from(model.predict(v)? == *label)))
            .sum::<Result<usize, KnnError>>()?;
        results.push((k, correct as f64 / validation.len() as f64));
    }
    Ok(results)
}
