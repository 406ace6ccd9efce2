//! Machine-readable reports and their text/CSV renderings.
//!
//! All timing lives in fields named `elapsed_ms`/`total_elapsed_ms`; with
//! those removed, identical runs must produce byte-identical JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qknn_core::data::CleaningReport;

use crate::args::Format;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Render as a human table or CSV; JSON comes from serde.
pub trait Render: Serialize {
    fn render_text(&self) -> String;
    fn render_csv(&self) -> String;
}

/// Write a report to `out` (or stdout) in the requested format.
pub fn emit_report<R: Render>(
    report: &R,
    format: Format,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let payload = match format {
        Format::Text => report.render_text(),
        Format::Csv => report.render_csv(),
        Format::Json => serde_json::to_string_pretty(report)
            .map_err(|err| CliError::Internal(format!("report serialization: {err}")))?,
    };
    match out {
        Some(path) => std::fs::write(path, payload.as_bytes())
            .map_err(|err| CliError::Data(format!("cannot write {}: {err}", path.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SwapTestReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub x: String,
    pub y: String,
    pub seed: u64,
    pub p0_exact: f64,
    pub fidelity_exact: f64,
    pub distance_exact: f64,
    pub sampled: Option<SampledSwapBlock>,
    pub total_elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampledSwapBlock {
    pub shots: u64,
    pub p0_estimate: f64,
    pub fidelity_estimate: f64,
    pub fidelity_clamped: bool,
    pub distance_estimate: f64,
}

impl Render for SwapTestReport {
    fn render_text(&self) -> String {
        let mut text = String::new();
        let _ = writeln!(text, "swap test  x = {:<12} y = {}", self.x, self.y);
        let _ = writeln!(text, "  P(ancilla = 0)          {:.10}", self.p0_exact);
        let _ = writeln!(text, "  fidelity |<x|y>|        {:.10}", self.fidelity_exact);
        let _ = writeln!(text, "  quantum distance        {:.10}", self.distance_exact);
        if let Some(sampled) = &self.sampled {
            let _ = writeln!(text, "  sampled ({} shots):", sampled.shots);
            let _ = writeln!(text, "    P(ancilla = 0)        {:.6}", sampled.p0_estimate);
            let _ = writeln!(
                text,
                "    fidelity              {:.6}{}",
                sampled.fidelity_estimate,
                if sampled.fidelity_clamped { "  (clamped)" } else { "" }
            );
            let _ = writeln!(text, "    quantum distance      {:.6}", sampled.distance_estimate);
        }
        text
    }

    fn render_csv(&self) -> String {
        let mut csv = String::from("metric,value\n");
        let _ = writeln!(csv, "p0_exact,{}", self.p0_exact);
        let _ = writeln!(csv, "fidelity_exact,{}", self.fidelity_exact);
        let _ = writeln!(csv, "distance_exact,{}", self.distance_exact);
        if let Some(sampled) = &self.sampled {
            let _ = writeln!(csv, "shots,{}", sampled.shots);
            let _ = writeln!(csv, "p0_estimate,{}", sampled.p0_estimate);
            let _ = writeln!(csv, "fidelity_estimate,{}", sampled.fidelity_estimate);
            let _ = writeln!(csv, "distance_estimate,{}", sampled.distance_estimate);
        }
        csv
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroverReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub n: usize,
    pub marked: u64,
    pub iterations: usize,
    pub seed: u64,
    pub marked_probability: f64,
    pub sampled_outcome: u64,
    pub distribution: Vec<OutcomeProbability>,
    pub total_elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeProbability {
    pub outcome: u64,
    pub bits: String,
    pub probability: f64,
}

impl Render for GroverReport {
    fn render_text(&self) -> String {
        let mut text = String::new();
        let _ = writeln!(
            text,
            "grover search  n = {}  marked = {} ({})  iterations = {}",
            self.n,
            self.marked,
            bitstring(self.marked, self.n),
            self.iterations
        );
        let _ = writeln!(text, "  outcome   bits{}   probability", " ".repeat(self.n.max(4) - 4));
        for entry in &self.distribution {
            let marker = if entry.outcome == self.marked { "  <- marked" } else { "" };
            let _ = writeln!(
                text,
                "  {:>7}   {}   {:.10}{marker}",
                entry.outcome, entry.bits, entry.probability
            );
        }
        let _ = writeln!(
            text,
            "  sampled outcome: {} ({})",
            self.sampled_outcome,
            bitstring(self.sampled_outcome, self.n)
        );
        text
    }

    fn render_csv(&self) -> String {
        let mut csv = String::from("outcome,bits,probability\n");
        for entry in &self.distribution {
            let _ = writeln!(csv, "{},{},{}", entry.outcome, entry.bits, entry.probability);
        }
        csv
    }
}

/// Qubit 0 printed rightmost, as in ket notation.
pub fn bitstring(value: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|q| if value >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub data_path: String,
    pub base_seed: u64,
    pub train_fraction: f64,
    pub repetitions: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_for_auto: Option<usize>,
    pub shots: String,
    pub backend: String,
}

/// One algorithm evaluated on one seed's test partition.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunRecord {
    pub seed: u64,
    pub algorithm: String,
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_acceptance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub effective_t_histogram: Option<BTreeMap<usize, usize>>,
    pub split_hash: String,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AlgorithmSummary {
    pub algorithm: String,
    pub mean_accuracy: f64,
    pub stddev_accuracy: f64,
    pub per_seed: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub algorithms: Vec<AlgorithmSummary>,
    /// Per-seed QKNN − KNN accuracy differences (compare only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paired_differences: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_paired_difference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_sweep: Option<Vec<KSweepPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_k: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KSweepPoint {
    pub k: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub cleaning: CleaningReport,
    pub runs: Vec<RunRecord>,
    pub summary: Summary,
    pub total_elapsed_ms: u64,
}

impl Render for ExperimentReport {
    fn render_text(&self) -> String {
        let mut text = String::new();
        let _ = writeln!(
            text,
            "{}  data = {}  split = {:.2}  seeds = {}..{}",
            self.command,
            self.config.data_path,
            self.config.train_fraction,
            self.config.base_seed,
            self.config.base_seed + u64::from(self.config.repetitions) - 1,
        );
        let _ = writeln!(
            text,
            "cleaning: {} read, {} kept, {} dropped",
            self.cleaning.rows_read,
            self.cleaning.rows_kept,
            self.cleaning.dropped()
        );
        let _ = writeln!(text);
        let _ = writeln!(text, "{:<10} {:>6} {:>10} {:>9} {:>7}", "algorithm", "seed", "accuracy", "correct", "total");
        for run in &self.runs {
            let _ = writeln!(
                text,
                "{:<10} {:>6} {:>10.4} {:>9} {:>7}",
                run.algorithm, run.seed, run.accuracy, run.correct, run.total
            );
        }
        let _ = writeln!(text);
        let _ = writeln!(text, "{:<10} {:>14} {:>10}", "algorithm", "mean accuracy", "stddev");
        for algo in &self.summary.algorithms {
            let _ = writeln!(
                text,
                "{:<10} {:>14.4} {:>10.4}",
                algo.algorithm, algo.mean_accuracy, algo.stddev_accuracy
            );
        }
        if let Some(mean_diff) = self.summary.mean_paired_difference {
            let _ = writeln!(text, "mean paired difference (qknn - knn): {mean_diff:+.4}");
        }
        if let Some(sweep) = &self.summary.k_sweep {
            let _ = writeln!(text);
            let _ = writeln!(text, "k sweep:");
            for point in sweep {
                let _ = writeln!(text, "  k = {:>3}  accuracy = {:.4}", point.k, point.accuracy);
            }
            if let Some(best) = self.summary.best_k {
                let _ = writeln!(text, "  best k = {best}");
            }
        }
        text
    }

    fn render_csv(&self) -> String {
        let mut csv = String::from(
            "seed,algorithm,accuracy,correct,total,k,mean_acceptance,split_hash,elapsed_ms\n",
        );
        for run in &self.runs {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{}",
                run.seed,
                run.algorithm,
                run.accuracy,
                run.correct,
                run.total,
                run.k.map_or(String::new(), |k| k.to_string()),
                run.mean_acceptance.map_or(String::new(), |a| a.to_string()),
                run.split_hash,
                run.elapsed_ms
            );
        }
        csv
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn stddev(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}
