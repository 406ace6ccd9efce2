//! Command-line surface.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qknn_core::sim::{Backend, QuantumState};

#[derive(Parser, Debug)]
#[command(
    name = "qknn-lab",
    version,
    about = "Quantum KNN laboratory: swap-test and Grover demos, plus KNN/QKNN benchmarks on WDBC-format data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the C-SWAP fidelity test on two single- or multi-qubit states.
    SwapTest(SwapTestArgs),
    /// Run Grover search for a marked basis state.
    Grover(GroverArgs),
    /// Classical KNN on a WDBC-format CSV.
    Knn(KnnArgs),
    /// Quantum KNN (Hamming distance, post-selected) on a WDBC-format CSV.
    Qknn(QknnArgs),
    /// KNN and QKNN side by side on identical splits across seeds.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct SeedArg {
    /// Base RNG seed; QKNN_LAB_SEED is the fallback when the flag is absent.
    #[arg(long, env = "QKNN_LAB_SEED", default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct DataArgs {
    /// WDBC-format CSV (id, M/B diagnosis, 30 features).
    #[arg(long)]
    pub data: PathBuf,
    /// Train fraction of the stratified split.
    #[arg(long, default_value_t = 0.65)]
    pub split: f64,
}

#[derive(Args, Debug)]
pub struct SwapTestArgs {
    /// First state: 0, 1, +, -, or a comma-separated amplitude list.
    #[arg(long)]
    pub x: StateSpec,
    /// Second state, same syntax.
    #[arg(long)]
    pub y: StateSpec,
    /// "exact" or a shot count for sampled estimation.
    #[arg(long, default_value = "exact")]
    pub shots: ShotsSpec,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct GroverArgs {
    /// Register width in qubits.
    #[arg(long)]
    pub n: usize,
    /// Marked basis state as an integer below 2^n.
    #[arg(long)]
    pub marked: u64,
    /// Oracle+diffusion rounds; defaults to the floor(pi/4*sqrt(2^n)) rule.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct KnnArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Neighbor count; defaults to the odd sqrt(N) heuristic.
    #[arg(long)]
    pub k: Option<usize>,
    /// Sweep accuracies for every k in this inclusive range, e.g. 1..25.
    #[arg(long)]
    pub k_range: Option<KRange>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct QknnArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Hamming threshold: "auto" or an integer in [1, n+1].
    #[arg(long, default_value = "auto")]
    pub threshold: ThresholdSpec,
    /// Neighbor count targeted by the auto threshold.
    #[arg(long, default_value_t = 13)]
    pub k_for_auto: usize,
    /// "exact" or a shot count per test point.
    #[arg(long, default_value = "exact")]
    pub shots: ShotsSpec,
    #[arg(long, value_enum, default_value_t = BackendChoice::Sparse)]
    pub backend: BackendChoice,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// KNN neighbor count; also the auto-threshold target unless overridden.
    #[arg(long, default_value_t = 13)]
    pub k: usize,
    /// Auto-threshold neighbor target for the QKNN side.
    #[arg(long)]
    pub k_for_auto: Option<usize>,
    /// "exact" or a shot count per test point for the QKNN side.
    #[arg(long, default_value = "exact")]
    pub shots: ShotsSpec,
    #[arg(long, value_enum, default_value_t = BackendChoice::Sparse)]
    pub backend: BackendChoice,
    /// Number of seeds: runs use seed, seed+1, ….
    #[arg(long, default_value_t = 10)]
    pub reps: u32,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendChoice {
    Sparse,
    Dense,
}

impl From<BackendChoice> for Backend {
    fn from(choice: BackendChoice) -> Backend {
        match choice {
            BackendChoice::Sparse => Backend::Sparse,
            BackendChoice::Dense => Backend::Dense,
        }
    }
}

/// "exact" or a positive shot count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShotsSpec {
    Exact,
    Count(u64),
}

impl FromStr for ShotsSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("exact") {
            return Ok(ShotsSpec::Exact);
        }
        match s.parse::<u64>() {
            Ok(0) => Err("shot count must be at least 1".into()),
            Ok(count) => Ok(ShotsSpec::Count(count)),
            Err(_) => Err(format!("expected \"exact\" or a positive integer, got {s:?}")),
        }
    }
}

impl std::fmt::Display for ShotsSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShotsSpec::Exact => write!(f, "exact"),
            ShotsSpec::Count(count) => write!(f, "{count}"),
        }
    }
}

/// "auto" or a fixed threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdSpec {
    Auto,
    Fixed(usize),
}

impl FromStr for ThresholdSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ThresholdSpec::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => {
                Err(format!("expected \"auto\" or a positive integer, got {s:?}"))
            }
            Ok(t) => Ok(ThresholdSpec::Fixed(t)),
        }
    }
}

impl std::fmt::Display for ThresholdSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdSpec::Auto => write!(f, "auto"),
            ThresholdSpec::Fixed(t) => write!(f, "{t}"),
        }
    }
}

/// Inclusive integer range written as A..B.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (start, end) = s
            .split_once("..")
            .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
        let start: usize = start.trim().parse().map_err(|_| format!("bad range start {start:?}"))?;
        let end: usize = end.trim().parse().map_err(|_| format!("bad range end {end:?}"))?;
        if start < 1 || end < start {
            return Err(format!("range must satisfy 1 <= A <= B, got {s:?}"));
        }
        Ok(KRange { start, end })
    }
}

impl std::fmt::Display for KRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

/// A pure-state literal: 0, 1, +, -, or a comma-separated real amplitude
/// list whose length is a power of two (normalized on construction).
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpec {
    pub source: String,
    amplitudes: Vec<f64>,
}

impl StateSpec {
    pub fn to_state(&self, backend: Backend) -> Result<QuantumState, String> {
        let n = self.amplitudes.len().trailing_zeros() as usize;
        let entries: Vec<(u64, Complex64)> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, &a)| (k as u64, Complex64::new(a, 0.0)))
            .collect();
        QuantumState::from_amplitudes(n, &entries, backend)
            .map_err(|err| format!("invalid state {:?}: {err}", self.source))
    }
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let amplitudes = match s.trim() {
            "0" => vec![1.0, 0.0],
            "1" => vec![0.0, 1.0],
            "+" => vec![1.0, 1.0],
            "-" => vec![1.0, -1.0],
            other => {
                let values: Result<Vec<f64>, _> =
                    other.split(',').map(|field| field.trim().parse::<f64>()).collect();
                let values = values.map_err(|_| {
                    format!("expected 0, 1, +, -, or comma-separated amplitudes, got {s:?}")
                })?;
                if values.len() < 2 || !values.len().is_power_of_two() {
                    return Err(format!(
                        "amplitude list length must be a power of two >= 2, got {}",
                        values.len()
                    ));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err("amplitudes must be finite".into());
                }
                if values.iter().all(|&v| v == 0.0) {
                    return Err("amplitudes must not all be zero".into());
                }
                values
            }
        };
        Ok(StateSpec { source: s.to_string(), amplitudes })
    }
}
