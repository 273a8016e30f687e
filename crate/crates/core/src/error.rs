use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the selection toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset has {0} class(es); at least 2 are required")]
    TooFewClasses(usize),

    #[error("class {class} ({name:?}) has no samples")]
    EmptyClass { class: usize, name: String },

    #[error("labels length {labels} does not match sample count {samples}")]
    LabelCountMismatch { labels: usize, samples: usize },

    #[error("label index {label} at row {row} is out of range for {classes} classes")]
    LabelOutOfRange { row: usize, label: usize, classes: usize },

    #[error("non-finite value at row {row}, feature {feature}")]
    NonFinite { row: usize, feature: usize },

    #[error("feature names length {names} does not match feature count {features}")]
    FeatureNameCountMismatch { names: usize, features: usize },

    #[error("class index {index} out of range (dataset has {classes} classes)")]
    InvalidClass { index: usize, classes: usize },

    #[error("feature index {index} out of range (dataset has {features} features)")]
    InvalidFeature { index: usize, features: usize },

    #[error("feature index {0} appears more than once in the subset")]
    DuplicateFeature(usize),

    #[error("feature subset is empty")]
    EmptySubset,

    #[error("invalid empirical measure: {0}")]
    InvalidMeasure(String),

    #[error("{0}; use w1_general for weighted or unequal-size measures")]
    NotUniformEqualSize(String),

    #[error("Wasserstein order must be >= 1, got {0}")]
    InvalidOrder(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid transport problem: {0}")]
    InvalidTransportProblem(String),

    #[error("invalid Sinkhorn configuration: {0}")]
    InvalidSinkhornConfig(String),

    #[error(
        "Sinkhorn potentials became NaN after {iterations} iterations; \
         epsilon = {epsilon:e} is likely too small for the cost scale"
    )]
    SinkhornNan { epsilon: f64, iterations: usize },

    #[error("kernel bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("estimator {estimator} cannot evaluate a subset of {size} features")]
    EstimatorMismatch { estimator: &'static str, size: usize },

    #[error("requested {m} features but the dataset has {d}")]
    TooManyFeatures { m: usize, d: usize },

    #[error("invalid selection configuration: {0}")]
    InvalidSelectionConfig(String),

    #[error("evaluating candidate feature {feature} failed: {source}")]
    Candidate {
        feature: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV parse error: {0}")]
    Csv(#[from] csv::Error),

    #[error("data row {row} (line {line}), column {column}: cannot parse {value:?} as a finite number")]
    UnparseableCell {
        row: usize,
        line: u64,
        column: usize,
        value: String,
    },

    #[error("data row {row} (line {line}): label cell is empty")]
    EmptyLabel { row: usize, line: u64 },

    #[error("data row {row} (line {line}) has {found} fields, expected {expected}")]
    RaggedRow {
        row: usize,
        line: u64,
        found: usize,
        expected: usize,
    },

    #[error("label column {0} not found")]
    LabelColumnNotFound(String),

    #[error("input contains no data rows")]
    NoRows,

    #[error("input has no feature columns besides the label")]
    NoFeatures,

    #[error("invalid synthetic spec: {0}")]
    InvalidSyntheticSpec(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("relative standard deviation needs at least 2 values, got {0}")]
    TooFewValues(usize),

    #[error("mean accuracy is zero; relative standard deviation is undefined")]
    ZeroMean,
}

pub type Result<T> = std::result::Result<T, Error>;
