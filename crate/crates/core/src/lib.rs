//! Feature selection for multi-class classification by maximizing
//! distances between class-conditional distributions.
//!
//! Each feature subset `T` is scored by the squared Frobenius norm of the
//! `K x K` matrix of distances between the empirical class-conditional
//! distributions of the samples restricted to `T`. The default distance is
//! the 1-Wasserstein distance: exact in one dimension ([`ot1d`]) and
//! approximated by entropic optimal transport for larger subsets
//! ([`sinkhorn`]). A Gaussian-kernel MMD is available as an alternative
//! criterion.
//!
//! Three search strategies are provided in [`selection`]: ranking single
//! features (TWD), greedy forward add-in (FAWD) and greedy backward
//! elimination (BEWD).
//!
//! With the default `parallel` feature, candidate evaluations run on the
//! rayon pool; results are identical to sequential execution.

pub mod csv_io;
pub mod data;
pub mod error;
pub mod evaluate;
pub mod exec;
pub mod ipm;
pub mod ot1d;
pub mod selection;
pub mod sinkhorn;
pub mod synthetic;

pub use data::{standardize, EmpiricalMeasure1D, FeatureSubset, LabeledDataset, Standardizer};
pub use error::{Error, Result};
pub use exec::Execution;
pub use ipm::{
    distance_matrix, feature_utility, mmd_gaussian, utility, ClassDistanceMatrix, EstimatorChoice,
};
pub use ot1d::{w1_equal_size, w1_general, wp_general};
pub use selection::{bewd, fawd, select, twd, Method, SelectionConfig, SelectionResult, Step};
pub use sinkhorn::{
    cost_matrix, sinkhorn, w1_sinkhorn, Epsilon, SinkhornConfig, SinkhornResult, TransportProblem,
};
