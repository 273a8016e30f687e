//! Top-m ranking, forward add-in and backward elimination over the Frobenius
//! utility of class-pair distance matrices.

use std::cmp::Ordering;
use std::fmt;

use crate::data::{FeatureSubset, LabeledDataset};
use crate::error::{Error, Result};
use crate::exec::{par_map, Execution};
use crate::ipm::{distance_matrix, utility, EstimatorChoice};

/// Slack allowed before a decreasing forward trace is flagged.
pub const TRACE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Rank single features by their own utility and keep the top `m`.
    Twd,
    /// Greedy forward add-in.
    Fawd,
    /// Greedy backward elimination.
    Bewd,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Twd => "twd",
            Method::Fawd => "fawd",
            Method::Bewd => "bewd",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    /// Number of features to select.
    pub m: usize,
    /// Features added (forward) or removed (backward) per step.
    pub group_size: usize,
    pub estimator: EstimatorChoice,
    /// Reserved for randomized tie-breaking; ties are currently broken by
    /// feature index and the seed is not consumed.
    pub seed: u64,
    pub execution: Execution,
}

impl SelectionConfig {
    pub fn new(m: usize, estimator: EstimatorChoice) -> Self {
        Self {
            m,
            group_size: 1,
            estimator,
            seed: 0,
            execution: Execution::default(),
        }
    }

    pub fn with_group_size(mut self, group_size: usize) -> Self {
        self.group_size = group_size;
        self
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.m > d {
            return Err(Error::TooManyFeatures { m: self.m, d });
        }
        if self.m == 0 {
            return Err(Error::InvalidSelectionConfig("m must be at least 1".into()));
        }
        if self.group_size == 0 {
            return Err(Error::InvalidSelectionConfig(
                "group size must be at least 1".into(),
            ));
        }
        self.estimator.validate()
    }
}

/// One add or remove step of a sequential search.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    /// Features added (forward) or eliminated (backward), best-ranked first.
    pub features: Vec<usize>,
    /// Utility of the working set after the step.
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub method: Method,
    /// TWD and FAWD: selection order. BEWD: survivors, the one whose removal
    /// would hurt most first.
    pub selected: Vec<usize>,
    /// TWD: utility of each selected feature, parallel to `selected`.
    /// FAWD and BEWD: utility after each step, parallel to `steps`.
    pub scores: Vec<f64>,
    pub steps: Vec<Step>,
    /// BEWD only: features in the order they were eliminated.
    pub eliminated: Vec<usize>,
    /// Non-fatal observations, such as a forward trace that decreased.
    pub warnings: Vec<String>,
    pub config: SelectionConfig,
}

impl SelectionResult {
    pub fn subset(&self) -> FeatureSubset {
        FeatureSubset::from_distinct(self.selected.clone())
    }
}

/// Runs the chosen method.
pub fn select(ds: &LabeledDataset, method: Method, cfg: &SelectionConfig) -> Result<SelectionResult> {
    match method {
        Method::Twd => twd(ds, cfg),
        Method::Fawd => fawd(ds, cfg),
        Method::Bewd => bewd(ds, cfg),
    }
}

fn evaluate(ds: &LabeledDataset, features: Vec<usize>, est: &EstimatorChoice) -> Result<f64> {
    let subset = FeatureSubset::new(features, ds.n_features())?;
    Ok(utility(&distance_matrix(ds, &subset, est)?))
}

/// Evaluates `subset_for(f)` for every candidate, in candidate order.
fn score_candidates<S>(
    ds: &LabeledDataset,
    candidates: &[usize],
    cfg: &SelectionConfig,
    subset_for: S,
) -> Result<Vec<f64>>
where
    S: Fn(usize) -> Vec<usize> + Sync + Send,
{
    par_map(cfg.execution, candidates, |&f| {
        evaluate(ds, subset_for(f), &cfg.estimator).map_err(|e| Error::Candidate {
            feature: f,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect()
}

/// Higher score first; ties by lower feature index.
fn rank_desc_low_index(scored: &mut [(usize, f64)]) {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Per-feature utility, sorted descending; ties keep the lower index.
pub fn twd(ds: &LabeledDataset, cfg: &SelectionConfig) -> Result<SelectionResult> {
    let d = ds.n_features();
    cfg.validate(d)?;
    let features: Vec<usize> = (0..d).collect();
    let scores = score_candidates(ds, &features, cfg, |f| vec![f])?;
    let mut ranked: Vec<(usize, f64)> = features.into_iter().zip(scores).collect();
    rank_desc_low_index(&mut ranked);
    ranked.truncate(cfg.m);
    let (selected, scores) = ranked.into_iter().unzip();
    Ok(SelectionResult {
        method: Method::Twd,
        selected,
        scores,
        steps: Vec::new(),
        eliminated: Vec::new(),
        warnings: Vec::new(),
        config: *cfg,
    })
}

/// Greedy forward add-in.
///
/// Each step scores `selected + {f}` for every unselected `f` and adds the
/// best `group_size` of them (fewer on the last step so exactly `m` are
/// selected). Ties go to the lower index.
pub fn fawd(ds: &LabeledDataset, cfg: &SelectionConfig) -> Result<SelectionResult> {
    let d = ds.n_features();
    cfg.validate(d)?;
    let mut selected: Vec<usize> = Vec::with_capacity(cfg.m);
    let mut remaining: Vec<usize> = (0..d).collect();
    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    while selected.len() < cfg.m {
        let take = cfg.group_size.min(cfg.m - selected.len());
        let scores = score_candidates(ds, &remaining, cfg, |f| {
            let mut s = selected.clone();
            s.push(f);
            s
        })?;
        let mut ranked: Vec<(usize, f64)> = remaining.iter().copied().zip(scores).collect();
        rank_desc_low_index(&mut ranked);
        let chosen: Vec<usize> = ranked[..take].iter().map(|&(f, _)| f).collect();
        selected.extend(&chosen);
        remaining.retain(|f| !chosen.contains(f));
        let step_utility = if take == 1 {
            ranked[0].1
        } else {
            evaluate(ds, selected.clone(), &cfg.estimator)?
        };
        if let Some(prev) = steps.last().map(|s: &Step| s.utility) {
            if step_utility < prev - TRACE_SLACK {
                warnings.push(format!(
                    "utility decreased from {prev} to {step_utility} at step {}",
                    steps.len()
                ));
            }
        }
        steps.push(Step {
            features: chosen,
            utility: step_utility,
        });
    }
    Ok(SelectionResult {
        method: Method::Fawd,
        selected,
        scores: steps.iter().map(|s| s.utility).collect(),
        steps,
        eliminated: Vec::new(),
        warnings,
        config: *cfg,
    })
}

/// Greedy backward elimination.
///
/// Each step scores `remaining - {f}` for every remaining `f` and eliminates
/// the `group_size` features whose removal leaves the highest utility (ties
/// eliminate the higher index), stopping once `m` remain.
pub fn bewd(ds: &LabeledDataset, cfg: &SelectionConfig) -> Result<SelectionResult> {
    let d = ds.n_features();
    cfg.validate(d)?;
    let mut remaining: Vec<usize> = (0..d).collect();
    let mut eliminated = Vec::with_capacity(d - cfg.m);
    let mut steps = Vec::new();
    let without = |set: &[usize], f: usize| -> Vec<usize> {
        set.iter().copied().filter(|&x| x != f).collect()
    };
    while remaining.len() > cfg.m {
        let take = cfg.group_size.min(remaining.len() - cfg.m);
        let scores = score_candidates(ds, &remaining, cfg, |f| without(&remaining, f))?;
        let mut ranked: Vec<(usize, f64)> = remaining.iter().copied().zip(scores).collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(b.0.cmp(&a.0)));
        let dropped: Vec<usize> = ranked[..take].iter().map(|&(f, _)| f).collect();
        remaining.retain(|f| !dropped.contains(f));
        eliminated.extend(&dropped);
        let step_utility = if take == 1 {
            ranked[0].1
        } else {
            evaluate(ds, remaining.clone(), &cfg.estimator)?
        };
        steps.push(Step {
            features: dropped,
            utility: step_utility,
        });
    }

    // Survivors: the one whose removal would leave the lowest utility first,
    // the reverse of the elimination rule.
    let selected = if remaining.len() > 1 {
        let scores = score_candidates(ds, &remaining, cfg, |f| without(&remaining, f))?;
        let mut ranked: Vec<(usize, f64)> = remaining.iter().copied().zip(scores).collect();
        ranked.sort_by(|a, b| match a.1.total_cmp(&b.1) {
            Ordering::Equal => a.0.cmp(&b.0),
            o => o,
        });
        ranked.into_iter().map(|(f, _)| f).collect()
    } else {
        remaining
    };
    Ok(SelectionResult {
        method: Method::Bewd,
        selected,
        scores: steps.iter().map(|s| s.utility).collect(),
        steps,
        eliminated,
        warnings: Vec::new(),
        config: *cfg,
    })
}
