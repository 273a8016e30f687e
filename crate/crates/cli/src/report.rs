//! JSON run report and the human-readable summary.

use std::fmt::Write as _;
use std::time::Duration;

use ipm_fs::{Epsilon, EstimatorChoice, LabeledDataset, SelectionResult};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub struct Evaluation {
    pub accuracy: f64,
    pub test_frac: f64,
    pub split_seed: u64,
    pub train_rows: usize,
    pub test_rows: usize,
}

pub struct RunReport<'a> {
    pub source: &'a str,
    pub bytes: &'a [u8],
    pub dataset: &'a LabeledDataset,
    pub result: &'a SelectionResult,
    pub standardized: bool,
    pub wall_time: Duration,
    pub evaluation: Option<Evaluation>,
}

fn estimator_json(est: &EstimatorChoice) -> Value {
    match est {
        EstimatorChoice::Exact1d => json!({ "name": est.name() }),
        EstimatorChoice::Sinkhorn(cfg) => {
            let (mode, value) = match cfg.epsilon {
                Epsilon::Absolute(e) => ("absolute", e),
                Epsilon::RelativeToMeanCost(e) => ("relative_to_mean_cost", e),
            };
            json!({
                "name": est.name(),
                "epsilon": { "mode": mode, "value": value },
                "tol": cfg.tol,
                "max_iters": cfg.max_iters,
            })
        }
        EstimatorChoice::MmdGaussian { bandwidth } => json!({
            "name": est.name(),
            "bandwidth": bandwidth.map_or(json!("median"), |b| json!(b)),
        }),
    }
}

impl RunReport<'_> {
    fn names(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.dataset.feature_name(i)).collect()
    }

    /// Object keys come out sorted, so equal runs serialize identically
    /// apart from `wall_time_seconds`.
    pub fn to_json(&self) -> Value {
        let r = self.result;
        let cfg = &r.config;
        let steps: Vec<Value> = r
            .steps
            .iter()
            .map(|s| json!({ "features": s.features, "names": self.names(&s.features), "utility": s.utility }))
            .collect();
        let mut report = json!({
            "tool": { "name": "ipm-fs", "version": env!("CARGO_PKG_VERSION") },
            "dataset": {
                "source": self.source,
                "rows": self.dataset.n_samples(),
                "features": self.dataset.n_features(),
                "classes": self.dataset.class_names(),
                "sha256": format!("{:x}", Sha256::digest(self.bytes)),
            },
            "config": {
                "method": r.method.as_str(),
                "m": cfg.m,
                "group_size": cfg.group_size,
                "estimator": estimator_json(&cfg.estimator),
                "standardize": self.standardized,
                "seed": cfg.seed,
            },
            "selected": r.selected,
            "selected_names": self.names(&r.selected),
            "scores": r.scores,
            "steps": steps,
            "eliminated": r.eliminated,
            "warnings": r.warnings,
            "wall_time_seconds": self.wall_time.as_secs_f64(),
        });
        if let Some(ev) = &self.evaluation {
            report["evaluation"] = json!({
                "classifier": "1nn",
                "accuracy": ev.accuracy,
                "test_frac": ev.test_frac,
                "split_seed": ev.split_seed,
                "train_rows": ev.train_rows,
                "test_rows": ev.test_rows,
            });
        }
        report
    }

    pub fn summary(&self) -> String {
        let r = self.result;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} ({}) on {} rows x {} features, {} classes, {:.3}s",
            r.method,
            r.config.estimator.name(),
            self.dataset.n_samples(),
            self.dataset.n_features(),
            self.dataset.n_classes(),
            self.wall_time.as_secs_f64()
        );
        for (rank, &f) in r.selected.iter().enumerate() {
            let _ = write!(s, "  {:>3}. {}", rank + 1, self.dataset.feature_name(f));
            if let Some(score) = r.scores.get(rank).filter(|_| r.method == ipm_fs::Method::Twd) {
                let _ = write!(s, "  {score:.6}");
            }
            s.push('\n');
        }
        if !r.steps.is_empty() {
            let trace: Vec<String> = r.scores.iter().map(|u| format!("{u:.6}")).collect();
            let _ = writeln!(s, "  utility trace: {}", trace.join(" -> "));
        }
        for w in &r.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
        if let Some(ev) = &self.evaluation {
            let _ = writeln!(
                s,
                "  1-NN accuracy {:.4} on {} held-out rows",
                ev.accuracy, ev.test_rows
            );
        }
        s
    }
}
