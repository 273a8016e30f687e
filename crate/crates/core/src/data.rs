//! Labeled datasets and the per-class views every criterion reads.

use std::collections::HashMap;

use ndarray::{Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// Dense `n_samples x d_features` matrix with contiguous class indices.
///
/// Immutable after construction. Class membership is indexed once so that
/// slicing by class is a gather over precomputed row lists.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    values: Array2<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    feature_names: Option<Vec<String>>,
    class_rows: Vec<Vec<usize>>,
}

impl LabeledDataset {
    /// Builds a dataset from already-mapped label indices.
    pub fn new(
        values: Array2<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let (n, d) = values.dim();
        if labels.len() != n {
            return Err(Error::LabelCountMismatch {
                labels: labels.len(),
                samples: n,
            });
        }
        let k = class_names.len();
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        if let Some(names) = &feature_names {
            if names.len() != d {
                return Err(Error::FeatureNameCountMismatch {
                    names: names.len(),
                    features: d,
                });
            }
        }
        for ((row, feature), v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFinite { row, feature });
            }
        }
        let mut class_rows = vec![Vec::new(); k];
        for (row, &label) in labels.iter().enumerate() {
            if label >= k {
                return Err(Error::LabelOutOfRange {
                    row,
                    label,
                    classes: k,
                });
            }
            class_rows[label].push(row);
        }
        if let Some(class) = class_rows.iter().position(Vec::is_empty) {
            return Err(Error::EmptyClass {
                class,
                name: class_names[class].clone(),
            });
        }
        Ok(Self {
            values,
            labels,
            class_names,
            feature_names,
            class_rows,
        })
    }

    /// Builds a dataset from raw label strings.
    ///
    /// Distinct labels are sorted to assign indices `0..K`: numerically when
    /// every label parses as a number, lexicographically otherwise.
    pub fn from_raw_labels<S: AsRef<str>>(
        values: Array2<f64>,
        raw_labels: &[S],
        feature_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let class_names = sorted_label_universe(raw_labels);
        let index: HashMap<&str, usize> = class_names
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let labels = raw_labels.iter().map(|l| index[l.as_ref()]).collect();
        Self::new(values, labels, class_names, feature_names)
    }

    pub fn n_samples(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.values.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    /// Name of feature `idx`, falling back to `f{idx}` when unnamed.
    pub fn feature_name(&self, idx: usize) -> String {
        match &self.feature_names {
            Some(names) => names[idx].clone(),
            None => format!("f{idx}"),
        }
    }

    /// Row indices belonging to `class_idx`, in original order.
    pub fn class_rows(&self, class_idx: usize) -> Result<&[usize]> {
        self.class_rows
            .get(class_idx)
            .map(Vec::as_slice)
            .ok_or(Error::InvalidClass {
                index: class_idx,
                classes: self.n_classes(),
            })
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.class_rows.iter().map(Vec::len).collect()
    }

    /// Samples of one class restricted to the columns of `subset`, rows in
    /// original order.
    pub fn class_slice(&self, class_idx: usize, subset: &FeatureSubset) -> Result<Array2<f64>> {
        subset.check_against(self.n_features())?;
        let rows = self.class_rows(class_idx)?;
        let mut out = Array2::zeros((rows.len(), subset.len()));
        for (r, &row) in rows.iter().enumerate() {
            for (c, &feature) in subset.indices().iter().enumerate() {
                out[[r, c]] = self.values[[row, feature]];
            }
        }
        Ok(out)
    }

    /// Uniform empirical measure of one feature within one class.
    pub fn feature_measure(&self, class_idx: usize, feature_idx: usize) -> Result<EmpiricalMeasure1D> {
        if feature_idx >= self.n_features() {
            return Err(Error::InvalidFeature {
                index: feature_idx,
                features: self.n_features(),
            });
        }
        let rows = self.class_rows(class_idx)?;
        let column = self.values.column(feature_idx);
        EmpiricalMeasure1D::uniform(rows.iter().map(|&r| column[r]).collect())
    }

    /// Copy of this dataset with the given rows, keeping the class universe.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let values = self.values.select(Axis(0), rows);
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Self::new(
            values,
            labels,
            self.class_names.clone(),
            self.feature_names.clone(),
        )
    }

    /// Copy of this dataset with the values replaced (same shape).
    pub fn with_values(&self, values: Array2<f64>) -> Result<Self> {
        if values.dim() != self.values.dim() {
            return Err(Error::DimensionMismatch(format!(
                "replacement values are {:?}, dataset is {:?}",
                values.dim(),
                self.values.dim()
            )));
        }
        Self::new(
            values,
            self.labels.clone(),
            self.class_names.clone(),
            self.feature_names.clone(),
        )
    }
}

fn sorted_label_universe<S: AsRef<str>>(raw: &[S]) -> Vec<String> {
    let mut names: Vec<String> = raw.iter().map(|s| s.as_ref().to_owned()).collect();
    names.sort();
    names.dedup();
    let numeric: Option<Vec<f64>> = names.iter().map(|s| s.trim().parse::<f64>().ok()).collect();
    if let Some(nums) = numeric {
        let mut paired: Vec<(f64, String)> = nums.into_iter().zip(names).collect();
        paired.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        names = paired.into_iter().map(|(_, s)| s).collect();
    }
    names
}

/// Ordered set of distinct feature indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureSubset {
    indices: Vec<usize>,
}

impl FeatureSubset {
    /// Validates distinctness and range against a dataset with `d` features.
    pub fn new(indices: Vec<usize>, d: usize) -> Result<Self> {
        let subset = Self { indices };
        subset.check_against(d)?;
        Ok(subset)
    }

    pub fn all(d: usize) -> Self {
        Self {
            indices: (0..d).collect(),
        }
    }

    pub(crate) fn from_distinct(indices: Vec<usize>) -> Self {
        debug_assert!({
            let mut s = indices.clone();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        });
        Self { indices }
    }

    pub fn single(feature: usize) -> Self {
        Self {
            indices: vec![feature],
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub(crate) fn check_against(&self, d: usize) -> Result<()> {
        let mut seen = vec![false; d];
        for &i in &self.indices {
            if i >= d {
                return Err(Error::InvalidFeature {
                    index: i,
                    features: d,
                });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateFeature(i));
            }
        }
        Ok(())
    }
}

/// Weighted point masses on the real line, sorted by location.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure1D {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure1D {
    /// Sorts `(value, weight)` pairs by value and validates the weights.
    ///
    /// Equal values are kept as separate atoms.
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidMeasure(format!("non-finite atom {v}")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidMeasure(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        let slack = 1e-12_f64.max(weights.len() as f64 * f64::EPSILON);
        if (total - 1.0).abs() > slack {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let mut pairs: Vec<(f64, f64)> = values.into_iter().zip(weights).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (values, weights) = pairs.into_iter().unzip();
        Ok(Self { values, weights })
    }

    /// Uniform weights `1/n` over the given values.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        let w = 1.0 / n as f64;
        Self::new(values, vec![w; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// True when every weight equals `1/n` to within 1e-12.
    pub fn is_uniform(&self) -> bool {
        let w = 1.0 / self.len() as f64;
        self.weights.iter().all(|x| (x - w).abs() <= 1e-12)
    }

    /// Applies `x -> scale * x + shift` to every atom.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        Self::new(
            self.values.iter().map(|x| scale * x + shift).collect(),
            self.weights.clone(),
        )
    }

    /// Merges atoms at identical locations, summing their weights.
    pub fn coalesced(&self) -> Self {
        let mut values: Vec<f64> = Vec::with_capacity(self.len());
        let mut weights: Vec<f64> = Vec::with_capacity(self.len());
        for (&x, &w) in self.values.iter().zip(&self.weights) {
            match values.last() {
                Some(&last) if last == x => *weights.last_mut().unwrap() += w,
                _ => {
                    values.push(x);
                    weights.push(w);
                }
            }
        }
        Self { values, weights }
    }
}

/// Per-feature affine map to zero mean and unit population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    means: Vec<f64>,
    scales: Vec<f64>,
    constant: Vec<bool>,
}

impl Standardizer {
    /// Fits over all samples, ignoring class membership.
    pub fn fit(ds: &LabeledDataset) -> Self {
        let n = ds.n_samples() as f64;
        let mut means = Vec::with_capacity(ds.n_features());
        let mut scales = Vec::with_capacity(ds.n_features());
        let mut constant = Vec::with_capacity(ds.n_features());
        for column in ds.values().columns() {
            let (mean, sd) = mean_and_population_sd(column, n);
            // Constant columns have sd at rounding level; they map to exact zeros.
            let is_constant = sd <= 1e-12 * mean.abs().max(1.0);
            means.push(mean);
            scales.push(if is_constant { 1.0 } else { sd });
            constant.push(is_constant);
        }
        Self {
            means,
            scales,
            constant,
        }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn transform(&self, ds: &LabeledDataset) -> Result<LabeledDataset> {
        if ds.n_features() != self.means.len() {
            return Err(Error::DimensionMismatch(format!(
                "standardizer fitted on {} features, dataset has {}",
                self.means.len(),
                ds.n_features()
            )));
        }
        let mut values = ds.values().clone();
        for (j, mut column) in values.columns_mut().into_iter().enumerate() {
            if self.constant[j] {
                column.fill(0.0);
            } else {
                column.mapv_inplace(|x| (x - self.means[j]) / self.scales[j]);
            }
        }
        ds.with_values(values)
    }
}

fn mean_and_population_sd(column: ArrayView1<f64>, n: f64) -> (f64, f64) {
    let mean = column.sum() / n;
    let var = column.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Global z-score of every feature (population standard deviation).
/// Constant features become all zeros.
pub fn standardize(ds: &LabeledDataset) -> Result<LabeledDataset> {
    Standardizer::fit(ds).transform(ds)
}
