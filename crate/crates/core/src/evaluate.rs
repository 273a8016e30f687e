//! Downstream evaluation: stratified splits, a 1-nearest-neighbour
//! classifier, and the relative standard deviation of accuracies.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{FeatureSubset, LabeledDataset};
use crate::error::{Error, Result};

/// Stratified train/test split.
///
/// Each class contributes `round(n_c * test_frac)` rows to the test side,
/// clamped so that both sides keep at least one row of every class.
pub fn train_test_split(
    ds: &LabeledDataset,
    test_frac: f64,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset)> {
    if !(test_frac > 0.0 && test_frac < 1.0) {
        return Err(Error::InvalidSplit(format!(
            "test fraction must be in (0, 1), got {test_frac}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..ds.n_classes() {
        let mut rows = ds.class_rows(class)?.to_vec();
        if rows.len() < 2 {
            return Err(Error::InvalidSplit(format!(
                "class {:?} has {} row(s); need 2 to appear on both sides",
                ds.class_names()[class],
                rows.len()
            )));
        }
        rows.shuffle(&mut rng);
        let n_test = ((rows.len() as f64 * test_frac).round() as usize).clamp(1, rows.len() - 1);
        test.extend_from_slice(&rows[..n_test]);
        train.extend_from_slice(&rows[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((ds.select_rows(&train)?, ds.select_rows(&test)?))
}

/// Accuracy of a 1-NN classifier trained on `train`, restricted to `subset`.
/// Distance ties go to the lowest training row.
pub fn evaluate_subset(
    train: &LabeledDataset,
    test: &LabeledDataset,
    subset: &FeatureSubset,
) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if train.n_features() != test.n_features() {
        return Err(Error::DimensionMismatch(format!(
            "train has {} features, test has {}",
            train.n_features(),
            test.n_features()
        )));
    }
    if train.class_names() != test.class_names() {
        return Err(Error::DimensionMismatch(
            "train and test have different label universes".into(),
        ));
    }
    subset.check_against(train.n_features())?;
    let cols = subset.indices();
    let (tx, sx) = (train.values(), test.values());
    let mut correct = 0usize;
    for (t, &truth) in test.labels().iter().enumerate() {
        let mut best = f64::INFINITY;
        let mut best_label = usize::MAX;
        for (r, &label) in train.labels().iter().enumerate() {
            let dist: f64 = cols
                .iter()
                .map(|&c| {
                    let diff = sx[[t, c]] - tx[[r, c]];
                    diff * diff
                })
                .sum();
            if dist < best {
                best = dist;
                best_label = label;
            }
        }
        if best_label == truth {
            correct += 1;
        }
    }
    Ok(correct as f64 / test.n_samples() as f64)
}

/// Sample standard deviation (n - 1) divided by the mean.
pub fn rsd(accuracies: &[f64]) -> Result<f64> {
    let n = accuracies.len();
    if n < 2 {
        return Err(Error::TooFewValues(n));
    }
    let mean = accuracies.iter().sum::<f64>() / n as f64;
    if mean == 0.0 {
        return Err(Error::ZeroMean);
    }
    let var = accuracies.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(var.sqrt() / mean)
}
