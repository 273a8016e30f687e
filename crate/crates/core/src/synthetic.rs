//! Seeded Gaussian class-mean-shift datasets.

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};

/// Recipe for a synthetic dataset.
///
/// Informative feature values for class `k` are drawn from `N(k * shift, 1)`.
/// Every other feature is `N(0, 1)` plus independent `N(0, noise_sigma^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub n_per_class: usize,
    pub n_classes: usize,
    pub n_features: usize,
    pub informative: Vec<usize>,
    /// Class-mean spacing in units of the unit noise.
    pub shift: f64,
    #[serde(default)]
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSyntheticSpec(msg));
        if self.n_classes < 2 {
            return bad(format!("n_classes = {} (need >= 2)", self.n_classes));
        }
        if self.n_per_class == 0 || self.n_features == 0 {
            return bad("n_per_class and n_features must be positive".into());
        }
        if let Some(&i) = self.informative.iter().find(|&&i| i >= self.n_features) {
            return bad(format!("informative index {i} >= n_features {}", self.n_features));
        }
        let mut sorted = self.informative.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return bad("informative indices repeat".into());
        }
        if !self.shift.is_finite() {
            return bad("shift must be finite".into());
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be finite and non-negative".into());
        }
        Ok(())
    }
}

/// Draws the dataset; rows are grouped by class, class names are `"0".."K-1"`.
pub fn gen_synthetic(spec: &SyntheticSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (k, n_c, d) = (spec.n_classes, spec.n_per_class, spec.n_features);
    let mut informative = vec![false; d];
    for &i in &spec.informative {
        informative[i] = true;
    }
    let mut values = Array2::zeros((k * n_c, d));
    let mut labels = Vec::with_capacity(k * n_c);
    for class in 0..k {
        let mean = class as f64 * spec.shift;
        for r in 0..n_c {
            let row = class * n_c + r;
            for j in 0..d {
                let z: f64 = StandardNormal.sample(&mut rng);
                values[[row, j]] = if informative[j] {
                    mean + z
                } else {
                    let extra: f64 = StandardNormal.sample(&mut rng);
                    z + spec.noise_sigma * extra
                };
            }
            labels.push(class);
        }
    }
    let class_names = (0..k).map(|c| c.to_string()).collect();
    let feature_names = Some((0..d).map(|j| format!("f{j}")).collect());
    LabeledDataset::new(values, labels, class_names, feature_names)
}
