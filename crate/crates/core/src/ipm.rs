//! Class-pair distance matrices, the Frobenius utility, and the Gaussian MMD.

use ndarray::{Array2, ArrayView2};

use crate::data::{FeatureSubset, LabeledDataset};
use crate::error::{Error, Result};
use crate::exec::{par_map, Execution};
use crate::ot1d::w1_general;
use crate::sinkhorn::{w1_sinkhorn, SinkhornConfig};

/// `K x K` symmetric matrix of distances between class-conditional samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistanceMatrix {
    d: Array2<f64>,
}

impl ClassDistanceMatrix {
    /// Validates symmetry (1e-9), a zero diagonal and non-negative entries.
    pub fn new(d: Array2<f64>) -> Result<Self> {
        let (k, k2) = d.dim();
        if k != k2 {
            return Err(Error::DimensionMismatch(format!("distance matrix is {k}x{k2}")));
        }
        for i in 0..k {
            if d[[i, i]] != 0.0 {
                return Err(Error::DimensionMismatch(format!(
                    "diagonal entry {i} is {}",
                    d[[i, i]]
                )));
            }
            for j in 0..k {
                let x = d[[i, j]];
                if !(x.is_finite() && x >= 0.0) || (x - d[[j, i]]).abs() > 1e-9 {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({i}, {j}) = {x} breaks symmetry or sign"
                    )));
                }
            }
        }
        Ok(Self { d })
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.d
    }

    pub fn n_classes(&self) -> usize {
        self.d.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[[i, j]]
    }
}

/// Which distance estimates each class-pair entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorChoice {
    /// Exact 1-D W1 by CDF integration. Single-feature subsets only.
    Exact1d,
    /// Entropic W1 approximation (Euclidean ground cost).
    Sinkhorn(SinkhornConfig),
    /// Gaussian-kernel MMD; `None` selects the median-heuristic bandwidth
    /// per class pair.
    MmdGaussian { bandwidth: Option<f64> },
}

impl EstimatorChoice {
    pub fn name(&self) -> &'static str {
        match self {
            EstimatorChoice::Exact1d => "exact1d",
            EstimatorChoice::Sinkhorn(_) => "sinkhorn",
            EstimatorChoice::MmdGaussian { .. } => "mmd",
        }
    }

    pub fn supports_subset_size(&self, size: usize) -> bool {
        size >= 1 && (size == 1 || !matches!(self, EstimatorChoice::Exact1d))
    }

    fn check_subset_size(&self, size: usize) -> Result<()> {
        if size == 0 {
            return Err(Error::EmptySubset);
        }
        if !self.supports_subset_size(size) {
            return Err(Error::EstimatorMismatch {
                estimator: self.name(),
                size,
            });
        }
        Ok(())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            EstimatorChoice::Exact1d => Ok(()),
            EstimatorChoice::Sinkhorn(cfg) => cfg.validate(),
            EstimatorChoice::MmdGaussian { bandwidth: Some(b) } if !(b.is_finite() && *b > 0.0) => {
                Err(Error::InvalidBandwidth(*b))
            }
            EstimatorChoice::MmdGaussian { .. } => Ok(()),
        }
    }
}

fn pair_distance(
    ds: &LabeledDataset,
    subset: &FeatureSubset,
    est: &EstimatorChoice,
    i: usize,
    j: usize,
) -> Result<f64> {
    match est {
        EstimatorChoice::Exact1d => {
            let f = subset.indices()[0];
            Ok(w1_general(&ds.feature_measure(i, f)?, &ds.feature_measure(j, f)?))
        }
        EstimatorChoice::Sinkhorn(cfg) => {
            let x = ds.class_slice(i, subset)?;
            let y = ds.class_slice(j, subset)?;
            w1_sinkhorn(x.view(), y.view(), cfg)
        }
        EstimatorChoice::MmdGaussian { bandwidth } => {
            let x = ds.class_slice(i, subset)?;
            let y = ds.class_slice(j, subset)?;
            let bw = match bandwidth {
                Some(b) => *b,
                None => median_heuristic(x.view(), y.view()),
            };
            mmd_gaussian(x.view(), y.view(), bw)
        }
    }
}

/// Distances between every pair of class-conditional samples restricted to
/// `subset`. Only `i < j` is estimated; the lower triangle is mirrored.
pub fn distance_matrix(
    ds: &LabeledDataset,
    subset: &FeatureSubset,
    est: &EstimatorChoice,
) -> Result<ClassDistanceMatrix> {
    distance_matrix_with(ds, subset, est, Execution::Sequential)
}

/// [`distance_matrix`] with the class pairs optionally solved in parallel.
pub fn distance_matrix_with(
    ds: &LabeledDataset,
    subset: &FeatureSubset,
    est: &EstimatorChoice,
    exec: Execution,
) -> Result<ClassDistanceMatrix> {
    est.check_subset_size(subset.len())?;
    est.validate()?;
    subset.check_against(ds.n_features())?;
    let k = ds.n_classes();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let values = par_map(exec, &pairs, |&(i, j)| pair_distance(ds, subset, est, i, j));
    let mut d = Array2::zeros((k, k));
    for (&(i, j), v) in pairs.iter().zip(values) {
        let v = v?;
        d[[i, j]] = v;
        d[[j, i]] = v;
    }
    Ok(ClassDistanceMatrix { d })
}

/// Squared Frobenius norm: the double sum over all ordered pairs, so each
/// unordered pair counts twice.
pub fn utility(dm: &ClassDistanceMatrix) -> f64 {
    dm.d.iter().map(|x| x * x).sum()
}

/// Utility of a single feature.
pub fn feature_utility(ds: &LabeledDataset, feature_idx: usize, est: &EstimatorChoice) -> Result<f64> {
    if feature_idx >= ds.n_features() {
        return Err(Error::InvalidFeature {
            index: feature_idx,
            features: ds.n_features(),
        });
    }
    Ok(utility(&distance_matrix(
        ds,
        &FeatureSubset::single(feature_idx),
        est,
    )?))
}

/// Utility of an arbitrary subset.
pub fn subset_utility(
    ds: &LabeledDataset,
    subset: &FeatureSubset,
    est: &EstimatorChoice,
) -> Result<f64> {
    Ok(utility(&distance_matrix(ds, subset, est)?))
}

fn squared_distance(a: ndarray::ArrayView1<f64>, b: ndarray::ArrayView1<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Closed-form empirical MMD with kernel `exp(-|u - v|^2 / (2 bandwidth^2))`.
///
/// Evaluated as `S_xx / m^2 + S_yy / n^2 - 2 S_xy / (m n)`. The form is
/// positive semi-definite, so a negative radicand is rounding and is clamped
/// to zero.
pub fn mmd_gaussian(x: ArrayView2<f64>, y: ArrayView2<f64>, bandwidth: f64) -> Result<f64> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::InvalidBandwidth(bandwidth));
    }
    if x.nrows() == 0 || y.nrows() == 0 {
        return Err(Error::DimensionMismatch("MMD needs non-empty sample sets".into()));
    }
    if x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "MMD between {}-column and {}-column samples",
            x.ncols(),
            y.ncols()
        )));
    }
    let scale = 1.0 / (2.0 * bandwidth * bandwidth);
    let block = |p: ArrayView2<f64>, q: ArrayView2<f64>| -> f64 {
        let mut s = 0.0;
        for pi in p.rows() {
            for qj in q.rows() {
                s += (-squared_distance(pi, qj) * scale).exp();
            }
        }
        s
    };
    let (m, n) = (x.nrows() as f64, y.nrows() as f64);
    let sxx = block(x, x);
    let syy = block(y, y);
    let sxy = block(x, y);
    let radicand = sxx / (m * m) + syy / (n * n) - 2.0 * sxy / (m * n);
    Ok(radicand.max(0.0).sqrt())
}

/// Median of the pairwise Euclidean distances over the pooled samples.
/// Falls back to 1 when the median is zero.
pub fn median_heuristic(x: ArrayView2<f64>, y: ArrayView2<f64>) -> f64 {
    let pooled: Vec<_> = x.rows().into_iter().chain(y.rows()).collect();
    let mut dists = Vec::with_capacity(pooled.len() * pooled.len().saturating_sub(1) / 2);
    for i in 0..pooled.len() {
        for j in i + 1..pooled.len() {
            dists.push(squared_distance(pooled[i], pooled[j]).sqrt());
        }
    }
    if dists.is_empty() {
        return 1.0;
    }
    dists.sort_by(f64::total_cmp);
    let mid = dists.len() / 2;
    let median = if dists.len() % 2 == 0 {
        0.5 * (dists[mid - 1] + dists[mid])
    } else {
        dists[mid]
    };
    if median > 0.0 {
        median
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    use super::*;

    fn two_class_one_feature() -> LabeledDataset {
        LabeledDataset::new(
            array![[0.0], [1.0], [2.0], [3.0]],
            vec![0, 0, 1, 1],
            vec!["a".into(), "b".into()],
            None,
        )
        .unwrap()
    }

    #[test]
    fn exact_binary_matrix_and_utility() {
        let ds = two_class_one_feature();
        let dm = distance_matrix(&ds, &FeatureSubset::single(0), &EstimatorChoice::Exact1d).unwrap();
        assert_eq!(dm.matrix(), &array![[0.0, 2.0], [2.0, 0.0]]);
        assert_eq!(utility(&dm), 8.0);
        assert_eq!(feature_utility(&ds, 0, &EstimatorChoice::Exact1d).unwrap(), 8.0);
    }

    #[test]
    fn point_mass_classes() {
        let ds = LabeledDataset::new(
            array![[0.0], [1.0], [4.0]],
            vec![0, 1, 2],
            vec!["a".into(), "b".into(), "c".into()],
            None,
        )
        .unwrap();
        let dm = distance_matrix(&ds, &FeatureSubset::single(0), &EstimatorChoice::Exact1d).unwrap();
        assert_eq!(dm.matrix(), &array![[0.0, 1.0, 4.0], [1.0, 0.0, 3.0], [4.0, 3.0, 0.0]]);
        assert_eq!(utility(&dm), 52.0);
    }

    #[test]
    fn identical_classes_give_zero() {
        let ds = LabeledDataset::new(
            array![[1.0, 7.0], [2.0, 7.0], [1.0, 7.0], [2.0, 7.0]],
            vec![0, 0, 1, 1],
            vec!["a".into(), "b".into()],
            None,
        )
        .unwrap();
        assert_eq!(feature_utility(&ds, 0, &EstimatorChoice::Exact1d).unwrap(), 0.0);
        assert_eq!(feature_utility(&ds, 1, &EstimatorChoice::Exact1d).unwrap(), 0.0);
        let mmd = EstimatorChoice::MmdGaussian { bandwidth: None };
        let dm = distance_matrix(&ds, &FeatureSubset::all(2), &mmd).unwrap();
        assert_eq!(utility(&dm), 0.0);
        let sk = EstimatorChoice::Sinkhorn(SinkhornConfig::relative(0.01));
        let dm = distance_matrix(&ds, &FeatureSubset::all(2), &sk).unwrap();
        assert!(dm.get(0, 1) < 0.02, "{}", dm.get(0, 1));
    }

    #[test]
    fn exact1d_rejects_multi_feature_subset() {
        let ds = LabeledDataset::new(
            array![[0.0, 1.0], [1.0, 0.0]],
            vec![0, 1],
            vec!["a".into(), "b".into()],
            None,
        )
        .unwrap();
        let err = distance_matrix(&ds, &FeatureSubset::all(2), &EstimatorChoice::Exact1d);
        assert!(matches!(err, Err(Error::EstimatorMismatch { size: 2, .. })));
        let err = distance_matrix(&ds, &FeatureSubset::all(0), &EstimatorChoice::Exact1d);
        assert!(matches!(err, Err(Error::EmptySubset)));
    }

    #[test]
    fn utility_of_zero_matrix() {
        let dm = ClassDistanceMatrix::new(Array2::zeros((3, 3))).unwrap();
        assert_eq!(utility(&dm), 0.0);
    }

    #[test]
    fn distance_matrix_validation() {
        assert!(ClassDistanceMatrix::new(array![[0.0, 1.0], [2.0, 0.0]]).is_err());
        assert!(ClassDistanceMatrix::new(array![[1.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(ClassDistanceMatrix::new(array![[0.0, -1.0], [-1.0, 0.0]]).is_err());
    }

    #[test]
    fn mmd_of_identical_sets_is_exactly_zero() {
        let x = array![[0.3, 1.0], [-2.0, 4.5], [1.1, 0.0]];
        assert_eq!(mmd_gaussian(x.view(), x.view(), 0.7).unwrap(), 0.0);
    }

    #[test]
    fn mmd_of_singletons() {
        let u = array![[1.0, 2.0]];
        let v = array![[0.0, -1.0]];
        let s: f64 = 1.5;
        let expected = (2.0 - 2.0 * (-10.0 / (2.0 * s * s)).exp()).sqrt();
        assert_abs_diff_eq!(mmd_gaussian(u.view(), v.view(), s).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn mmd_rejects_bad_bandwidth() {
        let u = array![[1.0]];
        assert!(matches!(
            mmd_gaussian(u.view(), u.view(), 0.0),
            Err(Error::InvalidBandwidth(_))
        ));
        assert!(mmd_gaussian(u.view(), u.view(), -1.0).is_err());
    }

    #[test]
    fn median_heuristic_values() {
        let x = array![[0.0], [1.0]];
        let y = array![[3.0]];
        // pairwise distances 1, 3, 2 -> median 2
        assert_eq!(median_heuristic(x.view(), y.view()), 2.0);
        let z = array![[5.0], [5.0]];
        assert_eq!(median_heuristic(z.view(), z.view()), 1.0);
    }
}
