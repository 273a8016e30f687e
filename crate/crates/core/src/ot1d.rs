//! Exact Wasserstein distances between one-dimensional empirical measures.
//!
//! `w1_general` integrates `|F_P - F_Q|` over a merge of both atom lists and is
//! the canonical routine. `w1_equal_size` is the sorted-pairing fast path for
//! two uniform measures with the same number of atoms; both must agree.

use crate::data::EmpiricalMeasure1D;
use crate::error::{Error, Result};

/// `(1/n) * sum |x_(i) - y_(i)|` over sorted atoms of two uniform measures
/// with `n` atoms each.
pub fn w1_equal_size(p: &EmpiricalMeasure1D, q: &EmpiricalMeasure1D) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::NotUniformEqualSize(format!(
            "atom counts differ ({} vs {})",
            p.len(),
            q.len()
        )));
    }
    if !p.is_uniform() || !q.is_uniform() {
        return Err(Error::NotUniformEqualSize("weights are not uniform".into()));
    }
    Ok(sorted_pairing_mean(p.values(), q.values()))
}

/// Mean absolute difference between two equally long ascending sequences.
pub(crate) fn sorted_pairing_mean(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let total: f64 = x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum();
    total / x.len() as f64
}

/// Exact W1 as the L1 distance between the two step CDFs.
///
/// One sweep over the merged atoms; on each gap `[x_k, x_{k+1})` the CDFs are
/// constant, so the gap contributes `|F_P(x_k) - F_Q(x_k)| * (x_{k+1} - x_k)`.
/// At equal locations the P atom is consumed first.
pub fn w1_general(p: &EmpiricalMeasure1D, q: &EmpiricalMeasure1D) -> f64 {
    let (px, pw) = (p.values(), p.weights());
    let (qx, qw) = (q.values(), q.weights());
    let (mut i, mut j) = (0, 0);
    let (mut fp, mut fq) = (0.0_f64, 0.0_f64);
    let mut prev: Option<f64> = None;
    let mut total = 0.0;
    while i < px.len() || j < qx.len() {
        let take_p = j >= qx.len() || (i < px.len() && px[i] <= qx[j]);
        let x = if take_p { px[i] } else { qx[j] };
        if let Some(last) = prev {
            total += (fp - fq).abs() * (x - last);
        }
        if take_p {
            fp += pw[i];
            i += 1;
        } else {
            fq += qw[j];
            j += 1;
        }
        prev = Some(x);
    }
    total
}

/// Exact p-Wasserstein distance via the quantile functions.
///
/// Walks the union of cumulative-weight breakpoints of both measures; between
/// breakpoints both quantile functions are constant.
pub fn wp_general(p: &EmpiricalMeasure1D, q: &EmpiricalMeasure1D, order: f64) -> Result<f64> {
    if !order.is_finite() || order < 1.0 {
        return Err(Error::InvalidOrder(order));
    }
    let (px, pw) = (p.values(), p.weights());
    let (qx, qw) = (q.values(), q.weights());
    let (mut i, mut j) = (0, 0);
    let (mut cp, mut cq) = (pw[0], qw[0]);
    let mut level = 0.0_f64;
    let mut total = 0.0;
    loop {
        let next = cp.min(cq);
        let mass = next - level;
        if mass > 0.0 {
            total += mass * (px[i] - qx[j]).abs().powf(order);
        }
        level = next;
        let advance_p = cp <= cq;
        let advance_q = cq <= cp;
        if advance_p {
            i += 1;
            if i == px.len() {
                break;
            }
            cp += pw[i];
        }
        if advance_q {
            j += 1;
            if j == qx.len() {
                break;
            }
            cq += qw[j];
        }
    }
    Ok(total.powf(1.0 / order))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    fn u(v: &[f64]) -> EmpiricalMeasure1D {
        EmpiricalMeasure1D::uniform(v.to_vec()).unwrap()
    }

    #[test]
    fn translated_pair() {
        assert_eq!(w1_equal_size(&u(&[0.0, 1.0]), &u(&[2.0, 3.0])).unwrap(), 2.0);
        assert_eq!(w1_general(&u(&[0.0, 1.0]), &u(&[2.0, 3.0])), 2.0);
    }

    #[test]
    fn identical_measures() {
        let p = u(&[1.5, 3.7, 9.0]);
        assert_eq!(w1_equal_size(&p, &p).unwrap(), 0.0);
        assert_eq!(w1_general(&p, &p), 0.0);
    }

    #[test]
    fn point_masses() {
        assert_eq!(w1_equal_size(&u(&[0.0]), &u(&[5.0])).unwrap(), 5.0);
        assert_eq!(w1_general(&u(&[0.0]), &u(&[5.0])), 5.0);
        assert_eq!(wp_general(&u(&[0.0]), &u(&[3.0]), 2.0).unwrap(), 3.0);
    }

    #[test]
    fn repeated_atoms() {
        let p = u(&[0.0, 0.0, 4.0, 4.0]);
        let q = u(&[1.0, 1.0, 3.0, 3.0]);
        assert_eq!(w1_equal_size(&p, &q).unwrap(), 1.0);
        assert_abs_diff_eq!(w1_general(&p, &q), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn unequal_sizes() {
        let p = u(&[0.0, 0.0, 1.0]);
        let q = u(&[1.0]);
        assert_abs_diff_eq!(w1_general(&p, &q), 2.0 / 3.0, epsilon = 1e-15);
        assert!(matches!(
            w1_equal_size(&p, &q),
            Err(Error::NotUniformEqualSize(_))
        ));
    }

    #[test]
    fn non_uniform_rejected_by_fast_path() {
        let p = EmpiricalMeasure1D::new(vec![0.0, 1.0], vec![0.25, 0.75]).unwrap();
        let q = u(&[0.0, 1.0]);
        assert!(w1_equal_size(&p, &q).is_err());
        assert_abs_diff_eq!(w1_general(&p, &q), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn w2_by_quantile_pairing() {
        let p = u(&[0.0, 2.0]);
        let q = u(&[0.0, 0.0]);
        assert_abs_diff_eq!(wp_general(&p, &q, 2.0).unwrap(), 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn order_below_one_rejected() {
        let p = u(&[0.0]);
        assert!(matches!(wp_general(&p, &p, 0.5), Err(Error::InvalidOrder(_))));
        assert!(wp_general(&p, &p, f64::NAN).is_err());
    }

    #[test]
    fn weighted_self_distance_is_zero() {
        let p = EmpiricalMeasure1D::new(vec![3.0, -1.0, 2.0], vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(w1_general(&p, &p), 0.0);
        assert_eq!(wp_general(&p, &p, 3.0).unwrap(), 0.0);
    }
}
