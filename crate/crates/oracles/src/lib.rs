//! Brute-force references for checking the optimal transport routines of
//! `ipm-fs`. Nothing here is fast; everything here is simple enough to check
//! by hand.

use ipm_fs::EmpiricalMeasure1D;
use itertools::Itertools;
use ndarray::ArrayView2;
use num_integer::Integer;
use thiserror::Error;

/// Largest sample count accepted by [`exact_ot_assignment`] (8! = 40320).
pub const MAX_ASSIGNMENT_SIZE: usize = 8;

/// Largest common denominator accepted by [`replicate_to_uniform`].
pub const MAX_DENOMINATOR: u64 = 10_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("assignment oracle needs equal sample counts, got {0} and {1}")]
    UnequalSizes(usize, usize),
    #[error("assignment oracle is capped at n = {MAX_ASSIGNMENT_SIZE}, got {0}")]
    TooLarge(usize),
    #[error("samples have {0} and {1} columns")]
    ColumnMismatch(usize, usize),
    #[error("weight {0} is not a fraction with denominator <= {MAX_DENOMINATOR}")]
    NotRational(f64),
    #[error("common denominator {0} exceeds {MAX_DENOMINATOR}")]
    DenominatorTooLarge(u64),
    #[error(transparent)]
    Measure(#[from] ipm_fs::Error),
}

/// Exact W1 between two uniform sample sets of equal size `n <= 8`: the
/// minimum over all `n!` permutations of the mean Euclidean distance of the
/// pairing.
pub fn exact_ot_assignment(x: ArrayView2<f64>, y: ArrayView2<f64>) -> Result<f64, OracleError> {
    let n = x.nrows();
    if y.nrows() != n {
        return Err(OracleError::UnequalSizes(n, y.nrows()));
    }
    if x.ncols() != y.ncols() {
        return Err(OracleError::ColumnMismatch(x.ncols(), y.ncols()));
    }
    if n > MAX_ASSIGNMENT_SIZE {
        return Err(OracleError::TooLarge(n));
    }
    let dist = ndarray::Array2::from_shape_fn((n, n), |(i, j)| {
        x.row(i)
            .iter()
            .zip(y.row(j).iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    });
    let best = (0..n)
        .permutations(n)
        .map(|perm| perm.iter().enumerate().map(|(i, &j)| dist[[i, j]]).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    Ok(best / n as f64)
}

/// Same as [`exact_ot_assignment`] for 1-D samples given as slices.
pub fn exact_ot_assignment_1d(x: &[f64], y: &[f64]) -> Result<f64, OracleError> {
    let xa = ndarray::Array2::from_shape_vec((x.len(), 1), x.to_vec()).expect("column vector");
    let ya = ndarray::Array2::from_shape_vec((y.len(), 1), y.to_vec()).expect("column vector");
    exact_ot_assignment(xa.view(), ya.view())
}

/// Best fraction `p/q` with `q <= max_den` for `x` in `[0, 1]`, by continued
/// fraction convergents.
fn to_fraction(x: f64, max_den: u64) -> Option<(u64, u64)> {
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    let mut best = None;
    for _ in 0..64 {
        let a = r.floor();
        if a > u32::MAX as f64 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        best = Some((h2, k2));
        if (h2 as f64 / k2 as f64 - x).abs() <= 1e-12 {
            return best;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    best.filter(|&(h, k)| (h as f64 / k as f64 - x).abs() <= 1e-12)
}

/// Expands two rationally weighted measures into uniform measures with the
/// same atom count by repeating each atom `weight * L` times, `L` being the
/// least common denominator of all weights.
pub fn replicate_to_uniform(
    p: &EmpiricalMeasure1D,
    q: &EmpiricalMeasure1D,
) -> Result<(EmpiricalMeasure1D, EmpiricalMeasure1D), OracleError> {
    let fractions = |m: &EmpiricalMeasure1D| -> Result<Vec<(u64, u64)>, OracleError> {
        m.weights()
            .iter()
            .map(|&w| to_fraction(w, MAX_DENOMINATOR).ok_or(OracleError::NotRational(w)))
            .collect()
    };
    let fp = fractions(p)?;
    let fq = fractions(q)?;
    let mut lcm = 1u64;
    for &(_, den) in fp.iter().chain(&fq) {
        lcm = lcm.lcm(&den);
        if lcm > MAX_DENOMINATOR {
            return Err(OracleError::DenominatorTooLarge(lcm));
        }
    }
    let expand = |m: &EmpiricalMeasure1D, fr: &[(u64, u64)]| -> Result<EmpiricalMeasure1D, OracleError> {
        let mut atoms = Vec::with_capacity(lcm as usize);
        for (&x, &(num, den)) in m.values().iter().zip(fr) {
            let copies = num * (lcm / den);
            atoms.extend(std::iter::repeat_n(x, copies as usize));
        }
        Ok(EmpiricalMeasure1D::uniform(atoms)?)
    };
    Ok((expand(p, &fp)?, expand(q, &fq)?))
}
