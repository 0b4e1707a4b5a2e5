use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::CompensatedSum;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VdcResult {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `||sum Z(n)||_F^2` against
/// `((x + k(R-1) + 1)/R) sum_{|r|<R} (1 - |r|/R) sum_n tr(Z(n+kr)^H Z(n))`
/// for `Z(n)`, `n = y+1, ..., y+x`, given as `z[n - y - 1]`.
pub fn vdc_inequality_check(z: &[DMatrix<Complex64>], big_r: f64, k: u64) -> Result<VdcResult> {
    if big_r.is_nan() || big_r < 1.0 || k == 0 {
        return Err(Error::Domain("need R >= 1 and k >= 1".into()));
    }
    if let Some(first) = z.first() {
        let shape = first.shape();
        if shape.0 != shape.1 {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", shape.0, shape.1)));
        }
        if let Some(bad) = z.iter().find(|m| m.shape() != shape) {
            return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", bad.shape(), shape)));
        }
    }
    let x = z.len();
    let mut total = DMatrix::<Complex64>::zeros(z.first().map_or(0, |m| m.nrows()), z.first().map_or(0, |m| m.ncols()));
    for m in z {
        total += m;
    }
    let lhs = total.norm_squared();

    // integers r with |r| < R
    let r_max = (big_r.ceil() as i64 - 1).max(0);
    let mut acc = CompensatedSum::default();
    for r in -r_max..=r_max {
        let w = 1.0 - r.unsigned_abs() as f64 / big_r;
        if w <= 0.0 {
            continue;
        }
        let shift = (k as i128 * r as i128).unsigned_abs() as usize;
        if shift >= x {
            continue;
        }
        let mut inner = CompensatedSum::default();
        for i in 0..x - shift {
            // (n, n + kr) with both in range
            let (n, nk) = if r >= 0 { (i, i + shift) } else { (i + shift, i) };
            inner.add(z[nk].dotc(&z[n]));
        }
        acc.add(inner.value() * w);
    }
    let factor = (x as f64 + k as f64 * (big_r - 1.0) + 1.0) / big_r;
    let rhs = factor * acc.value().re;
    let slack = rhs - lhs;
    Ok(VdcResult { lhs, rhs, slack, holds: slack >= -1e-9 * rhs.abs().max(1.0) })
}

/// The `d = 1` case on plain complex numbers.
pub fn vdc_inequality_check_scalar(z: &[Complex64], big_r: f64, k: u64) -> Result<VdcResult> {
    let mats: Vec<DMatrix<Complex64>> = z.iter().map(|&c| DMatrix::from_element(1, 1, c)).collect();
    vdc_inequality_check(&mats, big_r, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_sequence() {
        let ones = vec![Complex64::new(1.0, 0.0); 50];
        let res = vdc_inequality_check_scalar(&ones, 1.0, 1).unwrap();
        assert!((res.lhs - 2500.0).abs() < 1e-9);
        // R = 1: Cauchy-Schwarz with factor x + 1
        assert!((res.rhs - 51.0 * 50.0).abs() < 1e-9);
        let res = vdc_inequality_check_scalar(&ones, 4.0, 1).unwrap();
        assert!(res.holds && res.rhs >= 2500.0);
    }

    #[test]
    fn dimension_errors() {
        let a = DMatrix::<Complex64>::zeros(2, 2);
        let b = DMatrix::<Complex64>::zeros(3, 3);
        assert!(matches!(vdc_inequality_check(&[a.clone(), b], 2.0, 1), Err(Error::DimensionMismatch(_))));
        let c = DMatrix::<Complex64>::zeros(2, 3);
        assert!(vdc_inequality_check(&[c], 2.0, 1).is_err());
        assert!(vdc_inequality_check(&[a], 0.5, 1).is_err());
        assert!(vdc_inequality_check(&[], 3.0, 2).unwrap().holds);
    }

    #[test]
    fn alternating_signs() {
        let z: Vec<Complex64> = (0..31).map(|i| Complex64::new(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
        for (r, k) in [(1.0, 1u64), (2.0, 1), (3.5, 2), (8.0, 3)] {
            assert!(vdc_inequality_check_scalar(&z, r, k).unwrap().holds);
        }
    }
}
