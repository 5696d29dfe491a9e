use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Normal-reference bandwidth on standardized data,
/// `(4 / (d + 2))^{1/(d+4)} · n^{−1/(d+4)}`, identical for every coordinate.
pub fn select_bandwidth(n: usize, d: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    if d == 0 {
        return Err(Error::InvalidParameter("bandwidth selection needs at least one column".into()));
    }
    let df = d as f64;
    let exponent = 1.0 / (df + 4.0);
    let b = libm::pow(4.0 / (df + 2.0), exponent) * libm::pow(n as f64, -exponent);
    Ok(alloc::vec![b; d])
}

pub(crate) fn check_override(bandwidths: &[f64], d: usize) -> Result<()> {
    if bandwidths.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bandwidths.len(),
        });
    }
    if bandwidths.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::InvalidParameter("bandwidths must be positive and finite".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn univariate_value() {
        let b = select_bandwidth(100, 1).unwrap();
        let want = libm::pow(4.0 / 3.0, 0.2) * libm::pow(100.0, -0.2);
        assert!((b[0] - want).abs() < 1e-15);
        assert!((b[0] - 0.421_685).abs() < 1e-6);
    }

    #[test]
    fn scaling_in_n() {
        let b1 = select_bandwidth(250, 1).unwrap()[0];
        let b4 = select_bandwidth(1000, 1).unwrap()[0];
        assert!((b4 / b1 - libm::pow(4.0, -0.2)).abs() < 1e-14);
    }

    #[test]
    fn equal_across_coordinates() {
        let b = select_bandwidth(100, 2).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b[0], b[1]);
    }

    #[test]
    fn too_few_rows() {
        assert!(matches!(select_bandwidth(1, 1), Err(Error::InsufficientData { .. })));
    }
}
