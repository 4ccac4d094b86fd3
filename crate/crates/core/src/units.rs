//! Physical constants and decibel conversions.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Linear power ratio to dB.
pub fn to_db(linear: f64) -> Result<f64> {
    if linear > 0.0 && linear.is_finite() {
        Ok(10.0 * linear.log10())
    } else {
        Err(Error::NonPositivePower(linear))
    }
}

/// dB to linear power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a standard deviation quoted in dB at level `level_db` into linear units
/// (first-order propagation).
pub fn db_sigma_to_linear(level_db: f64, sigma_db: f64) -> f64 {
    from_db(level_db) * std::f64::consts::LN_10 / 10.0 * sigma_db
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unity_is_zero_db() {
        assert_eq!(to_db(1.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        assert!((to_db(0.5623).unwrap() + 2.50).abs() < 5e-3);
        assert!((to_db(1.0 / 9.0).unwrap() + 9.54).abs() < 5e-3);
    }

    #[test]
    fn rejects_non_positive() {
        assert_eq!(to_db(0.0), Err(Error::NonPositivePower(0.0)));
        assert!(to_db(-1.0).is_err());
        assert!(to_db(f64::NAN).is_err());
    }

    proptest::proptest! {
        #[test]
        fn round_trip(x in 1e-6f64..1e6) {
            let back = from_db(to_db(x).unwrap());
            proptest::prop_assert!((back - x).abs() <= 1e-12 * x);
        }
    }
}
