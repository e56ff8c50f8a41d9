//! Cost exponents. A `(k, n)`-strategy composed with itself `t` times is a
//! `(k^t, n^t)`-strategy, so the cost of the `N`-game grows like
//! `N^(ln k / ln n)`.

use num_traits::Float;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ExponentError {
    #[error("exponent needs k >= 1 and n >= 2 (got k={k}, n={n})")]
    Domain { k: u64, n: u64 },
}

/// `ln k / ln n` in the float type `T`.
pub fn exponent<T: Float>(k: u64, n: u64) -> Result<T, ExponentError> {
    if k < 1 || n < 2 {
        return Err(ExponentError::Domain { k, n });
    }
    let (kf, nf) = match (T::from(k), T::from(n)) {
        (Some(kf), Some(nf)) => (kf, nf),
        _ => return Err(ExponentError::Domain { k, n }),
    };
    Ok(kf.ln() / nf.ln())
}

/// Formats `x` with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_exponents() {
        let e = exponent::<f64>(9, 108).unwrap();
        assert!((e - 0.469_28).abs() < 5e-6, "{e}");
        assert!((exponent::<f64>(5, 30).unwrap() - 0.473_20).abs() < 5e-6);
        assert!((exponent::<f64>(11, 165).unwrap() - 0.469_63).abs() < 5e-6);
    }

    #[test]
    fn f32_agrees_loosely() {
        let a = exponent::<f32>(9, 108).unwrap() as f64;
        let b = exponent::<f64>(9, 108).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn domain_errors() {
        assert_eq!(
            exponent::<f64>(3, 1),
            Err(ExponentError::Domain { k: 3, n: 1 })
        );
        assert!(exponent::<f64>(0, 10).is_err());
        assert_eq!(exponent::<f64>(1, 2).unwrap(), 0.0);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.469_280_152_3, 4), "0.4693");
        assert_eq!(format_significant(12.345, 3), "12.3");
        assert_eq!(format_significant(1.0, 10), "1.000000000");
    }
}
