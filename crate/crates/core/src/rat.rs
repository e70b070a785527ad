//! Helpers around `BigRational` coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::real::Real;

/// Parses `"p/q"`, `"p"` or `"-p/q"` into an exact rational.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

pub fn ratio_from_i64(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ratio_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Converts to the extended-precision type, keeping ~31 digits.
pub fn ratio_to_real(r: &BigRational) -> Real {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return Real::from(hi);
    }
    match BigRational::from_float(hi) {
        Some(h) => {
            let rem = r - h;
            Real::new(hi, rem.to_f64().unwrap_or(0.0))
        }
        None => Real::from(hi),
    }
}

pub fn bigint_to_real(n: &BigInt) -> Real {
    ratio_to_real(&BigRational::from_integer(n.clone()))
}

pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Formats as `p/q` (or `p` when integral); inverse of [`parse_ratio`].
pub fn ratio_to_string(r: &BigRational) -> String {
    if is_integer(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Sign as -1, 0, 1.
pub fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let r = parse_ratio("-3/6").unwrap();
        assert_eq!(ratio_to_string(&r), "-1/2");
        assert_eq!(ratio_to_string(&parse_ratio("7").unwrap()), "7");
        assert!(parse_ratio("1/0").is_none());
        assert!(parse_ratio("x").is_none());
    }

    #[test]
    fn to_real_exactness() {
        let r = ratio_from_i64(1, 3);
        let x = ratio_to_real(&r);
        let back = x * Real::from(3.0) - Real::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        // something that is exactly a double stays exact
        let d = ratio_from_i64(3, 4);
        assert_eq!(ratio_to_real(&d).to_f64(), 0.75);
        assert_eq!(ratio_to_real(&d).lo(), 0.0);
    }
}
