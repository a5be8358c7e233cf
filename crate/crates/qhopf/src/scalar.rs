//! Exact rational coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Coefficient field element: an arbitrary-precision rational.
pub type Scalar = BigRational;

/// Shorthand for `n/d`.
pub fn rat(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Shorthand for an integer scalar.
pub fn int(n: i64) -> Scalar {
    Scalar::from(BigInt::from(n))
}

/// Parses `"3/4"`, `"-2"`, `"7"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    let err = || Error::InvalidParam(format!("not a rational: {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = match den {
        Some(d) => d.parse().map_err(|_| err())?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(err());
    }
    Ok(Scalar::new(n, d))
}

/// Canonical text form: `3/4`, `-2`, `0`.
pub fn scalar_to_string(c: &Scalar) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Requires `0 < v < 1`; used for the deformation parameters.
pub fn check_unit_interval(name: &str, v: &Scalar) -> Result<()> {
    if v.is_positive() && v < &Scalar::one() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!(
            "{name} = {} must satisfy 0 < {name} < 1",
            scalar_to_string(v)
        )))
    }
}

/// Deformation parameters of the bundle algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraParams {
    pub p: Scalar,
    pub q: Scalar,
}

impl AlgebraParams {
    pub fn new(p: Scalar, q: Scalar) -> Result<Self> {
        check_unit_interval("p", &p)?;
        check_unit_interval("q", &q)?;
        Ok(AlgebraParams { p, q })
    }
}

impl Default for AlgebraParams {
    /// Default values used across the test suites: p = 1/2, q = 1/4.
    fn default() -> Self {
        AlgebraParams {
            p: rat(1, 2),
            q: rat(1, 4),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_scalar("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_scalar("-2").unwrap(), int(-2));
        assert_eq!(parse_scalar(" 7 ").unwrap(), int(7));
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
        assert_eq!(scalar_to_string(&rat(-6, 8)), "-3/4");
        assert_eq!(scalar_to_string(&int(5)), "5");
    }

    #[test]
    fn params_bounds() {
        assert!(AlgebraParams::new(rat(1, 2), rat(1, 4)).is_ok());
        assert!(AlgebraParams::new(int(1), rat(1, 4)).is_err());
        assert!(AlgebraParams::new(rat(1, 2), int(0)).is_err());
        assert!(AlgebraParams::new(rat(-1, 2), rat(1, 4)).is_err());
    }
}
