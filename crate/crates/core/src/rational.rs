//! Exact rationals and the handful of rational helpers the recursions share.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// `n/d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form, `"p/q"` or `"p"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Checks that `m` is admissible: a positive rational.
///
/// For `m > 0` every factor `2m + 2j` and `2m + 2j ± 1` (j ≥ 1) met by the
/// recursions is positive, so positivity is the whole condition.
pub fn validate_m(m: &Rational) -> Result<()> {
    if !m.is_positive() {
        return Err(Error::Domain(format!("m must be a positive rational, got {m}")));
    }
    Ok(())
}

/// The ratio product `Π_{j=0..k} (x + 1 − 2j) / (x − 2j)`.
pub fn ratio_i(x: &Rational, k: usize) -> Result<Rational> {
    let mut acc = Rational::one();
    for j in 0..=k {
        let shift = int(2 * j as i64);
        let den = x - &shift;
        if den.is_zero() {
            return Err(Error::Domain(format!(
                "ratio_I({x}, {k}): factor x - {shift} vanishes"
            )));
        }
        acc *= (x + Rational::one() - &shift) / den;
    }
    Ok(acc)
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_text {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ratio_i_examples() {
        assert_eq!(ratio_i(&int(4), 0).unwrap(), rat(5, 4));
        assert_eq!(ratio_i(&int(4), 1).unwrap(), rat(15, 8));
        assert_eq!(ratio_i(&int(5), 1).unwrap(), rat(8, 5));
    }

    #[test]
    fn ratio_i_zero_factor_is_domain_error() {
        let err = ratio_i(&int(2), 1).unwrap_err();
        assert!(matches!(err, Error::Domain(ref msg) if msg.contains("x - 2")));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" 3 ").unwrap(), int(3));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(-1, 3)), "-1/3");
        assert_eq!(format_rational(&int(7)), "7");
    }

    #[test]
    fn m_validation() {
        assert!(validate_m(&rat(1, 2)).is_ok());
        assert!(validate_m(&int(0)).is_err());
        assert!(validate_m(&rat(-1, 2)).is_err());
    }

    proptest! {
        #[test]
        fn ratio_i_peels_last_factor(num in 1i64..200, den in 1i64..7, k in 1usize..6) {
            let x = rat(num, den);
            prop_assume!((0..=k).all(|j| x != int(2 * j as i64)));
            prop_assume!(x != int(2 * k as i64 - 1));
            let full = ratio_i(&x, k).unwrap();
            let lower = ratio_i(&x, k - 1).unwrap();
            let two_k = int(2 * k as i64);
            let peeled = full * (&x - &two_k) / (&x + Rational::one() - &two_k);
            prop_assert_eq!(peeled, lower);
        }
    }
}
