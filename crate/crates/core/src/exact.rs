//! Exact integer and rational helpers shared by the measure and bound code.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Binomial coefficient via one row of Pascal's triangle.
///
/// Returns zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut row = vec![BigInt::zero(); k + 1];
    row[0] = BigInt::one();
    for i in 1..=n {
        let top = i.min(k);
        for j in (1..=top).rev() {
            let prev = row[j - 1].clone();
            row[j] += prev;
        }
    }
    row[k].clone()
}

pub fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Parses `"p/q"`, `"p"`, or a finite decimal like `"0.25"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Format(format!("not a rational number: {s:?}"));
    if s.is_empty() || s.len() > 4096 {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = parse_int(num).ok_or_else(bad)?;
        let den: BigInt = parse_int(den).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(Error::Format(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole_val: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            parse_int(whole_digits).ok_or_else(bad)?
        };
        let frac_val: BigInt = parse_int(frac).ok_or_else(bad)?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = BigRational::new(whole_val * &scale + frac_val, scale);
        return Ok(if negative { -mag } else { mag });
    }
    Ok(BigRational::from_integer(parse_int(s).ok_or_else(bad)?))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Canonical text form: reduced `p/q`, or just `p` for integers.
pub fn format_rational(r: &BigRational) -> String {
    r.to_string()
}

pub fn is_non_negative(r: &BigRational) -> bool {
    !r.is_negative()
}

/// Lossy conversion for display only.
pub fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_match_small_table() {
        let table = [
            (0, 0, 1),
            (4, 2, 6),
            (5, 2, 10),
            (6, 3, 20),
            (3, 5, 0),
            (10, 0, 1),
        ];
        for (n, k, v) in table {
            assert_eq!(binomial(n, k), BigInt::from(v), "C({n},{k})");
        }
        let big = binomial(100, 50);
        assert_eq!(big.to_string(), "100891344545564193334812497256");
    }

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("1/3").unwrap(), ratio(1, 3));
        assert_eq!(parse_rational("6/4").unwrap(), ratio(3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1/2").unwrap(), ratio(-1, 2));
        for bad in ["", "1/0", "a/b", "1//2", "1.", ".", "1e3", "+"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn canonical_format() {
        assert_eq!(format_rational(&ratio(2, 4)), "1/2");
        assert_eq!(format_rational(&ratio(6, 1)), "6");
    }
}
