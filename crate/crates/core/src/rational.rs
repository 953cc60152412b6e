//! Exact rationals: parsing, printing and a few search helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::Error;

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Rat {
    ratio(1, 2)
}

/// `2^-k`.
pub fn dyadic(k: u32) -> Rat {
    Rat::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `p`, `p/q` or a finite decimal such as `-0.25`.
pub fn parse_rat(text: &str) -> Result<Rat, Error> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational: `{t}`"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{t}`")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rat::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

/// Canonical text form: `3`, `-1/2`.
pub fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion used only for plot output.
pub fn to_f64(r: &Rat) -> f64 {
    let n: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let d: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    n / d
}

fn floor(r: &Rat) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// The rational with the smallest denominator strictly inside `(lo, hi)`.
///
/// Walks the Stern-Brocot tree; among fractions of minimal denominator the
/// one with the smallest absolute numerator is returned.
pub fn simplest_between(lo: &Rat, hi: &Rat) -> Rat {
    assert!(lo < hi, "simplest_between needs lo < hi");
    if lo.is_negative() && hi.is_positive() {
        return Rat::zero();
    }
    if !lo.is_negative() {
        simplest_nonneg(lo, hi)
    } else {
        -simplest_nonneg(&-hi.clone(), &-lo.clone())
    }
}

fn simplest_nonneg(lo: &Rat, hi: &Rat) -> Rat {
    // Continued-fraction descent on the open interval (lo, hi), lo >= 0.
    let fl = floor(lo);
    let candidate = Rat::from_integer(&fl + BigInt::one());
    if &candidate < hi {
        return candidate;
    }
    let fl_rat = Rat::from_integer(fl.clone());
    let lo_frac = lo - &fl_rat;
    let hi_frac = hi - &fl_rat;
    // Both fractional parts lie in [0, 1]; recurse on reciprocals.
    if lo_frac.is_zero() {
        // Interval (fl, fl + hi_frac) with hi_frac <= 1: take fl + 1/k.
        let k = floor(&hi_frac.recip()) + BigInt::one();
        return fl_rat + Rat::new(BigInt::one(), k);
    }
    let inner = simplest_nonneg(&hi_frac.recip(), &lo_frac.recip());
    fl_rat + inner.recip()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rat("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rat("-4").unwrap(), int(-4));
        assert_eq!(parse_rat("-0.25").unwrap(), ratio(-1, 4));
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(fmt_rat(&ratio(2, -4)), "-1/2");
        assert_eq!(fmt_rat(&int(7)), "7");
    }

    #[test]
    fn simplest_fraction_in_interval() {
        assert_eq!(simplest_between(&ratio(3, 10), &ratio(4, 10)), ratio(1, 3));
        assert_eq!(simplest_between(&ratio(1, 2), &ratio(3, 2)), int(1));
        assert_eq!(simplest_between(&ratio(-1, 3), &ratio(1, 3)), int(0));
        assert_eq!(simplest_between(&ratio(-2, 5), &ratio(-3, 10)), ratio(-1, 3));
        assert_eq!(simplest_between(&int(0), &ratio(1, 1000)), ratio(1, 1001));
        let eps = dyadic(20);
        let a = ratio(7, 13);
        assert_eq!(simplest_between(&(&a - &eps), &(&a + &eps)), a);
    }
}
