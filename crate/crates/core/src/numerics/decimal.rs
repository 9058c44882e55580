//! Decimal and rational string conversion.

use super::ball::Ball;
use super::mag::Mag;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use std::str::FromStr;

/// Parse `"-1.25e-3"`, `"7"` or `"3/8"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Usage(format!("cannot parse number '{s}'"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mant, ex) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (ip, fp) = mant.split_once('.').unwrap_or((mant, ""));
    if ip.is_empty() && fp.is_empty() {
        return Err(bad());
    }
    if !ip.chars().chain(fp.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{ip}{fp}");
    let mut n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| bad())?;
    if neg {
        n = -n;
    }
    let e10 = ex - fp.len() as i64;
    if e10.unsigned_abs() > 100_000 {
        return Err(bad());
    }
    let p = BigInt::from(10).pow(e10.unsigned_abs() as u32);
    Ok(if e10 >= 0 {
        BigRational::from_integer(n * p)
    } else {
        BigRational::new(n, p)
    })
}

pub fn parse_decimal(s: &str, prec: u32) -> Result<Ball> {
    Ok(Ball::from_rational(&parse_rational(s)?, prec))
}

/// Decimal digits needed so that a `bits`-bit value round-trips.
pub fn digits_for_bits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// Format a rational with `digits` significant decimal digits.
pub fn format_rational(q: &BigRational, digits: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let neg = q.is_negative();
    let a = q.abs();
    let approx = a.numer().bits() as f64 - a.denom().bits() as f64;
    let mut e = (approx * std::f64::consts::LOG10_2).floor() as i64;
    // adjust so that 10^e <= a < 10^(e+1)
    loop {
        let lo = pow10(e);
        if a < lo {
            e -= 1;
            continue;
        }
        if a >= pow10(e + 1) {
            e += 1;
            continue;
        }
        break;
    }
    let scale = pow10(digits as i64 - 1 - e);
    let scaled = &a * &scale;
    let (qi, r) = scaled.numer().div_rem(scaled.denom());
    let mut m = qi;
    if r * 2 >= *scaled.denom() {
        m += 1;
    }
    let mut ds = m.to_string();
    let mut e = e;
    if ds.len() > digits {
        ds.truncate(digits);
        e += 1;
    }
    let body = place_point(&ds, e);
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn pow10(e: i64) -> BigRational {
    let p = BigInt::from(10).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn place_point(ds: &str, e: i64) -> String {
    let trimmed = ds.trim_end_matches('0');
    let ds = if trimmed.is_empty() { "0" } else { trimmed };
    if (-6..=24).contains(&e) {
        if e >= 0 {
            let e = e as usize;
            if ds.len() <= e + 1 {
                format!("{}{}", ds, "0".repeat(e + 1 - ds.len()))
            } else {
                format!("{}.{}", &ds[..e + 1], &ds[e + 1..])
            }
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), ds)
        }
    } else if ds.len() == 1 {
        format!("{ds}e{e}")
    } else {
        format!("{}.{}e{}", &ds[..1], &ds[1..], e)
    }
}

/// Midpoint of a ball as a decimal string.
pub fn format_ball_mid(b: &Ball, digits: usize) -> String {
    format_rational(&b.mid_rational(), digits)
}

/// An upper bound of a magnitude as a short decimal string.
pub fn format_mag(m: &Mag) -> String {
    if m.is_inf() {
        return "inf".to_string();
    }
    if m.is_zero() {
        return "0".to_string();
    }
    // round up in the last printed digit
    let l10 = m.log2() * std::f64::consts::LOG10_2;
    let e = l10.floor() as i64;
    let lead = 10f64.powf(l10 - e as f64);
    let lead = (lead * 100.0).ceil() / 100.0 + 0.01;
    let (lead, e) = if lead >= 10.0 { (lead / 10.0, e + 1) } else { (lead, e) };
    format!("{lead:.2}e{e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("3/8").unwrap(), BigRational::new(3.into(), 8.into()));
        assert_eq!(parse_rational("-1.25e-1").unwrap(), BigRational::new((-1).into(), 8.into()));
        assert_eq!(parse_rational("12").unwrap(), BigRational::from_integer(12.into()));
        assert_eq!(parse_rational(".5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn formats_forms() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(format_rational(&q(1, 3), 5), "0.33333");
        assert_eq!(format_rational(&q(-2, 3), 3), "-0.667");
        assert_eq!(format_rational(&q(1000, 1), 10), "1000");
        assert_eq!(format_rational(&q(999999, 1000000), 3), "1");
        assert_eq!(format_rational(&q(1, 1_000_000_000), 3), "1e-9");
        assert_eq!(format_rational(&q(11, 8), 10), "1.375");
    }

    #[test]
    fn decimal_roundtrip_at_precision() {
        let x = Ball::frac(22, 7, 128);
        let s = format_ball_mid(&x, digits_for_bits(128));
        let y = parse_decimal(&s, 128).unwrap();
        assert!((&x - &y).abs_upper().log2() < -125.0);
    }

    #[test]
    fn mag_format_is_upper() {
        let m = Mag::from_f64(1.234e-20);
        let s = format_mag(&m);
        let v: f64 = s.parse().unwrap();
        assert!(v >= 1.234e-20);
    }
}
