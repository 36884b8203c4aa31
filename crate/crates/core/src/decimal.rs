//! Signed fixed-point decimal with 18 fractional digits.
//!
//! Values are stored as an `i128` count of 10⁻¹⁸ units. Addition and
//! subtraction are exact and checked. Multiplication and division go through
//! an exact rational intermediate and round half-to-even back to 18 digits;
//! the [`Rounded`] wrapper reports whether that rounding discarded anything.

use alloc::string::String;
use core::cmp::Ordering;
use core::fmt::{self, Write as _};
use core::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Number of fractional digits carried by every [`Decimal`].
pub const SCALE: u32 = 18;

const UNIT: i128 = 1_000_000_000_000_000_000;

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decimal(i128);

/// Result of an operation that may have rounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rounded {
    pub value: Decimal,
    /// `true` when no digits beyond the 18th were discarded.
    pub exact: bool,
}

impl Decimal {
    pub const ZERO: Decimal = Decimal(0);
    pub const ONE: Decimal = Decimal(UNIT);
    /// Smallest representable positive step, 10⁻¹⁸.
    pub const EPSILON: Decimal = Decimal(1);

    pub const fn from_raw(raw: i128) -> Self {
        Decimal(raw)
    }

    /// Raw count of 10⁻¹⁸ units.
    pub const fn raw(self) -> i128 {
        self.0
    }

    pub const fn from_int(n: i64) -> Self {
        Decimal(n as i128 * UNIT)
    }

    /// `mantissa · 10^-exponent`, e.g. `from_parts(24, 2)` is 0.24.
    pub fn from_parts(mantissa: i64, exponent: u32) -> Result<Self> {
        if exponent > SCALE {
            return Err(Error::Overflow);
        }
        let factor = 10i128.pow(SCALE - exponent);
        (mantissa as i128)
            .checked_mul(factor)
            .map(Decimal)
            .ok_or(Error::Overflow)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    pub fn abs(self) -> Self {
        Decimal(self.0.abs())
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        self.0.checked_add(rhs.0).map(Decimal).ok_or(Error::Overflow)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        self.0.checked_sub(rhs.0).map(Decimal).ok_or(Error::Overflow)
    }

    pub fn checked_neg(self) -> Result<Self> {
        self.0.checked_neg().map(Decimal).ok_or(Error::Overflow)
    }

    /// Exact product of `self` and an integer.
    pub fn checked_mul_int(self, n: i64) -> Result<Self> {
        self.0
            .checked_mul(n as i128)
            .map(Decimal)
            .ok_or(Error::Overflow)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Self) -> Result<Rounded> {
        match self.0.checked_mul(rhs.0).and_then(|n| div_half_even(n, UNIT)) {
            Some(r) => Ok(r),
            None => Self::from_rational(&(self.to_rational() * rhs.to_rational())),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Self) -> Result<Rounded> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self.0.checked_mul(UNIT).and_then(|n| div_half_even(n, rhs.0)) {
            Some(r) => Ok(r),
            None => Self::from_rational(&(self.to_rational() / rhs.to_rational())),
        }
    }

    /// Exact rational value of this decimal.
    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(UNIT))
    }

    /// Nearest decimal to `r`, ties to even.
    pub fn from_rational(r: &BigRational) -> Result<Rounded> {
        let scaled = r.numer() * BigInt::from(UNIT);
        let den = r.denom();
        let (mut q, rem) = scaled.div_mod_floor(den);
        let exact = rem.is_zero();
        if !exact {
            let twice: BigInt = rem * 2u8;
            match twice.cmp(den) {
                Ordering::Greater => q += 1u8,
                Ordering::Equal if q.is_odd() => q += 1u8,
                _ => {}
            }
        }
        let raw = q.to_i128().ok_or(Error::Overflow)?;
        Ok(Rounded {
            value: Decimal(raw),
            exact,
        })
    }

    /// Round half-to-even to `dp` fractional digits.
    pub fn round_dp(self, dp: u32) -> Self {
        if dp >= SCALE {
            return self;
        }
        let step = 10i128.pow(SCALE - dp);
        let q = self.0.div_euclid(step);
        let rem = self.0.rem_euclid(step);
        let q = match (rem * 2).cmp(&step) {
            Ordering::Greater => q + 1,
            Ordering::Equal if q % 2 != 0 => q + 1,
            _ => q,
        };
        Decimal(q * step)
    }

    /// Truncate toward zero to `dp` fractional digits.
    pub fn trunc_dp(self, dp: u32) -> Self {
        if dp >= SCALE {
            return self;
        }
        let step = 10i128.pow(SCALE - dp);
        Decimal(self.0 / step * step)
    }

    /// Number of fractional digits needed to write this value exactly.
    pub fn fraction_digits(self) -> u32 {
        let mut frac = (self.0 % UNIT).unsigned_abs();
        if frac == 0 {
            return 0;
        }
        let mut digits = SCALE;
        while frac.is_multiple_of(10) {
            frac /= 10;
            digits -= 1;
        }
        digits
    }

    /// Fixed rendering with exactly `dp` fractional digits (half-even).
    pub fn to_fixed(self, dp: u32) -> String {
        let dp = dp.min(SCALE);
        let mut out = String::new();
        write_digits(&mut out, self.round_dp(dp), dp, false);
        out
    }

    /// Truncated to `dp` fractional digits with trailing zeros removed.
    pub fn to_trimmed(self, dp: u32) -> String {
        let dp = dp.min(SCALE);
        let mut out = String::new();
        write_digits(&mut out, self.trunc_dp(dp), dp, true);
        out
    }
}

/// `n / d` rounded half-to-even, or `None` if the native arithmetic would
/// overflow. `d` must be non-zero.
fn div_half_even(n: i128, d: i128) -> Option<Rounded> {
    let (n, d) = if d < 0 { (n.checked_neg()?, d.checked_neg()?) } else { (n, d) };
    let q = n.div_euclid(d);
    let r = n.rem_euclid(d);
    let q = match (2 * r as u128).cmp(&(d as u128)) {
        Ordering::Greater => q + 1,
        Ordering::Equal if q % 2 != 0 => q + 1,
        _ => q,
    };
    Some(Rounded {
        value: Decimal(q),
        exact: r == 0,
    })
}

fn write_digits(out: &mut String, value: Decimal, dp: u32, trim: bool) {
    use core::fmt::Write;
    let neg = value.0 < 0;
    let abs = value.0.unsigned_abs();
    let int = abs / UNIT as u128;
    let frac = abs % UNIT as u128;
    let mut frac_digits = alloc::format!("{:018}", frac);
    frac_digits.truncate(dp as usize);
    if trim {
        while frac_digits.ends_with('0') {
            frac_digits.pop();
        }
    }
    if neg && (int != 0 || frac_digits.bytes().any(|b| b != b'0')) {
        out.push('-');
    }
    let _ = write!(out, "{int}");
    if !frac_digits.is_empty() {
        out.push('.');
        out.push_str(&frac_digits);
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match f.precision() {
            Some(dp) => self.to_fixed(dp as u32),
            None => self.to_trimmed(SCALE),
        };
        // `pad` would treat the precision as a length cap
        let fill = f.width().unwrap_or(0).saturating_sub(s.len());
        let (before, after) = match f.align() {
            Some(fmt::Alignment::Left) => (0, fill),
            Some(fmt::Alignment::Center) => (fill / 2, fill - fill / 2),
            _ => (fill, 0),
        };
        for _ in 0..before {
            f.write_char(f.fill())?;
        }
        f.write_str(&s)?;
        for _ in 0..after {
            f.write_char(f.fill())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_trimmed(SCALE))
    }
}

impl FromStr for Decimal {
    type Err = Error;

    /// Parses `[+-]digits[.digits]` with at most 18 fractional digits.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseDecimal(String::from(s));
        let t = s.trim();
        let (neg, body) = match t.as_bytes().first() {
            Some(b'-') => (true, &t[1..]),
            Some(b'+') => (false, &t[1..]),
            _ => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > SCALE as usize
        {
            return Err(bad());
        }
        let mut raw: i128 = 0;
        for b in int_part.bytes() {
            raw = raw
                .checked_mul(10)
                .and_then(|r| r.checked_add((b - b'0') as i128))
                .ok_or(Error::Overflow)?;
        }
        raw = raw.checked_mul(UNIT).ok_or(Error::Overflow)?;
        let mut frac: i128 = 0;
        for b in frac_part.bytes() {
            frac = frac * 10 + (b - b'0') as i128;
        }
        frac *= 10i128.pow(SCALE - frac_part.len() as u32);
        raw = raw.checked_add(frac).ok_or(Error::Overflow)?;
        Ok(Decimal(if neg { -raw } else { raw }))
    }
}

/// Convert an exact rational to a decimal only if it is representable.
pub fn exact_from_rational(r: &BigRational) -> Option<Decimal> {
    let rounded = Decimal::from_rational(r).ok()?;
    rounded.exact.then_some(rounded.value)
}

/// `|r|` compared against a decimal tolerance without rounding.
pub fn within(r: &BigRational, tolerance: Decimal) -> bool {
    r.abs() <= tolerance.to_rational()
}

pub(crate) fn rational_one() -> BigRational {
    BigRational::one()
}

pub(crate) fn rational_zero() -> BigRational {
    BigRational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Decimal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_and_prints() {
        assert_eq!(d("3000").to_string(), "3000");
        assert_eq!(d("0.00008").to_string(), "0.00008");
        assert_eq!(d("-1500.50").to_string(), "-1500.5");
        assert_eq!(d("+.5").to_string(), "0.5");
        assert_eq!(d("0.000000000000000001"), Decimal::EPSILON);
        assert!("0.0000000000000000001".parse::<Decimal>().is_err());
        assert!("1e3".parse::<Decimal>().is_err());
        assert!("".parse::<Decimal>().is_err());
        assert!("-".parse::<Decimal>().is_err());
        assert!("1.2.3".parse::<Decimal>().is_err());
    }

    #[test]
    fn overflow_is_an_error() {
        let max = Decimal::from_raw(i128::MAX);
        assert_eq!(max.checked_add(Decimal::EPSILON), Err(Error::Overflow));
        assert_eq!(
            "999999999999999999999999".parse::<Decimal>(),
            Err(Error::Overflow)
        );
        assert!(max.mul(d("2")).is_err());
    }

    #[test]
    fn division_rounds_half_even() {
        let r = d("0.34").div(d("3000")).unwrap();
        assert!(!r.exact);
        assert_eq!(r.value.to_string(), "0.000113333333333333");
        let r = d("0.24").div(d("3000")).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, d("0.00008"));
        // 2.5e-18 / 1 → tie, even → 2e-18
        let half = Decimal::from_raw(5).div(d("2")).unwrap();
        assert_eq!(half.value.raw(), 2);
        let half = Decimal::from_raw(7).div(d("2")).unwrap();
        assert_eq!(half.value.raw(), 4);
        let neg = Decimal::from_raw(-5).div(d("2")).unwrap();
        assert_eq!(neg.value.raw(), -2);
        assert_eq!(d("1").div(Decimal::ZERO), Err(Error::DivisionByZero));
    }

    #[test]
    fn multiplication_is_exact_when_digits_fit() {
        let r = d("0.00008").mul(d("3000")).unwrap();
        assert!(r.exact);
        assert_eq!(r.value, d("0.24"));
        let r = d("0.000000001").mul(d("0.0000000001")).unwrap();
        assert!(!r.exact);
        assert_eq!(r.value, Decimal::ZERO);
    }

    #[test]
    fn native_path_matches_rational_path() {
        let samples = [
            "0", "1", "-1", "3", "0.34", "-0.000000000000000001", "3000", "0.000113333333333333",
            "123456789.123456789", "-98765.4321", "7", "0.5", "-2.5", "170141183460469231731",
        ];
        for a in samples {
            for b in samples {
                let (a, b) = (d(a), d(b));
                let slow = Decimal::from_rational(&(a.to_rational() * b.to_rational()));
                assert_eq!(a.mul(b).ok(), slow.ok(), "{a} * {b}");
                if !b.is_zero() {
                    let slow = Decimal::from_rational(&(a.to_rational() / b.to_rational()));
                    assert_eq!(a.div(b).ok(), slow.ok(), "{a} / {b}");
                }
            }
        }
    }

    #[test]
    fn display_helpers() {
        assert_eq!(format!("{:>8.2}|{:<6}|", d("1.5"), d("2")), "    1.50|2     |");
        let q = d("0.000113333333333333");
        assert_eq!(q.to_trimmed(7), "0.0001133");
        assert_eq!(d("3").to_fixed(2), "3.00");
        assert_eq!(d("0.345").to_fixed(2), "0.34");
        assert_eq!(d("0.355").to_fixed(2), "0.36");
        assert_eq!(format!("{:.2}", d("1.02")), "1.02");
        assert_eq!(d("-0.0000001").to_trimmed(3), "0");
        assert_eq!(d("12.5").fraction_digits(), 1);
        assert_eq!(d("12").fraction_digits(), 0);
        assert_eq!(Decimal::EPSILON.fraction_digits(), 18);
    }

    #[test]
    fn from_parts_scales() {
        assert_eq!(Decimal::from_parts(24, 2).unwrap(), d("0.24"));
        assert_eq!(Decimal::from_parts(-3, 0).unwrap(), d("-3"));
        assert!(Decimal::from_parts(1, 19).is_err());
    }
}
