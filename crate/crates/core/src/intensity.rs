//! Fixed-point quantities with six fractional decimal digits.
//!
//! All intensity arithmetic happens on integer counts of millionths so that
//! summation is exact and independent of order. `1.0` is `1_000_000` micro.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of micro units in `1.0`.
pub const MICRO: i64 = 1_000_000;

const FRACTION_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecimalError {
    #[error("empty decimal literal")]
    Empty,
    #[error("invalid character in decimal literal `{0}`")]
    InvalidCharacter(String),
    #[error("more than six fractional digits in `{0}`")]
    TooPrecise(String),
    #[error("decimal literal `{0}` is out of range")]
    Overflow(String),
    #[error("negative value `{0}` where a non-negative one is required")]
    Negative(String),
}

/// Parses `[-]digits[.digits]` into signed micro units, exactly.
pub fn parse_micro(text: &str) -> Result<i64, DecimalError> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    if body.is_empty() {
        return Err(DecimalError::Empty);
    }
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
        || (body.contains('.') && frac_part.is_empty())
    {
        return Err(DecimalError::InvalidCharacter(text.to_owned()));
    }
    if frac_part.len() > FRACTION_DIGITS {
        return Err(DecimalError::TooPrecise(text.to_owned()));
    }
    let overflow = || DecimalError::Overflow(text.to_owned());
    let mut whole: i64 = 0;
    for b in int_part.bytes() {
        whole = whole
            .checked_mul(10)
            .and_then(|w| w.checked_add(i64::from(b - b'0')))
            .ok_or_else(overflow)?;
    }
    let mut frac: i64 = 0;
    for (i, b) in frac_part.bytes().enumerate() {
        frac += i64::from(b - b'0') * 10i64.pow((FRACTION_DIGITS - 1 - i) as u32);
    }
    let magnitude = whole
        .checked_mul(MICRO)
        .and_then(|w| w.checked_add(frac))
        .ok_or_else(overflow)?;
    Ok(if negative { -magnitude } else { magnitude })
}

/// Formats signed micro units as `[-]i.ffffff`.
pub fn format_micro(micro: i64) -> String {
    let sign = if micro < 0 { "-" } else { "" };
    let abs = micro.unsigned_abs();
    format!("{sign}{}.{:06}", abs / MICRO as u64, abs % MICRO as u64)
}

/// Formats signed micro units with an explicit sign, `+0.500000` / `-0.250000`.
pub fn format_signed_micro(micro: i64) -> String {
    if micro < 0 {
        format_micro(micro)
    } else {
        format!("+{}", format_micro(micro))
    }
}

/// Non-negative degree of strength attached to an EoCoS.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Intensity(u64);

impl Intensity {
    pub const ZERO: Intensity = Intensity(0);
    pub const ONE: Intensity = Intensity(MICRO as u64);
    /// Smallest positive representable intensity.
    pub const EPSILON: Intensity = Intensity(1);

    pub const fn from_micro(micro: u64) -> Self {
        Intensity(micro)
    }

    pub const fn micro(self) -> u64 {
        self.0
    }

    /// Whole units, e.g. `Intensity::from_units(3)` is `3.000000`.
    pub const fn from_units(units: u64) -> Self {
        Intensity(units * MICRO as u64)
    }

    /// Absolute difference.
    pub fn abs_diff(self, other: Intensity) -> Intensity {
        Intensity(self.0.abs_diff(other.0))
    }

    /// Adds a signed micro amount and clamps the result into `[0, cap]`.
    pub fn offset_clamped(self, delta: i128, cap: Intensity) -> Intensity {
        let raw = i128::from(self.0) + delta;
        Intensity(raw.clamp(0, i128::from(cap.0)) as u64)
    }
}

impl fmt::Display for Intensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let micro = MICRO as u64;
        write!(f, "{}.{:06}", self.0 / micro, self.0 % micro)
    }
}

impl FromStr for Intensity {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let micro = parse_micro(s)?;
        if micro < 0 {
            return Err(DecimalError::Negative(s.to_owned()));
        }
        Ok(Intensity(micro as u64))
    }
}

/// Signed fixed-point multiplier used for montage coefficients and thresholds.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Coefficient(i64);

impl Coefficient {
    pub const ZERO: Coefficient = Coefficient(0);
    pub const ONE: Coefficient = Coefficient(MICRO);

    pub const fn from_micro(micro: i64) -> Self {
        Coefficient(micro)
    }

    pub const fn micro(self) -> i64 {
        self.0
    }

    pub fn is_negative(self) -> bool {
        self.0 < 0
    }

    /// `self · intensity`, truncated toward zero to whole micro units.
    ///
    /// The product is formed exactly in 128-bit arithmetic before the single
    /// truncating division, so the result never exceeds the rational value in
    /// magnitude.
    pub fn scale(self, intensity: Intensity) -> i64 {
        let product = i128::from(self.0) * i128::from(intensity.0) / i128::from(MICRO);
        product.clamp(i128::from(i64::MIN), i128::from(i64::MAX)) as i64
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_micro(self.0))
    }
}

impl FromStr for Coefficient {
    type Err = DecimalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_micro(s).map(Coefficient)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_micro_values() {
        assert_eq!(parse_micro("1"), Ok(1_000_000));
        assert_eq!(parse_micro("0.5"), Ok(500_000));
        assert_eq!(parse_micro("10.000001"), Ok(10_000_001));
        assert_eq!(parse_micro("-0.25"), Ok(-250_000));
        assert_eq!(parse_micro("0.000001"), Ok(1));
    }

    #[test]
    fn rejects_malformed_decimals() {
        assert!(matches!(parse_micro(""), Err(DecimalError::Empty)));
        assert!(matches!(parse_micro("-"), Err(DecimalError::Empty)));
        assert!(matches!(
            parse_micro("1."),
            Err(DecimalError::InvalidCharacter(_))
        ));
        assert!(matches!(
            parse_micro(".5"),
            Err(DecimalError::InvalidCharacter(_))
        ));
        assert!(matches!(
            parse_micro("1e3"),
            Err(DecimalError::InvalidCharacter(_))
        ));
        assert!(matches!(
            parse_micro("0.1234567"),
            Err(DecimalError::TooPrecise(_))
        ));
        assert!(matches!(
            parse_micro("99999999999999999999"),
            Err(DecimalError::Overflow(_))
        ));
        assert!(matches!(
            "-1".parse::<Intensity>(),
            Err(DecimalError::Negative(_))
        ));
    }

    #[test]
    fn formats_with_six_digits() {
        assert_eq!(Intensity::from_micro(1_500_000).to_string(), "1.500000");
        assert_eq!(format_micro(-250_000), "-0.250000");
        assert_eq!(format_signed_micro(500_000), "+0.500000");
        assert_eq!(format_signed_micro(0), "+0.000000");
        assert_eq!(format_signed_micro(-1), "-0.000001");
    }

    #[test]
    fn scale_truncates_toward_zero() {
        // 1/3 · 1 micro = 0.333.. micro -> 0
        let third = Coefficient::from_micro(333_333);
        assert_eq!(third.scale(Intensity::from_micro(1)), 0);
        assert_eq!(third.scale(Intensity::from_micro(3)), 0);
        assert_eq!(third.scale(Intensity::from_micro(4)), 1);
        let neg = Coefficient::from_micro(-333_333);
        assert_eq!(neg.scale(Intensity::from_micro(4)), -1);
        assert_eq!(
            Coefficient::from_micro(500_000).scale(Intensity::ONE),
            500_000
        );
    }

    #[test]
    fn offset_clamps_into_range() {
        let cap = Intensity::from_units(10);
        assert_eq!(
            Intensity::ONE.offset_clamped(-2 * MICRO as i128, cap),
            Intensity::ZERO
        );
        assert_eq!(cap.offset_clamped(1, cap), cap);
        assert_eq!(
            Intensity::ONE.offset_clamped(500_000, cap),
            Intensity::from_micro(1_500_000)
        );
    }
}
