//! Exact nonnegative rational amounts.
//!
//! Every inflow, allocation and rule parameter in the engine is a [`Quantity`].
//! Values are kept in lowest terms with a positive denominator (the
//! normalization `num_rational::BigRational` already performs) and can never
//! be negative: subtraction behaves like unsigned integer subtraction and
//! panics on underflow, with [`Quantity::checked_sub`] as the fallible form.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Quantity(BigRational);

/// How [`Quantity::to_decimal`] resolves digits beyond the requested precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// Round to nearest, ties away from zero.
    HalfUp,
    Floor,
    Ceil,
}

impl Quantity {
    pub fn zero() -> Self {
        Quantity(BigRational::zero())
    }

    pub fn one() -> Self {
        Quantity(BigRational::one())
    }

    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InvalidQuantity(value.to_string()));
        }
        Ok(Quantity(value))
    }

    /// `numer / denom`. Panics if `denom` is zero.
    pub fn frac(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "quantity with zero denominator");
        Quantity(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn integer(value: u64) -> Self {
        Quantity(BigRational::from_integer(BigInt::from(value)))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn into_ratio(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> BigUint {
        self.0.numer().magnitude().clone()
    }

    pub fn denom(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn checked_sub(&self, rhs: &Quantity) -> Option<Quantity> {
        let diff = &self.0 - &rhs.0;
        (!diff.is_negative()).then_some(Quantity(diff))
    }

    pub fn checked_div(&self, rhs: &Quantity) -> Option<Quantity> {
        (!rhs.is_zero()).then(|| Quantity(&self.0 / &rhs.0))
    }

    pub fn abs_diff(&self, rhs: &Quantity) -> Quantity {
        Quantity((&self.0 - &rhs.0).abs())
    }

    /// `1 - self`; `None` when `self > 1`.
    pub fn complement(&self) -> Option<Quantity> {
        Quantity::one().checked_sub(self)
    }

    pub fn pow(&self, exp: u32) -> Quantity {
        Quantity(Pow::pow(&self.0, exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Decimal text with exactly `decimals` digits after the point.
    pub fn to_decimal(&self, decimals: u32, rounding: Rounding) -> String {
        let scale = BigInt::from(10u32).pow(decimals);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        let (whole, rem) = scaled.numer().div_rem(scaled.denom());
        let units = match rounding {
            Rounding::Floor => whole,
            Rounding::Ceil if rem.is_zero() => whole,
            Rounding::Ceil => whole + 1,
            Rounding::HalfUp if rem.clone() * 2 >= *scaled.denom() => whole + 1,
            Rounding::HalfUp => whole,
        };
        format_units(&units, &scale, decimals)
    }

    /// Plain decimal when the value terminates in base ten (`16.8`, `26`),
    /// `p/q` otherwise. Parses back to the same value.
    pub fn to_text(&self) -> String {
        let mut rest = self.0.denom().clone();
        let (two, five) = (BigInt::from(2u32), BigInt::from(5u32));
        let (mut twos, mut fives) = (0u32, 0u32);
        while (&rest % &two).is_zero() {
            rest /= &two;
            twos += 1;
        }
        while (&rest % &five).is_zero() {
            rest /= &five;
            fives += 1;
        }
        if rest.is_one() {
            self.to_decimal(twos.max(fives), Rounding::Floor)
        } else {
            self.to_string()
        }
    }

    pub fn round_half_up(&self, decimals: u32) -> String {
        self.to_decimal(decimals, Rounding::HalfUp)
    }
}

fn format_units(units: &BigInt, scale: &BigInt, decimals: u32) -> String {
    let (int_part, frac_part) = units.div_rem(scale);
    if decimals == 0 {
        int_part.to_string()
    } else {
        format!(
            "{}.{:0>width$}",
            int_part,
            frac_part.to_string(),
            width = decimals as usize
        )
    }
}

impl fmt::Display for Quantity {
    /// Exact form: `p` for integers, `p/q` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Quantity({self})")
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for Quantity {
    type Err = Error;

    /// Accepts `12`, `16.8`, `.5`, `3.` and `p/q`; decimals are read exactly.
    fn from_str(text: &str) -> Result<Self> {
        let s = text.trim();
        let invalid = || Error::InvalidQuantity(text.to_string());
        if let Some((numer, denom)) = s.split_once('/') {
            let numer = parse_digits(numer.trim()).ok_or_else(invalid)?;
            let denom = parse_digits(denom.trim()).ok_or_else(invalid)?;
            if denom.is_zero() {
                return Err(invalid());
            }
            return Ok(Quantity(BigRational::new(numer, denom)));
        }
        let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(invalid());
        }
        let int_value = if int_part.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int_part).ok_or_else(invalid)?
        };
        if frac_part.is_empty() {
            return Ok(Quantity(BigRational::from_integer(int_value)));
        }
        let frac_value = parse_digits(frac_part).ok_or_else(invalid)?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        Ok(Quantity(BigRational::new(
            int_value * &scale + frac_value,
            scale,
        )))
    }
}

impl Add for Quantity {
    type Output = Quantity;
    fn add(self, rhs: Quantity) -> Quantity {
        Quantity(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Quantity> for &'a Quantity {
    type Output = Quantity;
    fn add(self, rhs: &Quantity) -> Quantity {
        Quantity(&self.0 + &rhs.0)
    }
}

impl AddAssign<&Quantity> for Quantity {
    fn add_assign(&mut self, rhs: &Quantity) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Quantity {
    fn add_assign(&mut self, rhs: Quantity) {
        self.0 += rhs.0;
    }
}

impl<'a> Sub<&'a Quantity> for &'a Quantity {
    type Output = Quantity;
    /// Panics if the result would be negative.
    fn sub(self, rhs: &Quantity) -> Quantity {
        self.checked_sub(rhs)
            .unwrap_or_else(|| panic!("quantity underflow: {self} - {rhs}"))
    }
}

impl Sub for Quantity {
    type Output = Quantity;
    fn sub(self, rhs: Quantity) -> Quantity {
        &self - &rhs
    }
}

impl<'a> Mul<&'a Quantity> for &'a Quantity {
    type Output = Quantity;
    fn mul(self, rhs: &Quantity) -> Quantity {
        Quantity(&self.0 * &rhs.0)
    }
}

impl Mul for Quantity {
    type Output = Quantity;
    fn mul(self, rhs: Quantity) -> Quantity {
        Quantity(self.0 * rhs.0)
    }
}

impl<'a> Div<&'a Quantity> for &'a Quantity {
    type Output = Quantity;
    /// Panics on division by zero.
    fn div(self, rhs: &Quantity) -> Quantity {
        self.checked_div(rhs).expect("quantity division by zero")
    }
}

impl Div for Quantity {
    type Output = Quantity;
    fn div(self, rhs: Quantity) -> Quantity {
        &self / &rhs
    }
}

impl Sum for Quantity {
    fn sum<I: Iterator<Item = Quantity>>(iter: I) -> Quantity {
        iter.fold(Quantity::zero(), |acc, q| acc + q)
    }
}

impl<'a> Sum<&'a Quantity> for Quantity {
    fn sum<I: Iterator<Item = &'a Quantity>>(iter: I) -> Quantity {
        iter.fold(Quantity::zero(), |mut acc, q| {
            acc += q;
            acc
        })
    }
}

impl From<u64> for Quantity {
    fn from(value: u64) -> Self {
        Quantity::integer(value)
    }
}

impl Serialize for Quantity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Quantity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for building quantities in tests and fixtures: `q("5/2")`.
///
/// Panics on malformed input.
pub fn q(text: &str) -> Quantity {
    text.parse()
        .unwrap_or_else(|e| panic!("bad quantity literal {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decimal_strings_parse_exactly() {
        assert_eq!(q("16.8"), Quantity::frac(84, 5));
        assert_eq!(q("0.7"), Quantity::frac(7, 10));
        assert_eq!(q("121.66"), Quantity::frac(6083, 50));
        assert_eq!(q(".5"), Quantity::frac(1, 2));
        assert_eq!(q("3."), Quantity::integer(3));
        assert_eq!(q("0"), Quantity::zero());
    }

    #[test]
    fn fractions_are_reduced() {
        let x = q("168/10");
        assert_eq!(x.numer(), BigUint::from(84u32));
        assert_eq!(x.denom(), BigUint::from(5u32));
        assert_eq!(x.to_string(), "84/5");
        assert_eq!(q("26/1").to_string(), "26");
    }

    #[test]
    fn rejects_malformed_and_negative() {
        for bad in ["", "-1", "1/0", "abc", "1.2.3", "1/-2", ".", "1e3", "+-2"] {
            assert!(
                bad.parse::<Quantity>().is_err(),
                "{bad:?} should be rejected"
            );
        }
        assert!(Quantity::new(BigRational::from_integer((-1).into())).is_err());
    }

    #[test]
    fn half_up_rounding() {
        assert_eq!(q("12.5").round_half_up(0), "13");
        assert_eq!(q("20.975").round_half_up(2), "20.98");
        assert_eq!(q("17.3875").round_half_up(2), "17.39");
        assert_eq!(q("1992/150").round_half_up(2), "13.28");
        assert_eq!(q("0").round_half_up(2), "0.00");
        assert_eq!(q("1/200").round_half_up(2), "0.01");
        assert_eq!(q("1/3").round_half_up(4), "0.3333");
    }

    #[test]
    fn plain_text_form() {
        assert_eq!(q("84/5").to_text(), "16.8");
        assert_eq!(q("26").to_text(), "26");
        assert_eq!(q("1/3").to_text(), "1/3");
        assert_eq!(q("3/40").to_text(), "0.075");
        assert_eq!(q("0").to_text(), "0");
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(q("17.3875").to_decimal(2, Rounding::Floor), "17.38");
        assert_eq!(q("17.3875").to_decimal(2, Rounding::Ceil), "17.39");
        assert_eq!(q("4.2").to_decimal(2, Rounding::Ceil), "4.20");
    }

    #[test]
    #[should_panic(expected = "quantity underflow")]
    fn subtraction_underflow_panics() {
        let _ = q("1") - q("2");
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(n in 0u64..1_000_000, d in 1u64..10_000) {
            let x = Quantity::frac(n, d);
            prop_assert_eq!(x.to_string().parse::<Quantity>().unwrap(), x.clone());
            prop_assert_eq!(x.to_text().parse::<Quantity>().unwrap(), x);
        }

        #[test]
        fn rounding_stays_within_half_unit(n in 0u64..1_000_000, d in 1u64..10_000) {
            let x = Quantity::frac(n, d);
            let rounded = q(&x.round_half_up(2));
            prop_assert!(rounded.abs_diff(&x) <= Quantity::frac(1, 200));
        }
    }
}
