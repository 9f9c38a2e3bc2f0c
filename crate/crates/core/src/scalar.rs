//! Exact scalars: complex numbers with rational real and imaginary parts.
//!
//! Text form follows a small fixed grammar shared by every file format:
//!
//! ```text
//! RATIONAL := ["-"] digits ["/" digits]
//! SCALAR   := RATIONAL | RATIONAL "*i" | RATIONAL ("+"|"-") RATIONAL "*i" | "i" | "-i"
//! ```
//!
//! Formatting always produces the shortest canonical spelling, so
//! `parse(format(x)) == x` and equal values print identically.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// An element of Q(i). Both parts are kept in lowest terms by `BigRational`,
/// so derived equality is structural equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(Rational::from_integer(n.into()), Rational::zero())
    }

    /// `num/den` as a real scalar. Panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::new(num.into(), den.into()), Rational::zero())
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            Rational::new(re.0.into(), re.1.into()),
            Rational::new(im.0.into(), im.1.into()),
        )
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|^2, a nonnegative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale_int(&self, k: i64) -> Self {
        let k = Rational::from_integer(BigInt::from(k));
        Self::new(&self.re * &k, &self.im * &k)
    }

    /// Sign factor helper: `self` if `positive`, otherwise `-self`.
    pub fn signed(self, positive: bool) -> Self {
        if positive {
            self
        } else {
            -self
        }
    }
}

impl Default for GaussianRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::new(r, Rational::zero())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        GaussianRational::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        GaussianRational::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        if self.im.is_zero() && rhs.im.is_zero() {
            return GaussianRational::new(&self.re * &rhs.re, Rational::zero());
        }
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write_rational(f, &self.re);
        }
        if self.re.is_zero() {
            if self.im.is_one() {
                return write!(f, "i");
            }
            if (-&self.im).is_one() {
                return write!(f, "-i");
            }
            write_rational(f, &self.im)?;
            return write!(f, "*i");
        }
        write_rational(f, &self.re)?;
        if self.im.is_negative() {
            write!(f, "-")?;
            write_rational(f, &-self.im.clone())?;
        } else {
            write!(f, "+")?;
            write_rational(f, &self.im)?;
        }
        write!(f, "*i")
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Parses `RATIONAL := ["-"] digits ["/" digits]`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::ScalarSyntax(s.to_string());
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let value = match body.split_once('/') {
        Some((n, d)) => {
            let n = parse_digits(n).ok_or_else(bad)?;
            let d = parse_digits(d).ok_or_else(bad)?;
            if d.is_zero() {
                return Err(bad());
            }
            Rational::new(n, d)
        }
        None => Rational::from_integer(parse_digits(body).ok_or_else(bad)?),
    };
    Ok(if neg { -value } else { value })
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => return Ok(Self::i()),
            "-i" => return Ok(-Self::i()),
            _ => {}
        }
        let Some(body) = s.strip_suffix("*i") else {
            return Ok(parse_rational(s)?.into());
        };
        // a split point is a sign that is not the leading character
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        match split {
            Some(k) => {
                let re = parse_rational(&body[..k])?;
                let im_str = &body[k..];
                let im = parse_rational(im_str.strip_prefix('+').unwrap_or(im_str))
                    .map_err(|_| Error::ScalarSyntax(s.to_string()))?;
                if im_str.starts_with("+-") {
                    return Err(Error::ScalarSyntax(s.to_string()));
                }
                Ok(Self::new(re, im))
            }
            None => Ok(Self::new(Rational::zero(), parse_rational(body)?)),
        }
    }
}

impl serde::Serialize for GaussianRational {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GaussianRational {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    #[test]
    fn field_examples() {
        assert_eq!(&g("1+1*i") * &g("1-1*i"), g("2"));
        assert_eq!(g("3/2-2*i").conj(), g("3/2+2*i"));
        assert_eq!(g("1/3").checked_div(&g("1/6")).unwrap(), g("2"));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(g("5").checked_div(&GaussianRational::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn canonical_spelling() {
        assert_eq!(g("i").to_string(), "i");
        assert_eq!(g("-i").to_string(), "-i");
        assert_eq!(g("0*i").to_string(), "0");
        assert_eq!(g("2/4").to_string(), "1/2");
        assert_eq!(g("-3/2*i").to_string(), "-3/2*i");
        assert_eq!(g("1-1*i").to_string(), "1-1*i");
        assert_eq!(g("-1/2+7/3*i").to_string(), "-1/2+7/3*i");
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "-", "1/", "1/0", "4/-2", "1.5", "+1", "2i", "1+i", "1+-2*i", "*i", "a"] {
            assert!(bad.parse::<GaussianRational>().is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn text_round_trip(a in -50i64..50, b in 1i64..30, c in -50i64..50, d in 1i64..30) {
            let z = GaussianRational::from_parts((a, b), (c, d));
            prop_assert_eq!(z.to_string().parse::<GaussianRational>().unwrap(), z);
        }

        #[test]
        fn inverse_is_exact(a in -20i64..20, c in -20i64..20) {
            let z = GaussianRational::from_parts((a, 3), (c, 7));
            prop_assume!(!z.is_zero());
            prop_assert!((&z * &z.inv().unwrap()).is_one());
        }
    }
}
