use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::MathError;

/// Exact signed rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, MathError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        Ok(Self(BigRational::new(numer.into(), denom)))
    }

    /// Panicking constructor for literals known to be valid.
    pub fn frac(numer: i64, denom: i64) -> Self {
        Self::new(numer, denom).expect("zero denominator in Rational::frac")
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        Self(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn one() -> Self {
        Self(BigRational::one())
    }

    /// Exact value of a finite double.
    pub fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Self)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Self(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, MathError> {
        if self.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        Ok(Self(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, MathError> {
        if rhs.is_zero() {
            return Err(MathError::DivisionByZero);
        }
        Ok(Self(&self.0 / &rhs.0))
    }

    pub fn pow(&self, exp: i32) -> Self {
        if exp < 0 && self.is_zero() {
            panic!("zero raised to a negative power");
        }
        Self(num_traits::Pow::pow(&self.0, exp))
    }

    /// Rational square root when `self` is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().to_biguint()?;
        let d = self.denom().to_biguint()?;
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &rn * &rn == n && &rd * &rd == d {
            Some(Self(BigRational::new(rn.into(), rd.into())))
        } else {
            None
        }
    }

    /// Nearest double (ties to even).
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering correctly rounded (half to even) to `sig` significant
    /// digits, computed from the exact value. Trailing zeros are dropped.
    pub fn to_decimal(&self, sig: usize) -> String {
        let sig = sig.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let num = self.numer().magnitude().clone();
        let den = self.denom().magnitude().clone();

        // exponent e with 10^e <= |q| < 10^(e+1)
        let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
        let ten = BigUint::from(10u32);
        let cmp_pow = |e: i64| -> Ordering {
            // compare num/den with 10^e
            if e >= 0 {
                num.cmp(&(&den * ten.pow(e as u32)))
            } else {
                (&num * ten.pow((-e) as u32)).cmp(&den)
            }
        };
        while cmp_pow(e) == Ordering::Less {
            e -= 1;
        }
        while cmp_pow(e + 1) != Ordering::Less {
            e += 1;
        }

        // digits = round(|q| * 10^(sig-1-e))
        let shift = sig as i64 - 1 - e;
        let (sn, sd) = if shift >= 0 {
            (&num * ten.pow(shift as u32), den.clone())
        } else {
            (num.clone(), &den * ten.pow((-shift) as u32))
        };
        let (mut digits, rem) = sn.div_rem(&sd);
        let twice = &rem * 2u32;
        match twice.cmp(&sd) {
            Ordering::Greater => digits += 1u32,
            Ordering::Equal if digits.is_odd() => digits += 1u32,
            _ => {}
        }
        let mut digit_str = digits.to_string();
        if digit_str.len() > sig {
            // rounding carried into a new leading digit
            e += 1;
            digit_str.truncate(sig);
        }
        let trimmed = digit_str.trim_end_matches('0');
        let trimmed = if trimmed.is_empty() { "0" } else { trimmed };

        let body = if (-6..=15).contains(&e) {
            if e >= 0 {
                let int_len = (e + 1) as usize;
                if trimmed.len() <= int_len {
                    format!("{}{}", trimmed, "0".repeat(int_len - trimmed.len()))
                } else {
                    format!("{}.{}", &trimmed[..int_len], &trimmed[int_len..])
                }
            } else {
                format!("0.{}{}", "0".repeat((-e - 1) as usize), trimmed)
            }
        } else {
            let mantissa = if trimmed.len() > 1 {
                format!("{}.{}", &trimmed[..1], &trimmed[1..])
            } else {
                trimmed.to_string()
            };
            format!("{mantissa}e{e}")
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Self(v)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigInt> for Rational {
    fn from(v: BigInt) -> Self {
        Self::from_integer(v)
    }
}

impl From<BigUint> for Rational {
    fn from(v: BigUint) -> Self {
        Self::from_integer(BigInt::from_biguint(Sign::Plus, v))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = MathError;

    /// Accepts `p`, `p/q` and plain decimals such as `-0.125` (taken exactly).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || MathError::Parse(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            return Rational::new(p, q);
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.chars().all(|c| c.is_ascii_digit())
                || !frac.chars().all(|c| c.is_ascii_digit())
                || (int_digits.is_empty() && frac.is_empty())
            {
                return Err(bad());
            }
            let digits = format!("{int_digits}{frac}");
            let mag: BigInt = if digits.is_empty() {
                BigInt::zero()
            } else {
                digits.parse().map_err(|_| bad())?
            };
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let q = Rational::new(mag, den)?;
            return Ok(if neg { -q } else { q });
        }
        let p: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational::from_integer(p))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0 $op &rhs.0)
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(&self.0 $op rhs.0)
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

// Panics on a zero divisor, like integer division; use `checked_div` when the
// divisor is not known to be nonzero.
forward_binop!(Div, div, /);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl Product for Rational {
    fn product<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::one(), |acc, x| acc * x)
    }
}

/// A real number of the form `coeff * sqrt(radicand)` with rational parts.
///
/// Overlap integrals between separately normalized radial functions carry the
/// square root of a product of normalizations; squaring stays exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub coeff: Rational,
    pub radicand: Rational,
}

impl Surd {
    pub fn new(coeff: Rational, radicand: Rational) -> Self {
        assert!(!radicand.is_negative(), "negative radicand");
        Self { coeff, radicand }
    }

    pub fn square(&self) -> Rational {
        &self.coeff * &self.coeff * &self.radicand
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero() || self.radicand.is_zero()
    }

    pub fn to_f64(&self) -> f64 {
        self.coeff.to_f64() * self.radicand.to_f64().sqrt()
    }

    /// Exact rational value when the radicand is a perfect square.
    pub fn to_rational(&self) -> Option<Rational> {
        self.radicand.sqrt_exact().map(|r| &self.coeff * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(q("1/2") + q("1/3"), q("5/6"));
        let prod = q("3/64") * Rational::zero();
        assert_eq!(prod, Rational::zero());
        assert_eq!(prod.denom(), &BigInt::one());
        assert_eq!(
            q("-159/65536").checked_div(&q("-3/65536")).unwrap(),
            Rational::from(53)
        );
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            q("1/2").checked_div(&Rational::zero()),
            Err(MathError::DivisionByZero)
        );
        assert!(Rational::new(1, 0).is_err());
        assert!(Rational::zero().recip().is_err());
    }

    #[test]
    fn canonical_form() {
        let r = Rational::new(6, -4).unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rational::new(0, -7).unwrap().to_string(), "0");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(q("7"), Rational::from(7));
        assert_eq!(q("-0.125"), q("-1/8"));
        assert_eq!(q("0.1"), q("1/10"));
        assert_eq!(q(".5"), q("1/2"));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("1.2.3".parse::<Rational>().is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(q("-159/65536").to_decimal(12), "-0.00242614746094");
        assert_eq!(q("3/64").to_decimal(12), "0.046875");
        assert_eq!(q("-2").to_decimal(12), "-2");
        assert_eq!(q("2/3").to_decimal(5), "0.66667");
        assert_eq!(q("1/8").to_decimal(2), "0.12"); // tie to even
        assert_eq!(q("3/8").to_decimal(2), "0.38");
        assert_eq!(q("999/1000").to_decimal(2), "1");
        assert_eq!(q("-3061109331/65536").to_decimal(12), "-46708.821579");
        assert_eq!(q("1/10000000000").to_decimal(3), "1e-10");
        assert_eq!(q("123456789012345678901").to_decimal(3), "1.23e20");
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(q("9/4").sqrt_exact(), Some(q("3/2")));
        assert_eq!(q("2").sqrt_exact(), None);
        assert_eq!(q("-4").sqrt_exact(), None);
    }

    #[test]
    fn surd_square() {
        let s = Surd::new(q("3/2"), q("2"));
        assert_eq!(s.square(), q("9/2"));
        assert!((s.to_f64() - 1.5 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(Surd::new(q("2"), q("1/4")).to_rational(), Some(q("1")));
    }

    #[test]
    fn serde_as_string() {
        let json = serde_json::to_string(&q("-3/64")).unwrap();
        assert_eq!(json, "\"-3/64\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q("-3/64"));
    }
}
