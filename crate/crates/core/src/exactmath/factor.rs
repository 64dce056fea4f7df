use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::Rational;

/// Trial division stops at this bound; anything left over is reported as an
/// unfactored residual.
const TRIAL_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// Ascending primes with their exponents.
    pub factors: Vec<(u64, u32)>,
    /// Cofactor without prime divisors below the trial-division limit
    /// (prime or composite); `None` when fully factored.
    pub residual: Option<BigUint>,
}

impl Factorization {
    pub fn product(&self) -> BigUint {
        let base = self
            .factors
            .iter()
            .fold(BigUint::one(), |acc, &(p, e)| acc * BigUint::from(p).pow(e));
        match &self.residual {
            Some(r) => base * r,
            None => base,
        }
    }
}

/// Renders `3^6×1609`; the empty factorization of 1 renders as `1`.
impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        if let Some(r) = &self.residual {
            parts.push(r.to_string());
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("×"))
        }
    }
}

pub fn factorize_integer(v: &BigUint) -> Factorization {
    assert!(!v.is_zero(), "factorize_integer requires v >= 1");
    let mut rest = v.clone();
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0u32;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut residual = None;
    if !rest.is_one() {
        let p_sq = BigUint::from(p) * BigUint::from(p);
        match rest.to_u64() {
            // no divisor up to sqrt(rest): prime
            Some(r) if BigUint::from(r) < p_sq || p <= TRIAL_LIMIT => factors.push((r, 1)),
            _ => residual = Some(rest),
        }
    }
    factors.sort_unstable();
    Factorization { factors, residual }
}

/// Prime factorization of a rational, rendered like `-3^6×1609/2^16`: sign
/// first, then numerator, then the denominator when it is not 1.
pub fn factorize_rational(q: &Rational) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let sign = if q.is_negative() { "-" } else { "" };
    let num = factorize_integer(q.numer().magnitude());
    let den = q.denom().magnitude();
    if den.is_one() {
        format!("{sign}{num}")
    } else {
        format!("{sign}{num}/{}", factorize_integer(den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(v: u64) -> Vec<(u64, u32)> {
        let out = factorize_integer(&BigUint::from(v));
        assert!(out.residual.is_none());
        out.factors
    }

    #[test]
    fn table_denominators_and_numerators() {
        assert_eq!(f(65536), vec![(2, 16)]);
        assert_eq!(f(159), vec![(3, 1), (53, 1)]);
        assert_eq!(f(1172961), vec![(3, 6), (1609, 1)]);
        assert_eq!(f(3061109331), vec![(3, 2), (7, 8), (59, 1)]);
        assert_eq!(f(1), vec![]);
        assert_eq!(f(97), vec![(97, 1)]);
    }

    #[test]
    fn display_form() {
        assert_eq!(factorize_integer(&BigUint::from(1172961u64)).to_string(), "3^6×1609");
        assert_eq!(factorize_integer(&BigUint::from(1u64)).to_string(), "1");
    }

    #[test]
    fn rational_form() {
        let q = |s: &str| s.parse::<Rational>().unwrap();
        assert_eq!(factorize_rational(&q("-1172961/65536")), "-3^6×1609/2^16");
        assert_eq!(factorize_rational(&q("375/32")), "3×5^3/2^5");
        assert_eq!(factorize_rational(&q("12")), "2^2×3");
        assert_eq!(factorize_rational(&q("-1/4")), "-1/2^2");
        assert_eq!(factorize_rational(&q("0")), "0");
    }

    #[test]
    fn large_prime_cofactor_reported() {
        // (10^6 + 3) * (10^6 + 33), both prime
        let v = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64);
        let out = factorize_integer(&v);
        assert!(out.factors.is_empty());
        assert_eq!(out.residual.as_ref(), Some(&v));
        assert_eq!(out.product(), v);
    }

    proptest! {
        #[test]
        fn remultiplies_to_input(v in 1u64..50_000_000) {
            let out = factorize_integer(&BigUint::from(v));
            prop_assert_eq!(out.product(), BigUint::from(v));
            prop_assert!(out.factors.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
