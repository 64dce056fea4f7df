//! Exact arithmetic: big rationals, combinatorial factors, dense rational
//! polynomials and small-prime factorization for display.

mod factor;
mod poly;
mod rational;

pub use factor::{factorize_integer, factorize_rational, Factorization};
pub use poly::RationalPolynomial;
pub use rational::{Rational, Surd};

use num_bigint::{BigInt, BigUint};
use num_traits::One;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MathError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
}

/// `k!` as a big integer.
pub fn factorial(k: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, i| acc * i)
}

/// Rising ratio `(k + a)! / k!` for `a >= 0`, i.e. `(k+1)(k+2)...(k+a)`.
pub fn factorial_ratio(k: u64, a: u64) -> BigUint {
    (k + 1..=k + a).fold(BigUint::one(), |acc, i| acc * i)
}

/// Binomial coefficient with an arbitrary integer upper argument, defined by
/// the falling factorial `top (top-1) ... (top-j+1) / j!`.
pub fn gen_binomial(top: i64, j: u64) -> Rational {
    let mut num = BigInt::one();
    for i in 0..j as i64 {
        num *= top - i;
    }
    Rational::new(num, BigInt::from(factorial(j))).expect("j! is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorial_values() {
        assert_eq!(factorial(0), BigUint::from(1u32));
        assert_eq!(factorial(5), BigUint::from(120u32));
        let oracle: u128 = (1..=20u128).product();
        assert_eq!(factorial(20), BigUint::from(oracle));
        assert_eq!(factorial(20).to_string(), "2432902008176640000");
    }

    #[test]
    fn factorial_ratio_matches_quotient() {
        for k in 0..12 {
            for a in 0..8 {
                assert_eq!(factorial_ratio(k, a), factorial(k + a) / factorial(k));
            }
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(gen_binomial(3, 2), Rational::from(3));
        assert_eq!(gen_binomial(1, 3), Rational::zero());
        assert_eq!(gen_binomial(-2, 3), Rational::from(-4));
        assert_eq!(gen_binomial(-1, 0), Rational::one());
        assert_eq!(gen_binomial(0, 0), Rational::one());
    }

    #[test]
    fn binomial_pascal_rule() {
        for top in -6i64..8 {
            for j in 1..7u64 {
                let lhs = gen_binomial(top, j);
                let rhs = gen_binomial(top - 1, j) + gen_binomial(top - 1, j - 1);
                assert_eq!(lhs, rhs, "top={top} j={j}");
            }
        }
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-200i64..200, 1i64..60).prop_map(|(p, q)| Rational::frac(p, q))
    }

    proptest! {
        #[test]
        fn field_axioms(a in small_rational(), b in small_rational(), c in small_rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a - &a, Rational::zero());
            if !b.is_zero() {
                prop_assert_eq!(a.checked_div(&b).unwrap() * &b, a.clone());
            }
        }

        #[test]
        fn binomial_times_factorial_is_integer(top in -40i64..40, j in 0u64..15) {
            let v = gen_binomial(top, j) * Rational::from(factorial(j));
            prop_assert!(v.is_integer());
        }

        #[test]
        fn display_round_trips(a in small_rational()) {
            let back: Rational = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
