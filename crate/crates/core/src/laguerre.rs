//! Generalized Laguerre polynomials `L_k^(α)` with integer `α >= 0`, and
//! exact closed forms for the integrals
//!
//! ```text
//! ∫_0^∞ x^γ e^{-x} L_k^(α)(x) L_k'^(β)(x) dx
//! ```
//!
//! that appear in every matrix element of the planar Coulomb problem. Each
//! closed form has an independent check in [`brute_force_integral`], which
//! expands both polynomials and integrates monomials via `∫ x^m e^{-x} = m!`.

use num_bigint::BigInt;

use crate::exactmath::{factorial, factorial_ratio, gen_binomial, Rational, RationalPolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LaguerreSpec {
    pub k: u32,
    pub alpha: u32,
}

impl LaguerreSpec {
    pub fn new(k: u32, alpha: u32) -> Self {
        Self { k, alpha }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntegralError {
    #[error("power γ = {0} < 0 makes the integral diverge at the origin")]
    NegativePower(i64),
}

fn ratio(k: u64, a: u64) -> Rational {
    Rational::from(factorial_ratio(k, a))
}

/// Monomial coefficients of `L_k^(α)`: `c_j = (-1)^j C(k+α, k-j) / j!`.
pub fn laguerre_coeffs(spec: LaguerreSpec) -> RationalPolynomial {
    let k = spec.k as u64;
    let top = (spec.k + spec.alpha) as i64;
    let coeffs = (0..=k)
        .map(|j| {
            let c = gen_binomial(top, k - j) / Rational::from(factorial(j));
            if j % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    RationalPolynomial::new(coeffs)
}

/// Closed-form sum for `∫ x^γ e^{-x} L_k^(α) L_k'^(β) dx` with integer γ >= 0.
pub fn cross_integral(gamma: i64, a: LaguerreSpec, b: LaguerreSpec) -> Result<Rational, IntegralError> {
    if gamma < 0 {
        return Err(IntegralError::NegativePower(gamma));
    }
    let (k, kp) = (a.k as i64, b.k as i64);
    let mut sum = Rational::zero();
    for m in 0..=k.min(kp) {
        let term = ratio(m as u64, gamma as u64)
            * gen_binomial(gamma - a.alpha as i64, (k - m) as u64)
            * gen_binomial(gamma - b.alpha as i64, (kp - m) as u64);
        sum += term;
    }
    Ok(if (k + kp) % 2 == 1 { -sum } else { sum })
}

/// `∫ x^(α+3) e^{-x} [L_k^(α)]^2 dx`.
pub fn moment3_diag(spec: LaguerreSpec) -> Rational {
    let (k, a) = (BigInt::from(spec.k), BigInt::from(spec.alpha));
    let first = BigInt::from(2) * &k + &a + 1;
    let second = BigInt::from(10) * &k * &k + BigInt::from(10) * &k + BigInt::from(10) * &a * &k
        + &a * &a
        + BigInt::from(5) * &a
        + 6;
    Rational::from(first * second) * ratio(spec.k as u64, spec.alpha as u64)
}

/// `∫ x^(α+3) e^{-x} L_k^(α) L_k'^(α) dx`, nonzero only for `|k - k'| <= 3`.
///
/// Evaluated on the branch with `k <= k'` so that no factorial of a negative
/// argument is ever needed.
pub fn moment3_band(k: u32, kp: u32, alpha: u32) -> Rational {
    let (lo, hi) = if k <= kp { (k, kp) } else { (kp, k) };
    let (k, a) = (lo as i64, alpha as i64);
    let ku = lo as u64;
    let au = alpha as u64;
    match hi - lo {
        0 => moment3_diag(LaguerreSpec::new(lo, alpha)),
        1 => {
            let c = 5 * k * k + 10 * k + 5 * a * k + a * a + 5 * a + 6;
            Rational::from(-3 * c) * ratio(ku, au + 1)
        }
        2 => Rational::from(3 * (2 * k + a + 3)) * ratio(ku, au + 2),
        3 => -ratio(ku, au + 3),
        _ => Rational::zero(),
    }
}

/// The seven-term band formula evaluated literally for the given ordering of
/// `(k, k')`. Terms whose `1/(k-j)!` factor has a negative argument are absent.
pub fn moment3_band_printed(k: u32, kp: u32, alpha: u32) -> Rational {
    let d = kp as i64 - k as i64;
    let (ki, a) = (k as i64, alpha as i64);
    // Γ(k+α+1+s)/(k-t)!
    let gamma_over = |s: u64, t: u64| -> Rational {
        let num = factorial(k as u64 + alpha as u64 + s);
        Rational::from(num) / Rational::from(factorial(k as u64 - t))
    };
    match d {
        -3 if k >= 3 => -gamma_over(0, 3),
        -2 if k >= 2 => Rational::from(3 * (2 * ki + a - 1)) * gamma_over(0, 2),
        -1 if k >= 1 => Rational::from(-3 * (5 * ki * ki + 5 * a * ki + a * a + 1)) * gamma_over(0, 1),
        0 => moment3_diag(LaguerreSpec::new(k, alpha)),
        1 => {
            let c = 5 * ki * ki + 10 * ki + 5 * a * ki + a * a + 5 * a + 6;
            Rational::from(-3 * c) * gamma_over(1, 0)
        }
        2 => Rational::from(3 * (2 * ki + a + 3)) * gamma_over(2, 0),
        3 => -gamma_over(3, 0),
        _ => Rational::zero(),
    }
}

/// Independent route: expand both polynomials and integrate term by term.
pub fn brute_force_integral(gamma: i64, a: LaguerreSpec, b: LaguerreSpec) -> Result<Rational, IntegralError> {
    if gamma < 0 {
        return Err(IntegralError::NegativePower(gamma));
    }
    let product = &laguerre_coeffs(a) * &laguerre_coeffs(b);
    Ok(product
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c * Rational::from(factorial(gamma as u64 + i as u64)))
        .sum())
}

/// Values `L_0^(α)(x), …, L_kmax^(α)(x)` in floating point by the three-term
/// recurrence.
pub fn laguerre_values_f64(kmax: usize, alpha: f64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    if kmax == 0 {
        return out;
    }
    out.push(1.0 + alpha - x);
    for k in 1..kmax {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}

/// A finite combination `Σ c_j L_j^(α)(x)` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaguerreSeries {
    pub alpha: u32,
    /// `coeffs[j]` multiplies `L_j^(α)`.
    pub coeffs: Vec<Rational>,
}

impl LaguerreSeries {
    pub fn single(spec: LaguerreSpec) -> Self {
        let mut coeffs = vec![Rational::zero(); spec.k as usize + 1];
        coeffs[spec.k as usize] = Rational::one();
        Self { alpha: spec.alpha, coeffs }
    }

    pub fn to_polynomial(&self) -> RationalPolynomial {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(RationalPolynomial::zero(), |acc, (j, c)| {
                &acc + &laguerre_coeffs(LaguerreSpec::new(j as u32, self.alpha)).scale(c)
            })
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        if self.coeffs.is_empty() {
            return 0.0;
        }
        let vals = laguerre_values_f64(self.coeffs.len() - 1, self.alpha as f64, x);
        self.coeffs
            .iter()
            .zip(vals)
            .map(|(c, v)| if c.is_zero() { 0.0 } else { c.to_f64() * v })
            .sum()
    }

    /// Series for `(s - x/2) p(x) + x p'(x)`, the polynomial factor of
    /// `x d/dx [x^s e^{-x/2} p(x)]` for `s = l + 1/2`. Uses
    /// `x L_j' = j L_j - (j+α) L_{j-1}` and
    /// `x L_j = -(j+1) L_{j+1} + (2j+α+1) L_j - (j+α) L_{j-1}`.
    pub fn log_derivative_factor(&self, s: &Rational) -> Self {
        let n = self.coeffs.len() + 1;
        let mut out = vec![Rational::zero(); n];
        let a = self.alpha as i64;
        let half = Rational::frac(1, 2);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let ji = j as i64;
            // s p
            out[j] += c * s;
            // x p'
            out[j] += c * Rational::from(ji);
            if j > 0 {
                out[j - 1] -= &(c * Rational::from(ji + a));
            }
            // -(x/2) p
            let hc = c * &half;
            out[j + 1] += &hc * Rational::from(ji + 1);
            out[j] -= &(&hc * Rational::from(2 * ji + a + 1));
            if j > 0 {
                out[j - 1] += &hc * Rational::from(ji + a);
            }
        }
        Self { alpha: self.alpha, coeffs: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(k: u32, a: u32) -> LaguerreSpec {
        LaguerreSpec::new(k, a)
    }

    /// Exact three-term recurrence, independent of the binomial expansion.
    fn recurrence_oracle(k: u32, alpha: u32) -> RationalPolynomial {
        let x = RationalPolynomial::monomial(Rational::one(), 1);
        let a = Rational::from(alpha as i64);
        let mut prev = RationalPolynomial::constant(Rational::one());
        if k == 0 {
            return prev;
        }
        let mut cur = &RationalPolynomial::constant(Rational::one() + &a) - &x;
        for j in 1..k {
            let jr = Rational::from(j as i64);
            let lin = &RationalPolynomial::constant(Rational::from(2 * j as i64 + 1) + &a) - &x;
            let next = &(&lin * &cur) - &prev.scale(&(&jr + &a));
            prev = cur;
            cur = next.scale(&(jr + Rational::one()).recip().unwrap());
        }
        cur
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(laguerre_coeffs(spec(0, 5)), RationalPolynomial::constant(Rational::one()));
        let l1 = RationalPolynomial::new(vec![Rational::one(), Rational::from(-1)]);
        assert_eq!(laguerre_coeffs(spec(1, 0)), l1);
        let l22 = RationalPolynomial::new(vec![Rational::from(6), Rational::from(-4), Rational::frac(1, 2)]);
        assert_eq!(laguerre_coeffs(spec(2, 2)), l22);
        assert_eq!(recurrence_oracle(2, 2), l22);
    }

    #[test]
    fn coefficients_match_recurrence() {
        for k in 0..12 {
            for a in 0..7 {
                let p = laguerre_coeffs(spec(k, a));
                assert_eq!(p, recurrence_oracle(k, a), "k={k} α={a}");
                assert_eq!(p.degree(), Some(k as usize));
                let lead = Rational::from(if k % 2 == 0 { 1 } else { -1 })
                    / Rational::from(factorial(k as u64));
                assert_eq!(p.leading(), Some(&lead));
            }
        }
    }

    #[test]
    fn cross_integral_examples() {
        assert_eq!(cross_integral(0, spec(0, 0), spec(0, 0)).unwrap(), Rational::one());
        assert_eq!(cross_integral(1, spec(1, 0), spec(0, 0)).unwrap(), Rational::from(-1));
        assert_eq!(cross_integral(3, spec(0, 0), spec(3, 0)).unwrap(), Rational::from(-6));
        assert!(cross_integral(-1, spec(0, 0), spec(0, 0)).is_err());
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_integral(0, spec(0, 0), spec(0, 0)).unwrap(), Rational::one());
        assert_eq!(brute_force_integral(3, spec(0, 0), spec(3, 0)).unwrap(), Rational::from(-6));
        // k = 0, l = 1 at γ = 2l+1: a single monomial, 3!
        assert_eq!(brute_force_integral(3, spec(0, 2), spec(0, 2)).unwrap(), Rational::from(6));
        assert_eq!(brute_force_integral(4, spec(0, 2), spec(0, 2)).unwrap(), Rational::from(24));
    }

    #[test]
    fn moment3_examples() {
        assert_eq!(moment3_diag(spec(0, 0)), Rational::from(6));
        // ∫ x^4 e^{-x} dx = 24; the closed form gives (α+1)(α²+5α+6)Γ(α+1)
        assert_eq!(moment3_diag(spec(0, 1)), Rational::from(24));
        assert_eq!(brute_force_integral(4, spec(0, 1), spec(0, 1)).unwrap(), Rational::from(24));
        // 3·26·1
        assert_eq!(moment3_diag(spec(1, 0)), Rational::from(78));
        assert_eq!(brute_force_integral(3, spec(1, 0), spec(1, 0)).unwrap(), Rational::from(78));

        assert_eq!(moment3_band(0, 4, 0), Rational::zero());
        assert_eq!(moment3_band(0, 3, 0), Rational::from(-6));
        assert_eq!(moment3_band(2, 1, 2), Rational::from(-3240));
        assert_eq!(brute_force_integral(5, spec(2, 2), spec(1, 2)).unwrap(), Rational::from(-3240));
    }

    #[test]
    fn printed_band_formula_agrees_with_oracle_in_both_orders() {
        for a in 0..6 {
            for k in 0..9 {
                for kp in 0..9 {
                    let oracle = brute_force_integral(a as i64 + 3, spec(k, a), spec(kp, a)).unwrap();
                    assert_eq!(moment3_band_printed(k, kp, a), oracle, "k={k} k'={kp} α={a}");
                }
            }
        }
    }

    #[test]
    fn float_recurrence_matches_exact() {
        for &x in &[0.0, 0.3, 2.5, 11.0] {
            let vals = laguerre_values_f64(8, 3.0, x);
            for (k, v) in vals.iter().enumerate() {
                let exact = laguerre_coeffs(spec(k as u32, 3)).eval_f64(x);
                assert!((v - exact).abs() <= 1e-10 * exact.abs().max(1.0), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn log_derivative_factor_is_exact_product_rule() {
        // q = (s - x/2) p + x p'
        let s = Rational::frac(5, 2);
        let x = RationalPolynomial::monomial(Rational::one(), 1);
        for k in 0..7 {
            for a in [0, 2, 4] {
                let series = LaguerreSeries::single(spec(k, a));
                let p = series.to_polynomial();
                let lin = &RationalPolynomial::constant(s.clone()) - &x.scale(&Rational::frac(1, 2));
                let expected = &(&lin * &p) + &(&x * &p.derivative());
                assert_eq!(series.log_derivative_factor(&s).to_polynomial(), expected);
            }
        }
    }
}
