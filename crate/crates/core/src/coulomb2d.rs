//! Bound states and discrete Coulomb Sturmians of the planar radial Coulomb
//! problem, in units with ħ = m = e = 4πε₀ = 1 (lengths in Bohr radii,
//! energies in Hartree, fields in units of B₀ = ħ/(e a₀²)).
//!
//! Both families have the shape
//!
//! ```text
//! f(r) = sqrt(norm²) · x^(l+1/2) · e^(-x/2) · p(x),   x = 2 k r,
//! ```
//!
//! with `p` a combination of `L_j^(2l)`. Bound functions use `k = Z/N_n`,
//! Sturmians at energy `E` use `k = sqrt(-2E)`. Only `k²` and `norm²` are
//! stored, so everything stays rational even when `k` is not.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::exactmath::{factorial, Rational, RationalPolynomial, Surd};
use crate::laguerre::{cross_integral, moment3_band, LaguerreSeries, LaguerreSpec};

/// Atomic unit of magnetic induction in tesla.
pub const B0_TESLA: f64 = 2.350_517_567e5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StateError {
    #[error("n must be at least 1")]
    ZeroPrincipal,
    #[error("l must satisfy 0 ≤ l ≤ n−1 (got n = {n}, l = {l})")]
    AngularOutOfRange { n: u32, l: u32 },
    #[error("|m_l| must equal l (got l = {l}, m_l = {m_l})")]
    MagneticMismatch { l: u32, m_l: i32 },
    #[error("Sturmian energy must be negative (got {0})")]
    NonNegativeEnergy(Rational),
    #[error("nuclear charge must be positive (got {0})")]
    NonPositiveCharge(Rational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    #[serde(rename = "+1/2")]
    Up,
    #[serde(rename = "-1/2")]
    Down,
}

impl Spin {
    pub fn m_s(self) -> Rational {
        match self {
            Spin::Up => Rational::frac(1, 2),
            Spin::Down => Rational::frac(-1, 2),
        }
    }

    /// Parses `+1/2`, `1/2`, `-1/2`, `up`, `down`.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "+1/2" | "1/2" | "0.5" | "+0.5" | "up" => Some(Spin::Up),
            "-1/2" | "-0.5" | "down" => Some(Spin::Down),
            _ => None,
        }
    }
}

/// A bound level `(n, l, m_l[, m_s])` with `n = n_r + l + 1` and `|m_l| = l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumState {
    n: u32,
    l: u32,
    m_l: i32,
    m_s: Option<Spin>,
}

impl QuantumState {
    pub fn new(n: u32, l: u32, m_l: i32) -> Result<Self, StateError> {
        if n == 0 {
            return Err(StateError::ZeroPrincipal);
        }
        if l >= n {
            return Err(StateError::AngularOutOfRange { n, l });
        }
        if m_l.unsigned_abs() != l {
            return Err(StateError::MagneticMismatch { l, m_l });
        }
        Ok(Self { n, l, m_l, m_s: None })
    }

    /// The `m_l = +l` member of the `(n, l)` doublet.
    pub fn level(n: u32, l: u32) -> Result<Self, StateError> {
        Self::new(n, l, l as i32)
    }

    pub fn with_spin(mut self, spin: Spin) -> Self {
        self.m_s = Some(spin);
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m_l(&self) -> i32 {
        self.m_l
    }

    pub fn m_s(&self) -> Option<Spin> {
        self.m_s
    }

    pub fn n_r(&self) -> u32 {
        self.n - self.l - 1
    }

    /// `N_n = n - 1/2`.
    pub fn effective_n(&self) -> Rational {
        effective_n(self.n)
    }
}

impl fmt::Display for QuantumState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, l={}, m_l={}", self.n, self.l, self.m_l)?;
        if let Some(s) = self.m_s {
            write!(f, ", m_s={}", s.m_s())?;
        }
        write!(f, ")")
    }
}

pub fn effective_n(n: u32) -> Rational {
    Rational::from(n as i64) - Rational::frac(1, 2)
}

/// Nuclear charge plus dimensionless field `b = B/B₀`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub z: Rational,
    pub b: Rational,
}

impl UnitSystem {
    pub fn new(z: Rational, b: Rational) -> Result<Self, StateError> {
        if !z.is_positive() {
            return Err(StateError::NonPositiveCharge(z));
        }
        Ok(Self { z, b })
    }

    pub fn field_tesla(&self) -> f64 {
        self.b.to_f64() * B0_TESLA
    }

    pub fn b_from_tesla(tesla: f64) -> f64 {
        tesla / B0_TESLA
    }
}

/// `E_n = -Z² / (2 N_n²)` Hartree.
pub fn energy0(state: &QuantumState, z: &Rational) -> Rational {
    let nn = state.effective_n();
    -(z * z) / (Rational::from(2) * &nn * &nn)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialKind {
    /// Normalized bound function `P⁰_nl`.
    Bound,
    /// Sturmian normalized with weight `Z/r`.
    Sturmian,
    /// `r d/dr` applied to one of the above.
    RDerivative,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialFunction {
    kind: RadialKind,
    l: u32,
    scale_sq: Rational,
    norm_sq: Rational,
    series: LaguerreSeries,
}

impl RadialFunction {
    pub fn kind(&self) -> RadialKind {
        self.kind
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `k²` where the scaled variable is `x = 2 k r`.
    pub fn scale_sq(&self) -> &Rational {
        &self.scale_sq
    }

    pub fn scale_exact(&self) -> Option<Rational> {
        self.scale_sq.sqrt_exact()
    }

    pub fn scale(&self) -> f64 {
        self.scale_sq.to_f64().sqrt()
    }

    pub fn norm_sq(&self) -> &Rational {
        &self.norm_sq
    }

    pub fn series(&self) -> &LaguerreSeries {
        &self.series
    }

    /// Polynomial factor `p(x)` in monomial form.
    pub fn poly(&self) -> RationalPolynomial {
        self.series.to_polynomial()
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let x = 2.0 * self.scale() * r;
        let envelope = ((self.l as f64 + 0.5) * x.ln() - 0.5 * x).exp();
        self.norm_sq.to_f64().sqrt() * envelope * self.series.eval_f64(x)
    }

    /// `r f'(r)`, exact in its polynomial factor.
    pub fn r_derivative(&self) -> RadialFunction {
        let s = Rational::from(self.l as i64) + Rational::frac(1, 2);
        RadialFunction {
            kind: RadialKind::RDerivative,
            l: self.l,
            scale_sq: self.scale_sq.clone(),
            norm_sq: self.norm_sq.clone(),
            series: self.series.log_derivative_factor(&s),
        }
    }

    /// Exact `∫ r^power f(r) g(r) dr` for functions sharing `l` and scale;
    /// `power >= -1`.
    pub fn overlap(&self, other: &RadialFunction, power: i32) -> Option<Surd> {
        if self.l != other.l || self.scale_sq != other.scale_sq || power < -1 {
            return None;
        }
        let alpha = 2 * self.l;
        let gamma = (2 * self.l) as i64 + 1 + power as i64;
        let mut coeff = Rational::zero();
        for (i, ci) in self.series.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in other.series.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let integral = cross_integral(
                    gamma,
                    LaguerreSpec::new(i as u32, alpha),
                    LaguerreSpec::new(j as u32, alpha),
                )
                .expect("γ >= 0");
                coeff += ci * cj * integral;
            }
        }
        // dr = dx / 2k and r^power = x^power / (2k)^power
        let four_k_sq = Rational::from(4) * &self.scale_sq;
        let radicand = &self.norm_sq * &other.norm_sq / four_k_sq.pow(power + 1);
        Some(Surd::new(coeff, radicand))
    }
}

/// `P⁰_nl` with positive slope at the origin.
pub fn bound_radial(state: &QuantumState, z: &Rational) -> RadialFunction {
    let (n_r, l) = (state.n_r(), state.l());
    let nn = state.effective_n();
    let scale = z / &nn;
    let norm_sq = z * Rational::from(factorial(n_r as u64))
        / (&nn * &nn * Rational::from(factorial((n_r + 2 * l) as u64)));
    RadialFunction {
        kind: RadialKind::Bound,
        l,
        scale_sq: &scale * &scale,
        norm_sq,
        series: LaguerreSeries::single(LaguerreSpec::new(n_r, 2 * l)),
    }
}

/// Sturmian `S_{n_r l}(E, r)`, orthonormal with weight `Z/r`.
pub fn sturmian(n_r: u32, l: u32, e: &Rational, z: &Rational) -> Result<RadialFunction, StateError> {
    if !e.is_negative() {
        return Err(StateError::NonNegativeEnergy(e.clone()));
    }
    if !z.is_positive() {
        return Err(StateError::NonPositiveCharge(z.clone()));
    }
    let norm_sq = Rational::from(factorial(n_r as u64))
        / (z * Rational::from(factorial((n_r + 2 * l) as u64)));
    Ok(RadialFunction {
        kind: RadialKind::Sturmian,
        l,
        scale_sq: Rational::from(-2) * e,
        norm_sq,
        series: LaguerreSeries::single(LaguerreSpec::new(n_r, 2 * l)),
    })
}

/// Sturmian charge eigenvalue `μ = (n_r + l + 1/2) k / Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct SturmianMu {
    pub squared: Rational,
    pub exact: Option<Rational>,
    pub value: f64,
}

impl SturmianMu {
    /// Exact test for the resonance `μ = 1`.
    pub fn is_resonant(&self) -> bool {
        self.squared == Rational::one()
    }
}

pub fn sturmian_mu(n_r: u32, l: u32, e: &Rational, z: &Rational) -> Result<SturmianMu, StateError> {
    if !e.is_negative() {
        return Err(StateError::NonNegativeEnergy(e.clone()));
    }
    let c = Rational::from((n_r + l) as i64) + Rational::frac(1, 2);
    let squared = &c * &c * Rational::from(-2) * e / (z * z);
    let exact = squared.sqrt_exact();
    let value = match &exact {
        Some(v) => v.to_f64(),
        None => squared.to_f64().sqrt(),
    };
    Ok(SturmianMu { squared, exact, value })
}

/// Exact `∫ r² P⁰_nl(r) S_{n_r' l}(E_n, r) dr`, from the band formula. Zero
/// unless `|n_r' - n_r| <= 3`.
pub fn r2_element(state: &QuantumState, n_r_prime: u32, z: &Rational) -> Surd {
    let l = state.l();
    let p = bound_radial(state, z);
    let norm_s = Rational::from(factorial(n_r_prime as u64))
        / (z * Rational::from(factorial((n_r_prime + 2 * l) as u64)));
    let band = moment3_band(state.n_r(), n_r_prime, 2 * l);
    let four_k_sq = Rational::from(4) * p.scale_sq();
    Surd::new(band, p.norm_sq() * &norm_s / four_k_sq.pow(3))
}
