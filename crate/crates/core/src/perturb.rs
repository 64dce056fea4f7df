//! Zeeman coefficients `ε⁽ᵏ⁾` and the assembled weak-field spectrum.
//!
//! `ε⁽²⁾` and `ε⁽⁴⁾` are available from closed forms and from an independent
//! route through exact radial integrals. For `ε⁽⁴⁾` that route is the Sturmian
//! sum
//!
//! ```text
//! ε⁽⁴⁾ = -(Z⁶/64) { N Σ_{j≠n_r} I_j² / (j - n_r) - (5/2) I_{n_r}² },
//! I_j = ∫ r² P⁰_nl(r) S_{j l}(E_n, r) dr,
//! ```
//!
//! where the `(b²/8)²` prefactor of the diamagnetic term becomes `1/64` and the
//! `Z⁶` converts to the charge-independent coefficient. The r² band structure
//! limits `j` to `|j - n_r| <= 3`, so the sum is finite and exact.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::coulomb2d::{bound_radial, effective_n, r2_element, QuantumState, Spin, StateError};
use crate::exactmath::Rational;
use crate::laguerre::{moment3_diag, LaguerreSpec};

fn check_level(n: u32, l: u32) -> Result<(), StateError> {
    QuantumState::level(n, l).map(|_| ())
}

/// `ε⁽⁰⁾ = -1 / (2 (n - 1/2)²)`
pub fn eps0(n: u32) -> Result<Rational, StateError> {
    if n == 0 {
        return Err(StateError::ZeroPrincipal);
    }
    let nn = effective_n(n);
    Ok(-Rational::one() / (Rational::from(2) * &nn * &nn))
}

/// `ε⁽¹⁾ = m_l / 2`, or `(m_l + 2 m_s) / 2` with spin.
pub fn eps1(m_l: i32, spin: Option<Spin>) -> Rational {
    let mut v = Rational::from(m_l as i64);
    if let Some(s) = spin {
        v += Rational::from(2) * s.m_s();
    }
    v * Rational::frac(1, 2)
}

/// `(n - 1/2)² (5n² - 5n - 3l² + 3) / 16`
pub fn eps2_closed(n: u32, l: u32) -> Result<Rational, StateError> {
    check_level(n, l)?;
    let nn = effective_n(n);
    let (n, l) = (n as i64, l as i64);
    let poly = Rational::from(5 * n * n - 5 * n - 3 * l * l + 3);
    Ok(&nn * &nn * poly / Rational::from(16))
}

/// `(Z²/8) ∫ r² (P⁰_nl)² dr` from the diagonal r² moment.
pub fn eps2_integral(n: u32, l: u32) -> Result<Rational, StateError> {
    let state = QuantumState::level(n, l)?;
    let z = Rational::one();
    let p = bound_radial(&state, &z);
    let moment = moment3_diag(LaguerreSpec::new(state.n_r(), 2 * l));
    // ∫ r² P² dr = norm² · moment / (2k)³
    let two_k = Rational::from(2) * p.scale_exact().expect("bound scale is rational");
    let r2 = p.norm_sq() * moment / two_k.pow(3);
    Ok(r2 / Rational::from(8))
}

/// Circular states `l = n - 1`: `n (n + 1/2) (n - 1/2)² / 8`
pub fn eps2_circular(n: u32) -> Result<Rational, StateError> {
    let nn = effective_n(check_circular(n)?);
    let np = Rational::from(n as i64) + Rational::frac(1, 2);
    Ok(Rational::from(n as i64) * np * &nn * &nn / Rational::from(8))
}

fn check_circular(n: u32) -> Result<u32, StateError> {
    if n == 0 {
        Err(StateError::ZeroPrincipal)
    } else {
        Ok(n)
    }
}

/// `-(n - 1/2)⁶ (143n⁴ - 286n³ - 90n²l² + 582n² + 90nl² - 439n - 21l⁴ - 138l² + 159) / 2¹⁰`
pub fn eps4_closed(n: u32, l: u32) -> Result<Rational, StateError> {
    check_level(n, l)?;
    let nn = effective_n(n);
    let (n, l) = (n as i64, l as i64);
    let (n2, l2) = (n * n, l * l);
    let poly = 143 * n2 * n2 - 286 * n2 * n - 90 * n2 * l2 + 582 * n2 + 90 * n * l2 - 439 * n
        - 21 * l2 * l2
        - 138 * l2
        + 159;
    Ok(-nn.pow(6) * Rational::from(poly) / Rational::from(1024))
}

/// The Sturmian-sum route at nuclear charge `z`; the result is independent
/// of `z`.
pub fn eps4_sturmian_at_charge(n: u32, l: u32, z: &Rational) -> Result<Rational, StateError> {
    let state = QuantumState::level(n, l)?;
    let n_r = state.n_r();
    let nn = state.effective_n();
    let lo = n_r.saturating_sub(3);
    let mut regular = Rational::zero();
    for j in lo..=n_r + 3 {
        if j == n_r {
            continue;
        }
        let sq = r2_element(&state, j, z).square();
        regular += sq / Rational::from(j as i64 - n_r as i64);
    }
    let diag = r2_element(&state, n_r, z).square();
    let braces = &nn * regular - Rational::frac(5, 2) * diag;
    Ok(-z.pow(6) * braces / Rational::from(64))
}

pub fn eps4_sturmian(n: u32, l: u32) -> Result<Rational, StateError> {
    eps4_sturmian_at_charge(n, l, &Rational::one())
}

/// Circular states: `-n (n + 1/2) (n - 1/2)⁶ (16n² + 26n + 11) / 2⁹`
pub fn eps4_circular(n: u32) -> Result<Rational, StateError> {
    let nn = effective_n(check_circular(n)?);
    let np = Rational::from(n as i64) + Rational::frac(1, 2);
    let n = n as i64;
    let poly = Rational::from(16 * n * n + 26 * n + 11);
    Ok(-Rational::from(n) * np * nn.pow(6) * poly / Rational::from(512))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    SturmianSum,
}

/// Exact `ε⁽⁰⁾, ε⁽²⁾, ε⁽⁴⁾` for one `(n, l)`. The linear coefficient depends
/// on `m_l` (and spin) only; see [`eps1`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub n: u32,
    pub l: u32,
    pub eps0: Rational,
    pub eps2: Rational,
    pub eps4: Rational,
    pub provenance: Provenance,
}

impl CoefficientSet {
    pub fn compute(n: u32, l: u32, provenance: Provenance) -> Result<Self, StateError> {
        let (eps2, eps4) = match provenance {
            Provenance::ClosedForm => (eps2_closed(n, l)?, eps4_closed(n, l)?),
            Provenance::SturmianSum => (eps2_integral(n, l)?, eps4_sturmian(n, l)?),
        };
        Ok(Self { n, l, eps0: eps0(n)?, eps2, eps4, provenance })
    }
}

/// Thread-safe memo table of coefficient sets keyed by `(n, l, provenance)`.
#[derive(Debug, Default)]
pub struct CoefficientCache {
    map: RwLock<HashMap<(u32, u32, Provenance), Arc<CoefficientSet>>>,
}

impl CoefficientCache {
    pub fn get(&self, n: u32, l: u32, provenance: Provenance) -> Result<Arc<CoefficientSet>, StateError> {
        let key = (n, l, provenance);
        if let Some(hit) = self.map.read().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let set = Arc::new(CoefficientSet::compute(n, l, provenance)?);
        let mut map = self.map.write().expect("cache poisoned");
        Ok(map.entry(key).or_insert(set).clone())
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Process-wide cache.
pub fn coefficients(n: u32, l: u32, provenance: Provenance) -> Result<Arc<CoefficientSet>, StateError> {
    static CACHE: OnceLock<CoefficientCache> = OnceLock::new();
    CACHE.get_or_init(CoefficientCache::default).get(n, l, provenance)
}

/// Highest power of `b` kept in an assembled energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Order {
    #[serde(rename = "0")]
    Zeroth,
    #[serde(rename = "1")]
    First,
    #[serde(rename = "2")]
    Second,
    #[serde(rename = "4")]
    Fourth,
}

impl Order {
    /// There is no order-3 channel: the diamagnetic term is even in `b`.
    pub fn from_power(k: u32) -> Option<Self> {
        match k {
            0 => Some(Order::Zeroth),
            1 => Some(Order::First),
            2 => Some(Order::Second),
            4 => Some(Order::Fourth),
            _ => None,
        }
    }

    pub fn power(self) -> u32 {
        match self {
            Order::Zeroth => 0,
            Order::First => 1,
            Order::Second => 2,
            Order::Fourth => 4,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.power())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnergyError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("field strength b = B/B₀ must be non-negative (got {0})")]
    NegativeField(Rational),
    #[error("spin term requested but the state has no m_s")]
    MissingSpin,
}

/// Term-by-term energy in Hartree; omitted orders are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnergyResult {
    pub state: QuantumState,
    pub z: Rational,
    pub b: Rational,
    pub order: Order,
    pub spin_included: bool,
    pub e0: Rational,
    pub e1: Rational,
    pub e2: Rational,
    pub e4: Rational,
    pub total: Rational,
    /// Heuristic flag: `|E⁽⁴⁾| > |E⁽²⁾|` at this field, so the asymptotic
    /// series should not be trusted.
    pub regime_warning: bool,
    pub truncation_note: String,
}

pub fn assemble_energy(
    state: &QuantumState,
    z: &Rational,
    b: &Rational,
    order: Order,
    spin: bool,
) -> Result<EnergyResult, EnergyError> {
    if b.is_negative() {
        return Err(EnergyError::NegativeField(b.clone()));
    }
    if !z.is_positive() {
        return Err(StateError::NonPositiveCharge(z.clone()).into());
    }
    let spin_value = if spin {
        Some(state.m_s().ok_or(EnergyError::MissingSpin)?)
    } else {
        None
    };
    let coeffs = coefficients(state.n(), state.l(), Provenance::ClosedForm)?;
    let z2 = z * z;
    let b2 = b * b;

    let e0 = &coeffs.eps0 * &z2;
    let e2_full = &coeffs.eps2 * &b2 / &z2;
    let e4_full = &coeffs.eps4 * &b2 * &b2 / z2.pow(3);
    let keep = |k: Order, v: Rational| if order >= k { v } else { Rational::zero() };
    let e1 = keep(Order::First, eps1(state.m_l(), spin_value) * b);
    let regime_warning = e4_full.abs() > e2_full.abs();
    let e2 = keep(Order::Second, e2_full);
    let e4 = keep(Order::Fourth, e4_full);
    let total = &e0 + &e1 + &e2 + &e4;
    Ok(EnergyResult {
        state: *state,
        z: z.clone(),
        b: b.clone(),
        order,
        spin_included: spin,
        e0,
        e1,
        e2,
        e4,
        total,
        regime_warning,
        truncation_note: "next omitted term is O(Z^-10 b^6)".to_string(),
    })
}

/// Literature ground-state fourth-order coefficient that this crate rejects.
pub fn literature_ground_eps4() -> Rational {
    Rational::frac(-153, 65536)
}

/// Numerical estimate of a coefficient with its uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericEstimate {
    pub value: f64,
    pub uncertainty: f64,
}

/// Ground-state `ε⁽⁴⁾` from every route next to the literature value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisputeReport {
    pub closed: Rational,
    pub sturmian: Rational,
    pub oracle: Option<NumericEstimate>,
    pub literature: Rational,
    /// `|closed - literature| / |closed|`
    pub relative_separation: f64,
    /// Half the distance between the two candidate values; the oracle must
    /// land closer than this to one of them.
    pub decision_radius: f64,
    pub exact_routes_agree: bool,
    pub oracle_confirms_closed: Option<bool>,
    pub literature_rejected: bool,
}

impl DisputeReport {
    pub fn verdict_line(&self) -> String {
        let oracle = match &self.oracle {
            Some(o) => format!("{}±{:.1e}", Rational::from_f64(o.value).map_or("NaN".into(), |q| q.to_decimal(6)), o.uncertainty),
            None => "not run".to_string(),
        };
        format!(
            "ε⁽⁴⁾(1,0): closed={}, sturmian={}, oracle={}, literature {} {}",
            self.closed,
            self.sturmian,
            oracle,
            self.literature,
            if self.literature_rejected { "REJECTED" } else { "NOT REJECTED" }
        )
    }
}

pub fn disputed_value_report(oracle: Option<NumericEstimate>) -> DisputeReport {
    let closed = eps4_closed(1, 0).expect("ground state");
    let sturmian = eps4_sturmian(1, 0).expect("ground state");
    let literature = literature_ground_eps4();
    let gap = (&closed - &literature).abs();
    let relative_separation = (&gap / closed.abs()).to_f64();
    let decision_radius = gap.to_f64() / 2.0;
    let exact_routes_agree = closed == sturmian;
    let oracle_confirms_closed = oracle.map(|o| {
        let d = (o.value - closed.to_f64()).abs();
        d < decision_radius && d + o.uncertainty < decision_radius
    });
    let literature_rejected = exact_routes_agree && closed != literature && oracle_confirms_closed.unwrap_or(true);
    DisputeReport {
        closed,
        sturmian,
        oracle,
        literature,
        relative_separation,
        decision_radius,
        exact_routes_agree,
        oracle_confirms_closed,
        literature_rejected,
    }
}
