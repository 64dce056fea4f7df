//! Sturmian expansions of the radial Coulomb Green function `G(E, r, r')` and
//! of the reduced Green function `G̃_nl(r, r')` at an eigen-energy, evaluated
//! in floating point, plus the quadrature checks of their defining
//! properties.

use crate::coulomb2d::{bound_radial, r2_element, sturmian, sturmian_mu, QuantumState, RadialFunction, StateError};
use crate::exactmath::Rational;
use crate::laguerre::laguerre_values_f64;
use crate::quadrature::GaussLaguerre;

pub const DEFAULT_QUADRATURE: usize = 200;
pub const DEFAULT_TRUNCATION: usize = 40;
/// Terms the reduced function needs beyond `n_r`: the r² band reaches
/// `n_r + 3`.
pub const REDUCED_MARGIN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GreenTarget {
    /// Plain Green function at this energy.
    Energy(Rational),
    /// Reduced Green function of level `n`.
    Level(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreenEvalConfig {
    pub truncation: usize,
    pub l: u32,
    pub target: GreenTarget,
    pub z: Rational,
    pub quadrature: usize,
}

impl GreenEvalConfig {
    pub fn at_energy(l: u32, e: Rational, z: Rational) -> Self {
        Self { truncation: DEFAULT_TRUNCATION, l, target: GreenTarget::Energy(e), z, quadrature: DEFAULT_QUADRATURE }
    }

    pub fn at_level(state: &QuantumState, z: Rational) -> Self {
        Self {
            truncation: state.n_r() as usize + REDUCED_MARGIN,
            l: state.l(),
            target: GreenTarget::Level(state.n()),
            z,
            quadrature: DEFAULT_QUADRATURE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GreenError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("energy coincides with a level: μ = 1 for n_r = {n_r}")]
    Pole { n_r: u32 },
    #[error("truncation {truncation} is below n_r + {REDUCED_MARGIN} = {needed}")]
    TruncationTooSmall { truncation: usize, needed: usize },
    #[error("truncation must be at least 1")]
    EmptyTruncation,
    #[error("configuration targets the other Green function")]
    WrongTarget,
}

/// Floating values of `S_0 … S_{T-1}` at one energy.
#[derive(Debug, Clone)]
struct SturmianTable {
    l: u32,
    k: f64,
    half_log_norm: Vec<f64>,
}

impl SturmianTable {
    fn new(l: u32, k: f64, z: &Rational, terms: usize) -> Self {
        let zf = z.to_f64();
        let a = 2 * l as usize;
        // norm_j = j! / (Z (j+2l)!)
        let half_log_norm = (0..terms)
            .map(|j| {
                let ln_ratio: f64 = (j + 1..=j + a).map(|m| (m as f64).ln()).sum();
                -0.5 * (ln_ratio + zf.ln())
            })
            .collect();
        Self { l, k, half_log_norm }
    }

    fn values(&self, r: f64) -> Vec<f64> {
        let terms = self.half_log_norm.len();
        let x = 2.0 * self.k * r;
        let lag = laguerre_values_f64(terms - 1, 2.0 * self.l as f64, x);
        let log_env = (self.l as f64 + 0.5) * x.ln() - 0.5 * x;
        lag.iter().zip(&self.half_log_norm).map(|(v, h)| v * (log_env + h).exp()).collect()
    }
}

fn check_point(r: f64) {
    assert!(r.is_finite() && r > 0.0, "radial argument must be positive and finite (got {r})");
}

/// Truncated `Σ_j S_j(r) S_j(r') / (μ_j - 1)`.
#[derive(Debug, Clone)]
pub struct PlainGreen {
    table: SturmianTable,
    inv_mu_minus_one: Vec<f64>,
}

impl PlainGreen {
    pub fn new(cfg: &GreenEvalConfig) -> Result<Self, GreenError> {
        let GreenTarget::Energy(e) = &cfg.target else {
            return Err(GreenError::WrongTarget);
        };
        if cfg.truncation == 0 {
            return Err(GreenError::EmptyTruncation);
        }
        if !cfg.z.is_positive() {
            return Err(StateError::NonPositiveCharge(cfg.z.clone()).into());
        }
        let mut inv = Vec::with_capacity(cfg.truncation);
        for j in 0..cfg.truncation as u32 {
            let mu = sturmian_mu(j, cfg.l, e, &cfg.z)?;
            if mu.is_resonant() {
                return Err(GreenError::Pole { n_r: j });
            }
            // μ - 1 = (μ² - 1)/(μ + 1) keeps precision near a pole
            let num = (&mu.squared - Rational::one()).to_f64();
            inv.push((mu.value + 1.0) / num);
        }
        let k = (Rational::from(-2) * e).to_f64().sqrt();
        Ok(Self { table: SturmianTable::new(cfg.l, k, &cfg.z, cfg.truncation), inv_mu_minus_one: inv })
    }

    pub fn eval(&self, r: f64, rp: f64) -> f64 {
        check_point(r);
        check_point(rp);
        let a = self.table.values(r);
        let b = self.table.values(rp);
        self.inv_mu_minus_one.iter().zip(a.iter().zip(&b)).map(|(c, (x, y))| c * (x * y)).sum()
    }

    pub fn sturmian_values(&self, r: f64) -> Vec<f64> {
        self.table.values(r)
    }

    pub fn coefficient(&self, j: usize) -> f64 {
        self.inv_mu_minus_one[j]
    }

    pub fn scale(&self) -> f64 {
        self.table.k
    }
}

pub fn green_eval(cfg: &GreenEvalConfig, r: f64, rp: f64) -> Result<f64, GreenError> {
    Ok(PlainGreen::new(cfg)?.eval(r, rp))
}

/// Truncated reduced Green function of level `(n, l)`:
/// `N Σ_{j≠n_r} S_j S_j' / (j - n_r) + ½ S S' + r S_r S' + S r' S_r'`,
/// all Sturmians at `E_n` and `S = S_{n_r}`.
#[derive(Debug, Clone)]
pub struct ReducedGreen {
    state: QuantumState,
    table: SturmianTable,
    weights: Vec<f64>,
    r_derivative: RadialFunction,
}

impl ReducedGreen {
    pub fn new(cfg: &GreenEvalConfig) -> Result<Self, GreenError> {
        let GreenTarget::Level(n) = cfg.target else {
            return Err(GreenError::WrongTarget);
        };
        let state = QuantumState::level(n, cfg.l)?;
        if !cfg.z.is_positive() {
            return Err(StateError::NonPositiveCharge(cfg.z.clone()).into());
        }
        let n_r = state.n_r() as usize;
        let needed = n_r + REDUCED_MARGIN;
        if cfg.truncation < needed {
            return Err(GreenError::TruncationTooSmall { truncation: cfg.truncation, needed });
        }
        let nn = state.effective_n();
        let e_n = crate::coulomb2d::energy0(&state, &cfg.z);
        let s = sturmian(state.n_r(), cfg.l, &e_n, &cfg.z)?;
        let nf = nn.to_f64();
        let weights = (0..cfg.truncation)
            .map(|j| if j == n_r { 0.5 } else { nf / (j as f64 - n_r as f64) })
            .collect();
        let k = (&cfg.z / &nn).to_f64();
        Ok(Self {
            state,
            table: SturmianTable::new(cfg.l, k, &cfg.z, cfg.truncation),
            weights,
            r_derivative: s.r_derivative(),
        })
    }

    pub fn state(&self) -> &QuantumState {
        &self.state
    }

    /// Sturmian values at `r` and `r S'_{n_r}(r)`.
    fn node(&self, r: f64) -> (Vec<f64>, f64) {
        (self.table.values(r), self.r_derivative.eval(r))
    }

    fn combine(&self, a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> f64 {
        let n_r = self.state.n_r() as usize;
        let series: f64 = self.weights.iter().zip(a.0.iter().zip(&b.0)).map(|(w, (x, y))| w * (x * y)).sum();
        series + (a.1 * b.0[n_r] + a.0[n_r] * b.1)
    }

    pub fn eval(&self, r: f64, rp: f64) -> f64 {
        check_point(r);
        check_point(rp);
        self.combine(&self.node(r), &self.node(rp))
    }

    pub fn scale(&self) -> f64 {
        self.table.k
    }
}

pub fn green_reduced_eval(cfg: &GreenEvalConfig, r: f64, rp: f64) -> Result<f64, GreenError> {
    Ok(ReducedGreen::new(cfg)?.eval(r, rp))
}

/// Gauss–Laguerre rule in `x = 2kr` for integrands decaying like
/// `x^α e^{-x}`, returned as `(r_i, w_i)` pairs for `∫ … dr`.
fn radial_rule(nodes: usize, alpha: u32, k: f64) -> Vec<(f64, f64)> {
    GaussLaguerre::new(nodes, alpha)
        .plain_rule()
        .into_iter()
        .map(|(x, w)| (x / (2.0 * k), w / (2.0 * k)))
        .collect()
}

/// `∫ dr' (Z/r') S_m(r') G(E, r, r')` and the expected `S_m(r)/(μ_m - 1)`.
pub fn projection_check(cfg: &GreenEvalConfig, m: usize, r: f64) -> Result<(f64, f64), GreenError> {
    let g = PlainGreen::new(cfg)?;
    assert!(m < cfg.truncation, "projection index outside the truncation");
    let z = cfg.z.to_f64();
    let rule = radial_rule(cfg.quadrature, 2 * cfg.l, g.scale());
    let at_r = g.sturmian_values(r);
    let lhs = rule
        .iter()
        .map(|&(rp, w)| {
            let s = g.sturmian_values(rp);
            let gv: f64 = (0..cfg.truncation).map(|j| g.coefficient(j) * (at_r[j] * s[j])).sum();
            w * z / rp * s[m] * gv
        })
        .sum();
    Ok((lhs, at_r[m] * g.coefficient(m)))
}

/// `∫ dr P⁰_nl(r) G̃(r, r')` at fixed `r'`; zero in exact arithmetic.
pub fn orthogonality_residual(cfg: &GreenEvalConfig, rp: f64) -> Result<f64, GreenError> {
    let g = ReducedGreen::new(cfg)?;
    let p = bound_radial(g.state(), &cfg.z);
    let rule = radial_rule(cfg.quadrature, 2 * cfg.l + 1, g.scale());
    let fixed = g.node(rp);
    Ok(rule.iter().map(|&(r, w)| w * p.eval(r) * g.combine(&g.node(r), &fixed)).sum())
}

/// `-(Z⁶/64) ∬ r² P⁰(r) G̃(r, r') r'² P⁰(r') dr dr'` by tensor-product
/// quadrature; equals the charge-free `ε⁽⁴⁾`.
pub fn eps4_double_integral(cfg: &GreenEvalConfig) -> Result<f64, GreenError> {
    let g = ReducedGreen::new(cfg)?;
    let p = bound_radial(g.state(), &cfg.z);
    let rule = radial_rule(cfg.quadrature, 2 * cfg.l + 1, g.scale());
    let nodes: Vec<_> = rule.iter().map(|&(r, _)| g.node(r)).collect();
    let f: Vec<f64> = rule.iter().map(|&(r, w)| w * r * r * p.eval(r)).collect();
    let mut total = 0.0;
    for i in 0..rule.len() {
        if f[i] == 0.0 {
            continue;
        }
        let row: f64 = (0..rule.len()).filter(|&j| f[j] != 0.0).map(|j| f[j] * g.combine(&nodes[i], &nodes[j])).sum();
        total += f[i] * row;
    }
    Ok(-cfg.z.to_f64().powi(6) / 64.0 * total)
}

/// Second-order radial correction per unit `b²`:
/// `P⁽²⁾(r) = -(1/8) ∫ G̃(r, r') r'² P⁰(r') dr'`, with the projections taken
/// exactly.
#[derive(Debug, Clone)]
pub struct SecondOrderWave {
    green: ReducedGreen,
    /// `∫ r'² P⁰ S_j dr'`
    projections: Vec<f64>,
    /// `∫ r'² P⁰ r' S'_{n_r} dr'`
    derivative_projection: f64,
}

impl SecondOrderWave {
    pub fn new(state: &QuantumState, z: &Rational) -> Result<Self, GreenError> {
        let cfg = GreenEvalConfig::at_level(state, z.clone());
        let green = ReducedGreen::new(&cfg)?;
        let projections = (0..cfg.truncation as u32).map(|j| r2_element(state, j, z).to_f64()).collect();
        let p = bound_radial(state, z);
        let derivative_projection =
            p.overlap(&green.r_derivative, 2).expect("shared scale and l").to_f64();
        Ok(Self { green, projections, derivative_projection })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n_r = self.green.state.n_r() as usize;
        let (s, ds) = self.green.node(r);
        let series: f64 = self.green.weights.iter().zip(s.iter().zip(&self.projections)).map(|(w, (v, i))| w * v * i).sum();
        let i0 = self.projections[n_r];
        -(series + ds * i0 + s[n_r] * self.derivative_projection) / 8.0
    }
}
