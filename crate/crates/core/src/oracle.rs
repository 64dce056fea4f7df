//! Finite-field radial eigensolver used as a numerical cross-check.
//!
//! The radial Hamiltonian `T - Z/r + b² r² / 8` of one `l` channel is
//! diagonalized in the Sturmian basis of a fixed reference energy `E*`. The
//! Sturmian equation turns the kinetic and Coulomb parts into a diagonal
//! matrix, so every entry is an exact rational (given rational `k = √(-2E*)`).
//! Entries are rounded to `f64` exactly once.
//!
//! The basis functions are left unnormalized,
//! `φ_j(r) = x^{l+1/2} e^{-x/2} L_j^{(2l)}(x)` with `x = 2kr`, which keeps the
//! square roots of the Sturmian norms out of the matrices:
//!
//! ```text
//! O_ij = ∫ φ_i φ_j dr         = (2k)^-1 ∫ x^{2l+1} e^{-x} L_i L_j dx
//! R_ij = ∫ r² φ_i φ_j dr      = (2k)^-3 ∫ x^{2l+3} e^{-x} L_i L_j dx
//! H_ij = (μ_j - 1) Z W_j δ_ij + E* O_ij + (b²/8) R_ij,   W_j = (j+2l)!/j!
//! ```
//!
//! The solver works on the shifted pencil `H - E* O`, whose eigenvalues are
//! the level shifts `E - E*`. At the default `E* = E_n` the tracked shift is
//! the pure field-induced displacement, which keeps full relative precision
//! down to the `b⁴` term.

use nalgebra::{DMatrix, DVector};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::coulomb2d::{effective_n, QuantumState, StateError};
use crate::exactmath::{factorial_ratio, Rational};
use crate::laguerre::{cross_integral, moment3_band, LaguerreSpec};
use crate::perturb;

pub const DEFAULT_BASIS_SIZE: usize = 120;
/// Minimum number of basis functions above the tracked index.
pub const BASIS_MARGIN: usize = 20;
pub const ILL_CONDITIONED: f64 = 1e12;
pub const DEFAULT_GRID_POINTS: usize = 11;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("basis size {basis_size} is below target_n_r + {BASIS_MARGIN} = {needed}")]
    BasisTooSmall { basis_size: usize, needed: usize },
    #[error("reference energy must be negative (got {0})")]
    NonNegativeReference(Rational),
    #[error("reference energy {0} gives an irrational Sturmian scale √(-2E*)")]
    IrrationalScale(Rational),
    #[error("field strength must be finite and non-negative (got {0})")]
    InvalidField(f64),
    #[error("overlap matrix is not positive definite at pivot {pivot}")]
    NotPositiveDefinite { pivot: usize },
    #[error("level crossing at b = {b}: tracked level {tracked} is closest to eigenvalue index {other}")]
    LevelCrossing { b: f64, tracked: usize, other: usize },
    #[error("fit is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },
    #[error("field grid needs at least {needed} points including b = 0 (got {got})")]
    GridTooSmall { needed: usize, got: usize },
    #[error("field grid must contain b = 0")]
    GridMissingZero,
}

impl OracleError {
    /// Failures that a smaller field window may cure.
    pub fn is_window_failure(&self) -> bool {
        matches!(self, OracleError::LevelCrossing { .. } | OracleError::IllConditioned { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalerkinConfig {
    pub l: u32,
    pub z: Rational,
    pub b: f64,
    pub basis_size: usize,
    /// Sturmian scale anchor; `None` selects `E⁽⁰⁾` of the tracked level.
    pub reference_energy: Option<Rational>,
    pub target_n_r: u32,
    /// Also solve with twice the basis and report the change in the tracked
    /// eigenvalue.
    pub convergence_check: bool,
}

impl GalerkinConfig {
    pub fn for_state(state: &QuantumState, z: Rational, b: f64) -> Self {
        Self {
            l: state.l(),
            z,
            b,
            basis_size: DEFAULT_BASIS_SIZE,
            reference_energy: None,
            target_n_r: state.n_r(),
            convergence_check: false,
        }
    }

    pub fn tracked_level(&self) -> Result<QuantumState, StateError> {
        QuantumState::level(self.target_n_r + self.l + 1, self.l)
    }

    pub fn reference(&self) -> Result<Rational, OracleError> {
        match &self.reference_energy {
            Some(e) => Ok(e.clone()),
            None => {
                let n = self.target_n_r + self.l + 1;
                let nn = effective_n(n);
                Ok(-(&self.z * &self.z) / (Rational::from(2) * &nn * &nn))
            }
        }
    }

    fn validate(&self) -> Result<(), OracleError> {
        let needed = self.target_n_r as usize + BASIS_MARGIN;
        if self.basis_size < needed {
            return Err(OracleError::BasisTooSmall { basis_size: self.basis_size, needed });
        }
        if !self.z.is_positive() {
            return Err(StateError::NonPositiveCharge(self.z.clone()).into());
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(OracleError::InvalidField(self.b));
        }
        Ok(())
    }
}

/// Field-independent exact parts of the Galerkin pencil for one `l` block.
#[derive(Debug, Clone)]
pub struct ExactBasis {
    l: u32,
    reference: Rational,
    /// `(μ_j - 1) Z W_j`
    coulomb: Vec<Rational>,
    /// `overlap[d][j] = O_{j, j+d}`, `d ∈ {0, 1}`
    overlap: [Vec<Rational>; 2],
    /// `r2[d][j] = R_{j, j+d}`, `d ∈ {0, 1, 2, 3}`
    r2: [Vec<Rational>; 4],
}

impl ExactBasis {
    pub fn new(l: u32, z: &Rational, reference: &Rational, size: usize) -> Result<Self, OracleError> {
        if !reference.is_negative() {
            return Err(OracleError::NonNegativeReference(reference.clone()));
        }
        let k = (Rational::from(-2) * reference)
            .sqrt_exact()
            .ok_or_else(|| OracleError::IrrationalScale(reference.clone()))?;
        let alpha = 2 * l;
        let two_k = Rational::from(2) * &k;
        let eight_k3 = two_k.pow(3);
        let half = Rational::frac(1, 2);

        let coulomb = (0..size)
            .map(|j| {
                let mu = (Rational::from((j as u32 + l) as i64) + &half) * &k / z;
                let w = Rational::from(factorial_ratio(j as u64, alpha as u64));
                (mu - Rational::one()) * z * w
            })
            .collect();
        let band = |d: usize, f: &dyn Fn(u32, u32) -> Rational| -> Vec<Rational> {
            (0..size.saturating_sub(d)).map(|j| f(j as u32, (j + d) as u32)).collect()
        };
        let o = |i: u32, j: u32| {
            let v = cross_integral(alpha as i64 + 1, LaguerreSpec::new(i, alpha), LaguerreSpec::new(j, alpha))
                .expect("non-negative power");
            v / &two_k
        };
        let r = |i: u32, j: u32| moment3_band(i, j, alpha) / &eight_k3;
        Ok(Self {
            l,
            reference: reference.clone(),
            coulomb,
            overlap: [band(0, &o), band(1, &o)],
            r2: [band(0, &r), band(1, &r), band(2, &r), band(3, &r)],
        })
    }

    pub fn size(&self) -> usize {
        self.coulomb.len()
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn reference(&self) -> &Rational {
        &self.reference
    }

    pub fn overlap(&self, i: usize, j: usize) -> Rational {
        let (lo, d) = (i.min(j), i.abs_diff(j));
        self.overlap.get(d).map_or_else(Rational::zero, |v| v[lo].clone())
    }

    pub fn r2(&self, i: usize, j: usize) -> Rational {
        let (lo, d) = (i.min(j), i.abs_diff(j));
        self.r2.get(d).map_or_else(Rational::zero, |v| v[lo].clone())
    }

    /// `(H - E* O)_ij` at field `b`.
    pub fn shifted(&self, i: usize, j: usize, b_sq_over_8: &Rational) -> Rational {
        let mut v = b_sq_over_8 * &self.r2(i, j);
        if i == j {
            v += &self.coulomb[i];
        }
        v
    }

    /// `H_ij` at field `b`.
    pub fn hamiltonian(&self, i: usize, j: usize, b_sq_over_8: &Rational) -> Rational {
        self.shifted(i, j, b_sq_over_8) + &self.reference * &self.overlap(i, j)
    }

    fn dense<F: Fn(usize, usize) -> Rational>(&self, f: F) -> DMatrix<f64> {
        let m = self.size();
        let mut out = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in i..(i + 4).min(m) {
                let v = f(i, j).to_f64();
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    /// Exact `cᵀ (H - E* O) c / cᵀ O c` for a floating vector `c`, each
    /// component taken at its exact binary value. Components below `1e-40`
    /// of the largest are dropped; that perturbs the quotient at the `1e-80`
    /// level.
    pub fn rayleigh_quotient(&self, c: &DVector<f64>, b: &Rational) -> Rational {
        let m = self.size();
        assert_eq!(c.len(), m, "vector length differs from basis size");
        let cut = c.amax() * 1e-40;
        let cq: Vec<Option<Rational>> = c
            .iter()
            .map(|&v| (v.abs() > cut).then(|| Rational::from_f64(v).expect("finite component")))
            .collect();
        let b_sq_over_8 = b * b / Rational::from(8);
        let two = Rational::from(2);
        let mut coulomb = Rational::zero();
        let mut r2 = Rational::zero();
        let mut overlap = Rational::zero();
        for i in 0..m {
            let Some(ci) = &cq[i] else { continue };
            let sq = ci * ci;
            coulomb += &self.coulomb[i] * &sq;
            overlap += &self.overlap[0][i] * &sq;
            r2 += &self.r2[0][i] * &sq;
            for d in 1..=3 {
                let Some(Some(cj)) = cq.get(i + d) else { continue };
                let cross = &two * ci * cj;
                if d == 1 {
                    overlap += &self.overlap[1][i] * &cross;
                }
                r2 += &self.r2[d][i] * &cross;
            }
        }
        (coulomb + b_sq_over_8 * r2) / overlap
    }

    pub fn overlap_matrix(&self) -> DMatrix<f64> {
        self.dense(|i, j| self.overlap(i, j))
    }

    pub fn r2_matrix(&self) -> DMatrix<f64> {
        self.dense(|i, j| self.r2(i, j))
    }

    pub fn hamiltonian_matrix(&self, b: &Rational) -> DMatrix<f64> {
        let c = b * b / Rational::from(8);
        self.dense(|i, j| self.hamiltonian(i, j, &c))
    }

    pub fn shifted_matrix(&self, b: &Rational) -> DMatrix<f64> {
        let c = b * b / Rational::from(8);
        self.dense(|i, j| self.shifted(i, j, &c))
    }
}

fn exact_field(b: f64) -> Result<Rational, OracleError> {
    if !(b.is_finite() && b >= 0.0) {
        return Err(OracleError::InvalidField(b));
    }
    Rational::from_f64(b).ok_or(OracleError::InvalidField(b))
}

/// `(H, O)` for the configuration, each entry rounded once from its exact
/// rational value.
pub fn build_matrices(cfg: &GalerkinConfig) -> Result<(DMatrix<f64>, DMatrix<f64>), OracleError> {
    cfg.validate()?;
    let basis = ExactBasis::new(cfg.l, &cfg.z, &cfg.reference()?, cfg.basis_size)?;
    Ok((basis.hamiltonian_matrix(&exact_field(cfg.b)?), basis.overlap_matrix()))
}

/// Lower Cholesky factor; reports the first non-positive pivot.
fn cholesky(o: &DMatrix<f64>) -> Result<DMatrix<f64>, OracleError> {
    let n = o.nrows();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut d = o[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= 0.0 {
            return Err(OracleError::NotPositiveDefinite { pivot: j });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = o[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Eigenpairs of `H c = λ O c`, ascending. Columns of `vectors` are
/// `O`-normalized.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn solve_generalized(h: &DMatrix<f64>, o: &DMatrix<f64>) -> Result<GeneralizedEigen, OracleError> {
    let n = h.nrows();
    assert!(h.is_square() && o.shape() == h.shape(), "matrix shapes differ");
    // diagonal equilibration
    let mut scale = DVector::<f64>::zeros(n);
    for i in 0..n {
        let d = o[(i, i)];
        if d.is_nan() || d <= 0.0 {
            return Err(OracleError::NotPositiveDefinite { pivot: i });
        }
        scale[i] = d.sqrt().recip();
    }
    let hs = DMatrix::from_fn(n, n, |i, j| h[(i, j)] * scale[i] * scale[j]);
    let os = DMatrix::from_fn(n, n, |i, j| o[(i, j)] * scale[i] * scale[j]);
    let l = cholesky(&os)?;
    let x = l.solve_lower_triangular(&hs).expect("non-singular factor");
    let c = l.solve_lower_triangular(&x.transpose()).expect("non-singular factor");
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    let mut vectors = l.transpose().solve_upper_triangular(&y).expect("non-singular factor");
    for (i, mut row) in vectors.row_iter_mut().enumerate() {
        row *= scale[i];
    }
    Ok(GeneralizedEigen { values, vectors })
}

/// Rayleigh-quotient inverse iteration on `(A, O)` from a starting pair.
/// Returns the refined eigenvalue, vector and relative residual
/// `‖A c - λ O c‖ / (‖A‖ ‖c‖)` in the equilibrated frame.
fn refine(a: &DMatrix<f64>, o: &DMatrix<f64>, mut lambda: f64, mut c: DVector<f64>) -> (f64, DVector<f64>, f64) {
    let n = a.nrows();
    let scale = DVector::from_fn(n, |i, _| o[(i, i)].sqrt().recip());
    let a = DMatrix::from_fn(n, n, |i, j| a[(i, j)] * scale[i] * scale[j]);
    let o = DMatrix::from_fn(n, n, |i, j| o[(i, j)] * scale[i] * scale[j]);
    c = c.component_div(&scale);
    let rayleigh = |c: &DVector<f64>| (c.dot(&(&a * c))) / (c.dot(&(&o * c)));
    for _ in 0..3 {
        let shifted = &a - &o * lambda;
        let Some(y) = shifted.lu().solve(&(&o * &c)) else {
            break;
        };
        let norm = y.norm();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        c = y / norm;
        lambda = rayleigh(&c);
    }
    let r = &a * &c - &o * &c * lambda;
    let a_norm = a.norm().max(f64::MIN_POSITIVE);
    let residual = r.norm() / (a_norm * c.norm());
    (lambda, c.component_mul(&scale), residual)
}

#[derive(Debug, Clone)]
struct PointSolution {
    shifts: Vec<f64>,
    tracked: usize,
    tracked_shift: f64,
    exact_shift: Rational,
    residual: f64,
}

fn solve_point(basis: &ExactBasis, b: f64, tracked: usize) -> Result<PointSolution, OracleError> {
    let b = exact_field(b)?;
    let a = basis.shifted_matrix(&b);
    let o = basis.overlap_matrix();
    let eig = solve_generalized(&a, &o)?;
    let start = eig.vectors.column(tracked).into_owned();
    let (_, c, residual) = refine(&a, &o, eig.values[tracked], start);
    let exact_shift = basis.rayleigh_quotient(&c, &b);
    Ok(PointSolution { shifts: eig.values, tracked, tracked_shift: exact_shift.to_f64(), exact_shift, residual })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GalerkinResult {
    /// Ascending generalized eigenvalues in Hartree.
    pub eigenvalues: Vec<f64>,
    pub reference_energy: f64,
    pub tracked_index: usize,
    pub tracked_energy: f64,
    /// `tracked_energy - E*`, refined to full relative precision.
    pub tracked_shift: f64,
    pub residual: f64,
    /// Ratio of extreme eigenvalues of the diagonally scaled overlap matrix.
    pub overlap_condition: f64,
    /// Change of the tracked eigenvalue when the basis is doubled.
    pub convergence_delta: Option<f64>,
}

fn overlap_condition(o: &DMatrix<f64>) -> f64 {
    let n = o.nrows();
    let s = DMatrix::from_fn(n, n, |i, j| o[(i, j)] / (o[(i, i)] * o[(j, j)]).sqrt());
    let ev = s.symmetric_eigenvalues();
    let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    hi / lo
}

pub fn galerkin_solve(cfg: &GalerkinConfig) -> Result<GalerkinResult, OracleError> {
    cfg.validate()?;
    let reference = cfg.reference()?;
    let e_ref = reference.to_f64();
    let tracked = cfg.target_n_r as usize;
    let basis = ExactBasis::new(cfg.l, &cfg.z, &reference, cfg.basis_size)?;
    let point = solve_point(&basis, cfg.b, tracked)?;
    let convergence_delta = if cfg.convergence_check {
        let big = ExactBasis::new(cfg.l, &cfg.z, &reference, 2 * cfg.basis_size)?;
        let p2 = solve_point(&big, cfg.b, tracked)?;
        Some(p2.tracked_shift - point.tracked_shift)
    } else {
        None
    };
    Ok(GalerkinResult {
        eigenvalues: point.shifts.iter().map(|s| e_ref + s).collect(),
        reference_energy: e_ref,
        tracked_index: tracked,
        tracked_energy: e_ref + point.tracked_shift,
        tracked_shift: point.tracked_shift,
        residual: point.residual,
        overlap_condition: overlap_condition(&basis.overlap_matrix()),
        convergence_delta,
    })
}

// ---------------------------------------------------------------------------
// field-series fit

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitConfig {
    pub basis_size: usize,
    /// Refit with `b¹, b³` columns and report their coefficients.
    pub odd_diagnostic: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { basis_size: DEFAULT_BASIS_SIZE, odd_diagnostic: true }
    }
}

/// Least-squares polynomial fit in the scaled variable `s = b / b_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerFit {
    pub powers: Vec<u32>,
    /// Coefficients of `b^p` (unscaled).
    pub coefficients: Vec<f64>,
    pub condition: f64,
    pub rms_residual: f64,
}

impl PowerFit {
    pub fn coeff(&self, p: u32) -> Option<f64> {
        self.powers.iter().position(|&q| q == p).map(|i| self.coefficients[i])
    }
}

/// Least-squares fit of `values` by the monomials `b^p`, `p ∈ powers`.
///
/// The normal equations are solved exactly, so the coefficients carry the
/// full precision of the data. The condition number of the design matrix in
/// the scaled variable `s = b / b_max` is still computed in floating point
/// and gates the fit.
pub fn fit_powers(grid: &[f64], values: &[Rational], powers: &[u32]) -> Result<PowerFit, OracleError> {
    assert_eq!(grid.len(), values.len());
    if grid.len() < powers.len() {
        return Err(OracleError::GridTooSmall { needed: powers.len(), got: grid.len() });
    }
    let b_max = grid.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let b_max = if b_max > 0.0 { b_max } else { 1.0 };
    let design = DMatrix::from_fn(grid.len(), powers.len(), |i, j| (grid[i] / b_max).powi(powers[j] as i32));
    let sv = design.singular_values();
    let (smin, smax) = sv.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let condition = smax / smin;
    if !(condition.is_finite() && condition < ILL_CONDITIONED) {
        return Err(OracleError::IllConditioned { condition });
    }

    let bq: Vec<Rational> = grid.iter().map(|&b| exact_field(b.abs())).collect::<Result<_, _>>()?;
    let cols: Vec<Vec<Rational>> =
        powers.iter().map(|&p| bq.iter().map(|b| b.pow(p as i32)).collect()).collect();
    let dot = |a: &[Rational], b: &[Rational]| a.iter().zip(b).map(|(x, y)| x * y).sum::<Rational>();
    let normal: Vec<Vec<Rational>> = cols.iter().map(|ci| cols.iter().map(|cj| dot(ci, cj)).collect()).collect();
    let rhs: Vec<Rational> = cols.iter().map(|ci| dot(ci, values)).collect();
    let x = solve_exact(normal, rhs).ok_or(OracleError::IllConditioned { condition: f64::INFINITY })?;

    let sum_sq: Rational = (0..grid.len())
        .map(|i| {
            let model: Rational = cols.iter().zip(&x).map(|(c, xi)| &c[i] * xi).sum();
            let r = model - &values[i];
            &r * &r
        })
        .sum();
    let rms_residual = (sum_sq.to_f64() / grid.len() as f64).sqrt();
    Ok(PowerFit {
        powers: powers.to_vec(),
        coefficients: x.iter().map(Rational::to_f64).collect(),
        condition,
        rms_residual,
    })
}

/// Gaussian elimination over the rationals; `None` for a singular system.
fn solve_exact(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip().ok()?;
        let (upper, lower) = a.split_at_mut(col + 1);
        let (b_upper, b_lower) = b.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for (row, rhs) in lower.iter_mut().zip(b_lower.iter_mut()) {
            if row[col].is_zero() {
                continue;
            }
            let f = &row[col] * &inv;
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= &(&f * p);
            }
            *rhs -= &(&f * &b_upper[col]);
        }
    }
    let mut x = vec![Rational::zero(); n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc -= &(&a[r][c] * &x[c]);
        }
        x[r] = acc / &a[r][r];
    }
    Some(x)
}

pub const EVEN_POWERS: [u32; 4] = [0, 2, 4, 6];
pub const ABSORBER_POWERS: [u32; 5] = [0, 2, 4, 6, 8];
pub const ODD_POWERS: [u32; 7] = [0, 1, 2, 3, 4, 6, 8];
pub const ODD_TOLERANCE: f64 = 1e-10;
pub const EPS2_REL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OddDiagnostic {
    pub c1: f64,
    pub c3: f64,
    pub condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitVerdicts {
    pub eps2_relative_error: f64,
    pub eps2_within_tolerance: bool,
    pub eps4_abs_error: f64,
    pub odd_within_tolerance: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldFitResult {
    pub state: QuantumState,
    pub z: Rational,
    pub reference_energy: f64,
    pub grid: Vec<f64>,
    pub energies: Vec<f64>,
    /// `E(b) - E*` per grid point.
    pub shifts: Vec<f64>,
    pub fit: PowerFit,
    pub c0: f64,
    pub c2: f64,
    pub c4: f64,
    pub c6: f64,
    /// Change in `ĉ₄` when a `b⁸` column is added.
    pub c4_uncertainty: Option<f64>,
    /// `ĉ₂ Z²` and `ĉ₄ Z⁶`, comparable with the charge-free coefficients.
    pub eps2_estimate: f64,
    pub eps4_estimate: f64,
    pub eps2_exact: Rational,
    pub eps4_exact: Rational,
    pub odd: Option<OddDiagnostic>,
    pub max_residual: f64,
    pub tolerances: FitTolerances,
    pub verdicts: FitVerdicts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitTolerances {
    pub eps2_relative: f64,
    pub odd_abs: f64,
}

/// Solves every grid point (in parallel with the `parallel` feature) and
/// follows the tracked level by nearest-energy matching from `b = 0`.
fn track(basis: &ExactBasis, grid: &[f64], tracked: usize) -> Result<Vec<PointSolution>, OracleError> {
    #[cfg(feature = "parallel")]
    let points: Vec<_> = grid.par_iter().map(|&b| solve_point(basis, b, tracked)).collect();
    #[cfg(not(feature = "parallel"))]
    let points: Vec<_> = grid.iter().map(|&b| solve_point(basis, b, tracked)).collect();
    let points = points.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[a].total_cmp(&grid[b]));
    let mut prev = 0.0;
    for &i in &order {
        let p = &points[i];
        let nearest = p
            .shifts
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - prev).abs().total_cmp(&(b.1 - prev).abs()))
            .map(|(j, _)| j)
            .expect("non-empty spectrum");
        if nearest != p.tracked {
            return Err(OracleError::LevelCrossing { b: grid[i], tracked: p.tracked, other: nearest });
        }
        prev = p.tracked_shift;
    }
    Ok(points)
}

pub fn fit_field_series(
    state: &QuantumState,
    z: &Rational,
    grid: &[f64],
    cfg: &FitConfig,
) -> Result<FieldFitResult, OracleError> {
    if grid.len() < 5 {
        return Err(OracleError::GridTooSmall { needed: 5, got: grid.len() });
    }
    if !grid.contains(&0.0) {
        return Err(OracleError::GridMissingZero);
    }
    let mut gcfg = GalerkinConfig::for_state(state, z.clone(), 0.0);
    gcfg.basis_size = cfg.basis_size;
    gcfg.validate()?;
    for &b in grid {
        exact_field(b)?;
    }
    let reference = gcfg.reference()?;
    let e_ref = reference.to_f64();
    let basis = ExactBasis::new(state.l(), z, &reference, cfg.basis_size)?;
    let points = track(&basis, grid, state.n_r() as usize)?;

    let exact: Vec<Rational> = points.iter().map(|p| p.exact_shift.clone()).collect();
    let shifts: Vec<f64> = points.iter().map(|p| p.tracked_shift).collect();
    let fit = fit_powers(grid, &exact, &EVEN_POWERS)?;
    let c4 = fit.coeff(4).unwrap_or(0.0);
    let c4_uncertainty = if grid.len() > ABSORBER_POWERS.len() {
        fit_powers(grid, &exact, &ABSORBER_POWERS).ok().map(|f| (f.coeff(4).unwrap_or(0.0) - c4).abs())
    } else {
        None
    };
    let odd = if cfg.odd_diagnostic && grid.len() > ODD_POWERS.len() {
        let f = fit_powers(grid, &exact, &ODD_POWERS)?;
        Some(OddDiagnostic { c1: f.coeff(1).unwrap_or(0.0), c3: f.coeff(3).unwrap_or(0.0), condition: f.condition })
    } else {
        None
    };

    let z2 = z.to_f64().powi(2);
    let eps2_estimate = fit.coeff(2).unwrap_or(0.0) * z2;
    let eps4_estimate = c4 * z2.powi(3);
    let eps2_exact = perturb::eps2_closed(state.n(), state.l())?;
    let eps4_exact = perturb::eps4_closed(state.n(), state.l())?;
    let eps2_relative_error = (eps2_estimate / eps2_exact.to_f64() - 1.0).abs();
    let verdicts = FitVerdicts {
        eps2_relative_error,
        eps2_within_tolerance: eps2_relative_error < EPS2_REL_TOLERANCE,
        eps4_abs_error: (eps4_estimate - eps4_exact.to_f64()).abs(),
        odd_within_tolerance: odd.as_ref().map(|o| o.c1.abs() < ODD_TOLERANCE && o.c3.abs() < ODD_TOLERANCE),
    };
    Ok(FieldFitResult {
        state: *state,
        z: z.clone(),
        reference_energy: e_ref,
        grid: grid.to_vec(),
        energies: shifts.iter().map(|s| e_ref + s).collect(),
        c0: e_ref + fit.coeff(0).unwrap_or(0.0),
        c2: fit.coeff(2).unwrap_or(0.0),
        c4,
        c6: fit.coeff(6).unwrap_or(0.0),
        shifts,
        fit,
        c4_uncertainty,
        eps2_estimate,
        eps4_estimate,
        eps2_exact,
        eps4_exact,
        odd,
        max_residual: points.iter().map(|p| p.residual).fold(0.0, f64::max),
        tolerances: FitTolerances { eps2_relative: EPS2_REL_TOLERANCE, odd_abs: ODD_TOLERANCE },
        verdicts,
    })
}

/// Largest field of the default window: `0.05 Z² (N₁/N_n)⁴` with `N₁ = 1/2`.
pub fn default_b_max(state: &QuantumState, z: &Rational) -> f64 {
    let ratio = 0.5 / state.effective_n().to_f64();
    0.05 * z.to_f64().powi(2) * ratio.powi(4)
}

/// `points` equally spaced fields from 0 to `b_max`.
pub fn uniform_grid(b_max: f64, points: usize) -> Vec<f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points.max(2)).map(|i| b_max * i as f64 / last).collect()
}

/// Fit on the default window scaled by `grid_scale`, halving the window up to
/// three times when tracking or conditioning fails.
pub fn fit_default(
    state: &QuantumState,
    z: &Rational,
    grid_scale: f64,
    cfg: &FitConfig,
) -> Result<FieldFitResult, OracleError> {
    let mut b_max = default_b_max(state, z) * grid_scale;
    let mut attempt = 0;
    loop {
        match fit_field_series(state, z, &uniform_grid(b_max, DEFAULT_GRID_POINTS), cfg) {
            Err(e) if e.is_window_failure() && attempt < 3 => {
                attempt += 1;
                b_max /= 2.0;
            }
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laguerre::brute_force_integral;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn e_n(n: u32, z: f64) -> f64 {
        let nn = n as f64 - 0.5;
        -z * z / (2.0 * nn * nn)
    }

    #[test]
    fn one_by_one_pencil() {
        let h = DMatrix::from_element(1, 1, -0.75);
        let o = DMatrix::from_element(1, 1, 1.0);
        assert_eq!(solve_generalized(&h, &o).unwrap().values, vec![-0.75]);
    }

    #[test]
    fn indefinite_overlap_reports_pivot() {
        let o = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let h = DMatrix::identity(2, 2);
        assert_eq!(solve_generalized(&h, &o).unwrap_err(), OracleError::NotPositiveDefinite { pivot: 1 });
    }

    #[test]
    fn matrices_symmetric_and_banded() {
        let cfg = GalerkinConfig { b: 0.03, ..GalerkinConfig::for_state(&QuantumState::level(3, 1).unwrap(), q("1"), 0.0) };
        let (h, o) = build_matrices(&cfg).unwrap();
        let basis = ExactBasis::new(1, &q("1"), &cfg.reference().unwrap(), cfg.basis_size).unwrap();
        let r = basis.r2_matrix();
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                assert_eq!(h[(i, j)], h[(j, i)]);
                let d = i.abs_diff(j);
                if d > 1 {
                    assert_eq!(o[(i, j)], 0.0);
                } else {
                    assert_ne!(o[(i, j)], 0.0);
                }
                if d > 3 {
                    assert_eq!(r[(i, j)], 0.0);
                    assert_eq!(h[(i, j)], 0.0);
                } else {
                    assert_ne!(r[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn entries_match_brute_force() {
        let (l, z, e) = (2u32, q("2"), q("-8/25"));
        let basis = ExactBasis::new(l, &z, &e, 24).unwrap();
        let k = q("4/5");
        let a = 2 * l;
        for i in 0..8u32 {
            for j in 0..8u32 {
                let spec = |m| LaguerreSpec::new(m, a);
                let o = brute_force_integral(a as i64 + 1, spec(i), spec(j)).unwrap() / (q("2") * &k);
                assert_eq!(basis.overlap(i as usize, j as usize), o);
                let r = brute_force_integral(a as i64 + 3, spec(i), spec(j)).unwrap() / (q("2") * &k).pow(3);
                assert_eq!(basis.r2(i as usize, j as usize), r);
            }
        }
        // Coulomb part of the diagonal: (μ_j - 1) Z ∫ x^{2l} e^{-x} L_j² dx
        let c = q("1/8");
        for j in 0..6u32 {
            let spec = LaguerreSpec::new(j, a);
            let w = brute_force_integral(a as i64, spec, spec).unwrap();
            let mu = (Rational::from((j + l) as i64) + q("1/2")) * &k / &z;
            let want = (mu - q("1")) * &z * w + &c * basis.r2(j as usize, j as usize);
            assert_eq!(basis.shifted(j as usize, j as usize, &c), want);
        }
    }

    #[test]
    fn irrational_scale_rejected() {
        assert!(matches!(ExactBasis::new(0, &q("1"), &q("-1"), 30), Err(OracleError::IrrationalScale(_))));
        assert!(matches!(ExactBasis::new(0, &q("1"), &q("1/2"), 30), Err(OracleError::NonNegativeReference(_))));
        let mut cfg = GalerkinConfig::for_state(&QuantumState::level(1, 0).unwrap(), q("1"), 0.0);
        cfg.basis_size = 10;
        assert!(matches!(build_matrices(&cfg), Err(OracleError::BasisTooSmall { .. })));
    }

    #[test]
    fn zero_field_levels() {
        for z in [1u32, 2] {
            for n in 1..=4 {
                for l in 0..n {
                    let s = QuantumState::level(n, l).unwrap();
                    let r = galerkin_solve(&GalerkinConfig::for_state(&s, Rational::from(z as i64), 0.0)).unwrap();
                    let want = e_n(n, z as f64);
                    assert!((r.tracked_energy - want).abs() < 1e-12, "n={n} l={l} Z={z}");
                    assert!((r.eigenvalues[s.n_r() as usize] - want).abs() < 1e-12);
                    assert!(r.residual < 1e-10);
                }
            }
        }
    }

    #[test]
    fn spectrum_head() {
        let s = QuantumState::level(1, 0).unwrap();
        let r = galerkin_solve(&GalerkinConfig::for_state(&s, q("1"), 0.0)).unwrap();
        for (i, &v) in r.eigenvalues.iter().take(4).enumerate() {
            assert!((v - e_n(i as u32 + 1, 1.0)).abs() < 1e-10, "level {i}: {v}");
        }
        assert!(r.overlap_condition > 1.0 && r.overlap_condition < 1e8);
    }

    #[test]
    fn field_raises_low_levels() {
        let s = QuantumState::level(1, 0).unwrap();
        let off = galerkin_solve(&GalerkinConfig::for_state(&s, q("1"), 0.0)).unwrap();
        let on = galerkin_solve(&GalerkinConfig::for_state(&s, q("1"), 0.01)).unwrap();
        for i in 0..3 {
            assert!(on.eigenvalues[i] > off.eigenvalues[i]);
        }
    }

    #[test]
    fn basis_convergence_and_monotonicity() {
        for (n, l) in [(1, 0), (2, 0), (2, 1), (3, 0), (3, 2)] {
            let s = QuantumState::level(n, l).unwrap();
            let b = 0.05 * (0.5 / (n as f64 - 0.5)).powi(4);
            let mut cfg = GalerkinConfig::for_state(&s, q("1"), b);
            cfg.convergence_check = true;
            let r = galerkin_solve(&cfg).unwrap();
            let d = r.convergence_delta.unwrap();
            assert!(d.abs() < 1e-11, "({n},{l}): {d}");
            let mut prev = f64::INFINITY;
            for m in [30, 40, 60, 90] {
                cfg.basis_size = m;
                cfg.convergence_check = false;
                let e = galerkin_solve(&cfg).unwrap().tracked_energy;
                assert!(e <= prev + 1e-15, "({n},{l}) M={m}");
                prev = e;
            }
        }
    }

    #[test]
    fn fit_recovers_polynomial() {
        let grid = uniform_grid(0.05, 11);
        let vals: Vec<Rational> = grid
            .iter()
            .map(|&b| {
                let b = Rational::from_f64(b).unwrap();
                q("1") - q("2") * &b * &b + q("3") * b.pow(4)
            })
            .collect();
        let f = fit_powers(&grid, &vals, &EVEN_POWERS).unwrap();
        assert_eq!(f.coeff(2), Some(-2.0));
        assert_eq!(f.coeff(4), Some(3.0));
        assert_eq!(f.coeff(6), Some(0.0));
        assert_eq!(f.rms_residual, 0.0);
        let err = fit_powers(&grid[..3], &vals[..3], &EVEN_POWERS).unwrap_err();
        assert!(matches!(err, OracleError::GridTooSmall { .. }));
        let dup = vec![0.0, 0.0, 0.0, 0.0, 0.05];
        assert!(matches!(fit_powers(&dup, &vec![q("0"); 5], &EVEN_POWERS), Err(OracleError::IllConditioned { .. })));
    }

    #[test]
    fn ground_state_fit() {
        let s = QuantumState::level(1, 0).unwrap();
        let grid = [0.0, 0.01, 0.02, 0.03, 0.04, 0.05];
        let r = fit_field_series(&s, &q("1"), &grid, &FitConfig::default()).unwrap();
        assert!((r.c2 / (3.0 / 64.0) - 1.0).abs() < 1e-8, "{}", r.c2);
        assert!((r.c4 / (-159.0 / 65536.0) - 1.0).abs() < 0.01, "{}", r.c4);
        assert!((r.c0 + 2.0).abs() < 1e-12);
    }

    #[test]
    fn default_window_fits_n_le_3() {
        for n in 1..=3 {
            for l in 0..n {
                let s = QuantumState::level(n, l).unwrap();
                let r = fit_default(&s, &q("1"), 1.0, &FitConfig::default()).unwrap();
                assert!(r.verdicts.eps2_within_tolerance, "({n},{l}) {}", r.verdicts.eps2_relative_error);
                assert_eq!(r.verdicts.odd_within_tolerance, Some(true), "({n},{l}) {:?}", r.odd);
            }
        }
    }

    #[test]
    fn fit_with_charge_two() {
        let s = QuantumState::level(2, 1).unwrap();
        let r = fit_default(&s, &q("2"), 1.0, &FitConfig::default()).unwrap();
        assert!((r.eps2_estimate / (45.0 / 32.0) - 1.0).abs() < 1e-6);
        assert!((r.c0 - e_n(2, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn grid_requirements() {
        let s = QuantumState::level(1, 0).unwrap();
        let cfg = FitConfig::default();
        assert!(matches!(fit_field_series(&s, &q("1"), &[0.0, 0.01], &cfg), Err(OracleError::GridTooSmall { .. })));
        let g = [0.01, 0.02, 0.03, 0.04, 0.05];
        assert_eq!(fit_field_series(&s, &q("1"), &g, &cfg).unwrap_err(), OracleError::GridMissingZero);
    }
}
