//! Reference coefficient table and the end-to-end validation run: exact
//! dual-route comparison, table comparison, numerical fits and the
//! ground-state dispute.

use serde::Serialize;

use crate::coulomb2d::QuantumState;
use crate::exactmath::{factorize_rational, Rational};
use crate::oracle::{self, FieldFitResult, FitConfig};
use crate::perturb::{self, DisputeReport, NumericEstimate};

/// One published row: `(n, l, ε⁽²⁾, ε⁽²⁾ factorized, ε⁽⁴⁾, ε⁽⁴⁾ factorized)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceRow {
    pub n: u32,
    pub l: u32,
    pub eps2: &'static str,
    pub eps2_factored: &'static str,
    pub eps4: &'static str,
    pub eps4_factored: &'static str,
}

const fn row(
    n: u32,
    l: u32,
    eps2: &'static str,
    eps2_factored: &'static str,
    eps4: &'static str,
    eps4_factored: &'static str,
) -> ReferenceRow {
    ReferenceRow { n, l, eps2, eps2_factored, eps4, eps4_factored }
}

/// Published coefficients for `n <= 4`.
pub const REFERENCE_TABLE: [ReferenceRow; 10] = [
    row(1, 0, "3/64", "3/2^6", "-159/65536", "-3×53/2^16"),
    row(2, 0, "117/64", "3^2×13/2^6", "-1172961/65536", "-3^6×1609/2^16"),
    row(2, 1, "45/32", "3^2×5/2^5", "-462915/32768", "-3^6×5×127/2^15"),
    row(3, 0, "825/64", "3×5^2×11/2^6", "-124078125/65536", "-3×5^6×2647/2^16"),
    row(3, 1, "375/32", "3×5^3/2^5", "-56578125/32768", "-3×5^6×17×71/2^15"),
    row(3, 2, "525/64", "3×5^2×7/2^6", "-76453125/65536", "-3×5^6×7×233/2^16"),
    row(4, 0, "3087/64", "3^2×7^3/2^6", "-3061109331/65536", "-3^2×7^8×59/2^16"),
    row(4, 1, "735/16", "3×5×7^2/2^4", "-728835555/16384", "-3×5×7^7×59/2^14"),
    row(4, 2, "2499/64", "3×7^2×17/2^6", "-2448393339/65536", "-3×7^7×991/2^16"),
    row(4, 3, "441/16", "3^2×7^2/2^4", "-392830011/16384", "-3^2×7^7×53/2^14"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub group: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(group: &str, name: String, passed: bool, detail: String) -> Self {
        Self { group: group.to_string(), name, passed, detail }
    }
}

/// `eps2_integral = eps2_closed` and `eps4_sturmian = eps4_closed` for every
/// state with `n <= max_n`; two checks per state.
pub fn dual_route_checks(max_n: u32) -> Vec<Check> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for l in 0..n {
            let pairs = [
                ("eps2", perturb::eps2_integral(n, l), perturb::eps2_closed(n, l)),
                ("eps4", perturb::eps4_sturmian(n, l), perturb::eps4_closed(n, l)),
            ];
            for (name, route, closed) in pairs {
                let (route, closed) = (route.expect("valid state"), closed.expect("valid state"));
                let passed = route == closed;
                let detail = if passed { closed.to_string() } else { format!("{route} != {closed}") };
                out.push(Check::new("dual-route", format!("{name}({n},{l})"), passed, detail));
            }
        }
    }
    out
}

/// Computed coefficients against a reference table, both as rationals and as
/// factorized strings; four checks per row.
pub fn table_checks(reference: &[ReferenceRow]) -> Vec<Check> {
    let mut out = Vec::new();
    for r in reference {
        let coeffs = perturb::coefficients(r.n, r.l, perturb::Provenance::ClosedForm);
        let Ok(c) = coeffs else {
            out.push(Check::new("table", format!("({},{})", r.n, r.l), false, "invalid state".into()));
            continue;
        };
        for (name, value, want, want_factored) in
            [("eps2", &c.eps2, r.eps2, r.eps2_factored), ("eps4", &c.eps4, r.eps4, r.eps4_factored)]
        {
            let parsed = want.parse::<Rational>().ok();
            let ok = parsed.as_ref() == Some(value);
            out.push(Check::new(
                "table",
                format!("{name}({},{}) rational", r.n, r.l),
                ok,
                format!("computed {value}, reference {want}"),
            ));
            let factored = factorize_rational(value);
            out.push(Check::new(
                "table",
                format!("{name}({},{}) factorized", r.n, r.l),
                factored == want_factored,
                format!("computed {factored}, reference {want_factored}"),
            ));
        }
    }
    out
}

/// Outcome of one numerical fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FitOutcome {
    Fit(Box<FieldFitResult>),
    Failed { state: QuantumState, error: String },
}

fn oracle_states(max_n: u32) -> Vec<QuantumState> {
    (1..=max_n).flat_map(|n| (0..n).map(move |l| QuantumState::level(n, l).expect("valid"))).collect()
}

/// Default-window fits for all states with `n <= max_n`, in state order.
pub fn oracle_fits(max_n: u32, grid_scale: f64) -> Vec<FitOutcome> {
    let z = Rational::one();
    let cfg = FitConfig::default();
    let run = |s: &QuantumState| match oracle::fit_default(s, &z, grid_scale, &cfg) {
        Ok(f) => FitOutcome::Fit(Box::new(f)),
        Err(e) => FitOutcome::Failed { state: *s, error: e.to_string() },
    };
    let states = oracle_states(max_n);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        states.par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        states.iter().map(run).collect()
    }
}

pub fn oracle_checks(fits: &[FitOutcome]) -> Vec<Check> {
    let mut out = Vec::new();
    for f in fits {
        match f {
            FitOutcome::Failed { state, error } => {
                out.push(Check::new("oracle", format!("fit({},{})", state.n(), state.l()), false, error.clone()));
            }
            FitOutcome::Fit(r) => {
                let (n, l) = (r.state.n(), r.state.l());
                let v = &r.verdicts;
                out.push(Check::new(
                    "oracle",
                    format!("eps2({n},{l})"),
                    v.eps2_within_tolerance,
                    format!("fit {:.12e}, relative error {:.2e}", r.eps2_estimate, v.eps2_relative_error),
                ));
                if let Some(odd) = &r.odd {
                    out.push(Check::new(
                        "oracle",
                        format!("odd({n},{l})"),
                        v.odd_within_tolerance == Some(true),
                        format!("c1 {:.2e}, c3 {:.2e}", odd.c1, odd.c3),
                    ));
                }
            }
        }
    }
    out
}

/// Ground-state estimate taken from a list of fits, if present.
pub fn ground_state_estimate(fits: &[FitOutcome]) -> Option<NumericEstimate> {
    fits.iter().find_map(|f| match f {
        FitOutcome::Fit(r) if r.state.n() == 1 && r.state.l() == 0 => Some(NumericEstimate {
            value: r.eps4_estimate,
            uncertainty: r.c4_uncertainty.unwrap_or(f64::NAN),
        }),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub exact_max_n: u32,
    pub oracle_max_n: u32,
    pub grid_scale: f64,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self { exact_max_n: 12, oracle_max_n: 3, grid_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub fits: Vec<FitOutcome>,
    pub dispute: DisputeReport,
    pub verdict_line: String,
    pub passed: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn count(&self, group: &str) -> usize {
        self.checks.iter().filter(|c| c.group == group).count()
    }
}

pub fn run_validation(opts: &ValidationOptions, reference: &[ReferenceRow]) -> ValidationReport {
    let mut checks = dual_route_checks(opts.exact_max_n);
    checks.extend(table_checks(reference));
    let fits = if opts.oracle_max_n > 0 { oracle_fits(opts.oracle_max_n, opts.grid_scale) } else { Vec::new() };
    checks.extend(oracle_checks(&fits));
    let dispute = perturb::disputed_value_report(ground_state_estimate(&fits));
    checks.push(Check::new(
        "dispute",
        "eps4(1,0) literature value".into(),
        dispute.literature_rejected,
        dispute.verdict_line(),
    ));
    let passed = checks.iter().all(|c| c.passed);
    ValidationReport { verdict_line: dispute.verdict_line(), checks, fits, dispute, passed }
}
