//! Rendering of command results as markdown, CSV or JSON. All decimals are
//! derived from exact rationals.

use planar_zeeman::exactmath::factorize_rational;
use planar_zeeman::perturb::{CoefficientSet, EnergyResult};
use planar_zeeman::validation::{FitOutcome, ValidationReport};
use planar_zeeman::Rational;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug)]
pub struct RenderError(String);

impl std::fmt::Display for RenderError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<csv::Error> for RenderError {
    fn from(e: csv::Error) -> Self {
        RenderError(e.to_string())
    }
}

impl From<serde_json::Error> for RenderError {
    fn from(e: serde_json::Error) -> Self {
        RenderError(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoeffRow {
    pub n: u32,
    pub l: u32,
    pub eps0: String,
    pub eps0_decimal: String,
    pub eps2: String,
    pub eps2_factorized: String,
    pub eps2_decimal: String,
    pub eps4: String,
    pub eps4_factorized: String,
    pub eps4_decimal: String,
}

impl CoeffRow {
    pub fn new(c: &CoefficientSet, digits: usize) -> Self {
        Self {
            n: c.n,
            l: c.l,
            eps0: c.eps0.to_string(),
            eps0_decimal: c.eps0.to_decimal(digits),
            eps2: c.eps2.to_string(),
            eps2_factorized: factorize_rational(&c.eps2),
            eps2_decimal: c.eps2.to_decimal(digits),
            eps4: c.eps4.to_string(),
            eps4_factorized: factorize_rational(&c.eps4),
            eps4_decimal: c.eps4.to_decimal(digits),
        }
    }
}

fn markdown_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = format!("| {} |\n", header.join(" | "));
    out += &format!("|{}\n", "---|".repeat(header.len()));
    for r in rows {
        out += &format!("| {} |\n", r.join(" | "));
    }
    out
}

fn csv_rows<T: Serialize>(rows: &[T]) -> Result<String, RenderError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| RenderError(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| RenderError(e.to_string()))
}

fn json<T: Serialize + ?Sized>(v: &T) -> Result<String, RenderError> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

pub fn render_coeffs(rows: &[CoeffRow], format: Format) -> Result<String, RenderError> {
    match format {
        Format::Json => json(rows),
        Format::Csv => csv_rows(rows),
        Format::Markdown => {
            let header = ["n", "l", "ε⁽⁰⁾", "ε⁽²⁾", "ε⁽²⁾ factorized", "ε⁽²⁾ decimal", "ε⁽⁴⁾", "ε⁽⁴⁾ factorized", "ε⁽⁴⁾ decimal"];
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.l.to_string(),
                        r.eps0.clone(),
                        r.eps2.clone(),
                        r.eps2_factorized.clone(),
                        r.eps2_decimal.clone(),
                        r.eps4.clone(),
                        r.eps4_factorized.clone(),
                        r.eps4_decimal.clone(),
                    ]
                })
                .collect();
            Ok(markdown_table(&header, &body))
        }
    }
}

#[derive(Serialize)]
struct Table1Row<'a> {
    n: u32,
    l: u32,
    eps2: &'a str,
    eps2_factorized: &'a str,
    eps4: &'a str,
    eps4_factorized: &'a str,
}

pub fn render_table1(rows: &[CoeffRow], format: Format) -> Result<String, RenderError> {
    let slim: Vec<Table1Row> = rows
        .iter()
        .map(|r| Table1Row {
            n: r.n,
            l: r.l,
            eps2: &r.eps2,
            eps2_factorized: &r.eps2_factorized,
            eps4: &r.eps4,
            eps4_factorized: &r.eps4_factorized,
        })
        .collect();
    match format {
        Format::Json => json(&slim),
        Format::Csv => csv_rows(&slim),
        Format::Markdown => {
            let header = ["n", "l", "ε⁽²⁾ rational", "ε⁽²⁾ factorized", "ε⁽⁴⁾ rational", "ε⁽⁴⁾ factorized"];
            let body: Vec<Vec<String>> = slim
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.l.to_string(),
                        r.eps2.to_string(),
                        r.eps2_factorized.to_string(),
                        r.eps4.to_string(),
                        r.eps4_factorized.to_string(),
                    ]
                })
                .collect();
            Ok(markdown_table(&header, &body))
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Term {
    pub term: String,
    pub exact: String,
    pub decimal: String,
}

impl Term {
    fn new(term: &str, v: &Rational, digits: usize) -> Self {
        Self { term: term.to_string(), exact: v.to_string(), decimal: v.to_decimal(digits) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyOutput {
    pub n: u32,
    pub l: u32,
    pub m_l: i32,
    pub m_s: Option<String>,
    pub z: String,
    pub b_over_b0: String,
    pub field_tesla: Option<f64>,
    pub order: u32,
    pub spin: bool,
    pub terms: Vec<Term>,
    pub total: Term,
    pub regime_warning: bool,
    pub truncation_note: String,
}

impl EnergyOutput {
    pub fn new(r: &EnergyResult, field_tesla: Option<f64>, digits: usize) -> Self {
        Self {
            n: r.state.n(),
            l: r.state.l(),
            m_l: r.state.m_l(),
            m_s: r.state.m_s().map(|s| s.m_s().to_string()),
            z: r.z.to_string(),
            b_over_b0: r.b.to_string(),
            field_tesla,
            order: r.order.power(),
            spin: r.spin_included,
            terms: vec![
                Term::new("E0", &r.e0, digits),
                Term::new("E1", &r.e1, digits),
                Term::new("E2", &r.e2, digits),
                Term::new("E4", &r.e4, digits),
            ],
            total: Term::new("total", &r.total, digits),
            regime_warning: r.regime_warning,
            truncation_note: r.truncation_note.clone(),
        }
    }
}

pub fn render_energy(e: &EnergyOutput, format: Format) -> Result<String, RenderError> {
    let mut rows = e.terms.clone();
    rows.push(e.total.clone());
    match format {
        Format::Json => json(e),
        Format::Csv => csv_rows(&rows),
        Format::Markdown => {
            let mut out = format!("state n={} l={} m_l={}", e.n, e.l, e.m_l);
            if let Some(ms) = &e.m_s {
                out += &format!(" m_s={ms}");
            }
            out += &format!(", Z = {}, b = B/B0 = {}", e.z, e.b_over_b0);
            if let Some(t) = e.field_tesla {
                out += &format!(" ({t:.6e} T)");
            }
            out += &format!(", order {}{}\n\n", e.order, if e.spin { ", spin included" } else { "" });
            let body: Vec<Vec<String>> =
                rows.iter().map(|t| vec![t.term.clone(), t.exact.clone(), t.decimal.clone()]).collect();
            out += &markdown_table(&["term", "exact (Hartree)", "decimal (Hartree)"], &body);
            out += &format!("\n{}\n", e.truncation_note);
            if e.regime_warning {
                out += "warning: perturbative regime exceeded (heuristic |E4| > |E2|)\n";
            }
            Ok(out)
        }
    }
}

pub fn render_validation(report: &ValidationReport) -> String {
    let mut out = String::new();
    for group in ["dual-route", "table", "oracle", "dispute"] {
        let total = report.count(group);
        let passed = report.checks.iter().filter(|c| c.group == group && c.passed).count();
        out += &format!("{group}: {passed}/{total} passed\n");
    }
    for f in &report.fits {
        match f {
            FitOutcome::Fit(r) => {
                let odd = r.odd.as_ref().map_or(String::from("n/a"), |o| format!("{:.1e}/{:.1e}", o.c1.abs(), o.c3.abs()));
                out += &format!(
                    "  fit ({},{}): eps2 {:.12e} (rel. err {:.1e}), eps4 {:.9e} ± {:.1e}, |c1|/|c3| {}\n",
                    r.state.n(),
                    r.state.l(),
                    r.eps2_estimate,
                    r.verdicts.eps2_relative_error,
                    r.eps4_estimate,
                    r.c4_uncertainty.unwrap_or(f64::NAN),
                    odd
                );
            }
            FitOutcome::Failed { state, error } => {
                out += &format!("  fit ({},{}): failed: {error}\n", state.n(), state.l());
            }
        }
    }
    for c in report.failures() {
        out += &format!("FAIL {} {}: {}\n", c.group, c.name, c.detail);
    }
    out += &format!("{}\n", report.verdict_line);
    out += &format!("overall: {}\n", if report.passed { "PASS" } else { "FAIL" });
    out
}
