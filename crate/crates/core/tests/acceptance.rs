//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::time::{Duration, Instant};

use planar_zeeman::coulomb2d::QuantumState;
use planar_zeeman::greenfn::{eps4_double_integral, orthogonality_residual, GreenEvalConfig, ReducedGreen};
use planar_zeeman::laguerre::{brute_force_integral, cross_integral, moment3_band, moment3_diag, LaguerreSpec};
use planar_zeeman::oracle::{fit_default, fit_field_series, galerkin_solve, uniform_grid, FitConfig, GalerkinConfig};
use planar_zeeman::perturb::{
    assemble_energy, disputed_value_report, eps1, eps4_closed, NumericEstimate, Order,
};
use planar_zeeman::validation::{dual_route_checks, table_checks, REFERENCE_TABLE};
use planar_zeeman::{Rational, Spin};

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn states(max_n: u32) -> Vec<QuantumState> {
    (1..=max_n).flat_map(|n| (0..n).map(move |l| QuantumState::level(n, l).unwrap())).collect()
}

fn table_exactness() -> Outcome {
    let checks = table_checks(&REFERENCE_TABLE);
    let rational = checks.iter().filter(|c| c.name.ends_with("rational") && c.passed).count();
    let factored = checks.iter().filter(|c| c.name.ends_with("factorized") && c.passed).count();
    let detail = format!("{rational}/20 rational, {factored}/20 factorized");
    if rational == 20 && factored == 20 {
        Ok(detail)
    } else {
        let bad: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| format!("{}: {}", c.name, c.detail)).collect();
        Err(format!("{detail}; {}", bad.join("; ")))
    }
}

fn dual_route() -> Outcome {
    let checks = dual_route_checks(12);
    let passed = checks.iter().filter(|c| c.passed).count();
    let detail = format!("{passed}/{} exact equalities over 78 states", checks.len());
    if checks.len() == 156 && passed == 156 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dispute() -> Outcome {
    let s = QuantumState::level(1, 0).unwrap();
    let fit = fit_field_series(&s, &q("1"), &uniform_grid(0.05, 11), &FitConfig::default()).map_err(|e| e.to_string())?;
    let target = -159.0 / 65536.0;
    let radius = 0.5 * 6.0 / 65536.0;
    let err = (fit.c4 - target).abs();
    let report = disputed_value_report(Some(NumericEstimate {
        value: fit.eps4_estimate,
        uncertainty: fit.c4_uncertainty.unwrap_or(f64::NAN),
    }));
    let detail = format!("ĉ4 = {:.10e}, |ĉ4 + 159/65536| = {err:.2e} < {radius:.2e}; {}", fit.c4, report.verdict_line());
    if err < radius && report.literature_rejected {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_second_order() -> Outcome {
    let mut worst = (0.0f64, String::new());
    for s in states(3) {
        let fit = fit_default(&s, &q("1"), 1.0, &FitConfig::default()).map_err(|e| format!("{s}: {e}"))?;
        let e = fit.verdicts.eps2_relative_error;
        if e >= 1e-6 {
            return Err(format!("({},{}) relative error {e:.2e}", s.n(), s.l()));
        }
        if e >= worst.0 {
            worst = (e, format!("({},{})", s.n(), s.l()));
        }
    }
    Ok(format!("6 states, worst relative error {:.2e} at {}", worst.0, worst.1))
}

fn zeroth_order() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for z in [1i64, 2] {
        for s in states(4) {
            let r = galerkin_solve(&GalerkinConfig::for_state(&s, Rational::from(z), 0.0)).map_err(|e| e.to_string())?;
            let nn = s.n() as f64 - 0.5;
            let want = -((z * z) as f64) / (2.0 * nn * nn);
            // refined tracked value and the raw dense eigenvalue
            let dense = r.eigenvalues[s.n_r() as usize];
            let d = (r.tracked_energy - want).abs().max((dense - want).abs());
            if d > 1e-12 {
                return Err(format!("({},{}) Z={z}: |ΔE| = {d:.2e}", s.n(), s.l()));
            }
            worst = worst.max(d);
            count += 1;
        }
    }
    Ok(format!("{count} levels, max |ΔE| = {worst:.2e} (dense and refined)"))
}

fn integral_lemmas() -> Outcome {
    let mut count = 0usize;
    for alpha in 0..=8u32 {
        for k in 0..=10u32 {
            let a = LaguerreSpec::new(k, alpha);
            for kp in 0..=10u32 {
                let b = LaguerreSpec::new(kp, alpha);
                for gamma in 0..=12i64 {
                    let want = brute_force_integral(gamma, a, b).unwrap();
                    if cross_integral(gamma, a, b).unwrap() != want {
                        return Err(format!("cross_integral γ={gamma} k={k} k'={kp} α={alpha}"));
                    }
                    count += 1;
                }
                let want = brute_force_integral(alpha as i64 + 3, a, b).unwrap();
                if moment3_band(k, kp, alpha) != want {
                    return Err(format!("moment3_band k={k} k'={kp} α={alpha}"));
                }
                if k.abs_diff(kp) > 3 && !want.is_zero() {
                    return Err(format!("nonzero outside band k={k} k'={kp} α={alpha}"));
                }
                count += 1;
            }
            if moment3_diag(a) != brute_force_integral(alpha as i64 + 3, a, a).unwrap() {
                return Err(format!("moment3_diag k={k} α={alpha}"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} exact comparisons"))
}

fn green_suite() -> Outcome {
    let mut sym = 0.0f64;
    let mut ortho = 0.0f64;
    let mut eps4 = 0.0f64;
    for s in states(3) {
        let cfg = GreenEvalConfig::at_level(&s, q("1"));
        let g = ReducedGreen::new(&cfg).map_err(|e| e.to_string())?;
        for (r, rp) in [(0.1, 3.0), (0.7, 0.2), (2.5, 11.0), (5.0, 5.5), (13.0, 0.05)] {
            let a = g.eval(r, rp);
            sym = sym.max((a - g.eval(rp, r)).abs() / a.abs().max(1.0));
        }
        for rp in [0.2, 1.5, 6.0] {
            ortho = ortho.max(orthogonality_residual(&cfg, rp).map_err(|e| e.to_string())?.abs());
        }
        let v = eps4_double_integral(&cfg).map_err(|e| e.to_string())?;
        let exact = eps4_closed(s.n(), s.l()).unwrap().to_f64();
        eps4 = eps4.max((v / exact - 1.0).abs());
    }
    let detail = format!("symmetry {sym:.1e} (≤1e-12), orthogonality {ortho:.1e} (<1e-8), ε4 double integral rel. {eps4:.1e} (<1e-8)");
    if sym <= 1e-12 && ortho < 1e-8 && eps4 < 1e-8 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn parity() -> Outcome {
    let mut worst_odd = 0.0f64;
    for s in states(3) {
        let fit = fit_default(&s, &q("1"), 1.0, &FitConfig::default()).map_err(|e| format!("{s}: {e}"))?;
        let odd = fit.odd.ok_or("odd diagnostic not run")?;
        worst_odd = worst_odd.max(odd.c1.abs()).max(odd.c3.abs());
    }
    if worst_odd >= 1e-10 {
        return Err(format!("max |ĉ1|,|ĉ3| = {worst_odd:.2e}"));
    }
    let b = q("3/1000");
    for s in states(6).into_iter().filter(|s| s.l() > 0) {
        let plus = QuantumState::new(s.n(), s.l(), s.l() as i32).unwrap();
        let minus = QuantumState::new(s.n(), s.l(), -(s.l() as i32)).unwrap();
        let a = assemble_energy(&plus, &q("1"), &b, Order::Fourth, false).unwrap();
        let c = assemble_energy(&minus, &q("1"), &b, Order::Fourth, false).unwrap();
        if a.e2 != c.e2 || a.e4 != c.e4 {
            return Err(format!("±m_l split at ({},{})", s.n(), s.l()));
        }
    }
    for m_l in -3..=3i32 {
        for spin in [Spin::Up, Spin::Down] {
            let want = (Rational::from(m_l as i64) + Rational::from(2) * spin.m_s()) / Rational::from(2);
            if eps1(m_l, Some(spin)) != want {
                return Err(format!("spin shift m_l={m_l}"));
            }
            let s = QuantumState::new(4, m_l.unsigned_abs(), m_l).unwrap().with_spin(spin);
            let e = assemble_energy(&s, &q("1"), &b, Order::First, true).unwrap();
            if e.e1 != &want * &b {
                return Err(format!("assembled spin term m_l={m_l}"));
            }
        }
    }
    Ok(format!("max |ĉ1|,|ĉ3| = {worst_odd:.1e}; ±m_l and spin shifts exact"))
}

fn main() {
    let criteria = [
        Criterion { id: 1, title: "reference table exactness", limit: Some(Duration::from_secs(1)), run: table_exactness },
        Criterion { id: 2, title: "dual-route exact equality, n ≤ 12", limit: Some(Duration::from_secs(10)), run: dual_route },
        Criterion { id: 3, title: "ground-state ε4 adjudication", limit: Some(Duration::from_secs(30)), run: dispute },
        Criterion { id: 4, title: "oracle ĉ2 within 1e-6, n ≤ 3", limit: None, run: oracle_second_order },
        Criterion { id: 5, title: "zero-field Galerkin levels within 1e-12", limit: None, run: zeroth_order },
        Criterion { id: 6, title: "integral lemmas vs brute force", limit: Some(Duration::from_secs(5)), run: integral_lemmas },
        Criterion { id: 7, title: "Green-function properties", limit: None, run: green_suite },
        Criterion { id: 8, title: "parity, ±m_l and spin structure", limit: None, run: parity },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let over = c.limit.is_some_and(|l| elapsed > l);
        let (ok, detail) = match outcome {
            Ok(d) if over => (false, format!("{d}; exceeded {:?}", c.limit.unwrap())),
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {}: {} [{:.2}s] {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
