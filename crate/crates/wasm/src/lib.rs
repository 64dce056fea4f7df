//! Browser bindings. Each exported function returns a JSON string; errors are
//! thrown as JavaScript exceptions carrying the message.

use planar_zeeman::greenfn::SecondOrderWave;
use planar_zeeman::oracle::{galerkin_solve, GalerkinConfig};
use planar_zeeman::perturb::{coefficients, Provenance};
use planar_zeeman::{QuantumState, Rational};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_N: u32 = 12;
const MAX_POINTS: usize = 2000;

#[derive(Serialize)]
struct CoeffRow {
    n: u32,
    l: u32,
    eps0: String,
    eps2: String,
    eps4: String,
    eps2_decimal: String,
    eps4_decimal: String,
}

#[derive(Serialize)]
struct EnergyCurve {
    b: Vec<f64>,
    second_order: Vec<f64>,
    fourth_order: Vec<f64>,
    galerkin: Vec<Option<f64>>,
}

#[derive(Serialize)]
struct RadialProfile {
    r: Vec<f64>,
    p0: Vec<f64>,
    p2: Vec<f64>,
    perturbed: Vec<f64>,
}

fn level(n: u32, l: u32) -> Result<QuantumState, String> {
    if n > MAX_N {
        return Err(format!("n must be at most {MAX_N}"));
    }
    QuantumState::level(n, l).map_err(|e| e.to_string())
}

fn charge(z: &str) -> Result<Rational, String> {
    let z: Rational = z.parse().map_err(|_| format!("cannot parse Z = {z:?}"))?;
    if !z.is_positive() {
        return Err("Z must be positive".into());
    }
    Ok(z)
}

fn samples(start: f64, end: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    if !(start.is_finite() && end.is_finite() && end > start) {
        return Err("invalid sampling range".into());
    }
    Ok((0..points).map(|i| start + (end - start) * i as f64 / (points - 1) as f64).collect())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

pub fn coefficient_table_json(max_n: u32) -> Result<String, String> {
    if !(1..=MAX_N).contains(&max_n) {
        return Err(format!("max_n must lie in 1..={MAX_N}"));
    }
    let mut rows = Vec::new();
    for n in 1..=max_n {
        for l in 0..n {
            let c = coefficients(n, l, Provenance::ClosedForm).map_err(|e| e.to_string())?;
            rows.push(CoeffRow {
                n,
                l,
                eps0: c.eps0.to_string(),
                eps2: c.eps2.to_string(),
                eps4: c.eps4.to_string(),
                eps2_decimal: c.eps2.to_decimal(10),
                eps4_decimal: c.eps4.to_decimal(10),
            });
        }
    }
    to_json(&rows)
}

/// Diamagnetic energy of `(n, l)` against `b`: truncated series and, when
/// `galerkin` is set, the numerical eigenvalue (`null` where the solve fails).
pub fn energy_curve_json(n: u32, l: u32, z: &str, b_max: f64, points: usize, galerkin: bool) -> Result<String, String> {
    let state = level(n, l)?;
    let z = charge(z)?;
    let b = samples(0.0, b_max, points)?;
    let c = coefficients(n, l, Provenance::ClosedForm).map_err(|e| e.to_string())?;
    let zf = z.to_f64();
    let (e0, e2, e4) = (c.eps0.to_f64() * zf * zf, c.eps2.to_f64() / (zf * zf), c.eps4.to_f64() / zf.powi(6));
    let second_order: Vec<f64> = b.iter().map(|b| e0 + e2 * b * b).collect();
    let fourth_order = b.iter().zip(&second_order).map(|(b, s)| s + e4 * b.powi(4)).collect();
    let galerkin = if galerkin {
        b.iter()
            .map(|&b| galerkin_solve(&GalerkinConfig::for_state(&state, z.clone(), b)).ok().map(|r| r.tracked_energy))
            .collect()
    } else {
        Vec::new()
    };
    to_json(&EnergyCurve { b, second_order, fourth_order, galerkin })
}

/// `P⁰(r)`, the second-order correction `P⁽²⁾(r)` per unit `b²` and
/// `P⁰ + b² P⁽²⁾`.
pub fn radial_profile_json(n: u32, l: u32, z: &str, b: f64, r_max: f64, points: usize) -> Result<String, String> {
    let state = level(n, l)?;
    let z = charge(z)?;
    let r = samples(0.0, r_max, points)?;
    if !b.is_finite() {
        return Err("invalid field".into());
    }
    let p = planar_zeeman::coulomb2d::bound_radial(&state, &z);
    let wave = SecondOrderWave::new(&state, &z).map_err(|e| e.to_string())?;
    let p0: Vec<f64> = r.iter().map(|&x| p.eval(x)).collect();
    let p2: Vec<f64> = r.iter().map(|&x| wave.eval(x)).collect();
    let perturbed = p0.iter().zip(&p2).map(|(a, c)| a + b * b * c).collect();
    to_json(&RadialProfile { r, p0, p2, perturbed })
}

#[wasm_bindgen]
pub fn coefficient_table(max_n: u32) -> Result<String, JsError> {
    coefficient_table_json(max_n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn energy_curve(n: u32, l: u32, z: &str, b_max: f64, points: usize, galerkin: bool) -> Result<String, JsError> {
    energy_curve_json(n, l, z, b_max, points, galerkin).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn radial_profile(n: u32, l: u32, z: &str, b: f64, r_max: f64, points: usize) -> Result<String, JsError> {
    radial_profile_json(n, l, z, b, r_max, points).map_err(|e| JsError::new(&e))
}
