//! Generalized Gauss–Laguerre quadrature for `∫_0^∞ x^α e^{-x} f(x) dx`.
//!
//! Nodes come from the Golub–Welsch eigenproblem and are polished by Newton
//! steps on `L_n^(α)`. Weights are computed in log space from the derivative
//! formula rather than from eigenvector components, so the tail weights keep
//! full relative accuracy instead of drowning in absolute round-off.

use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct GaussLaguerre {
    alpha: u32,
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `L_n^(α)(x)` and `L_{n-1}^(α)(x)` up to a common factor `exp(log_scale)`.
fn scaled_laguerre_pair(n: usize, alpha: f64, x: f64) -> (f64, f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    let mut log_scale = 0.0;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        let m = cur.abs().max(prev.abs());
        if m > 1e100 {
            cur /= m;
            prev /= m;
            log_scale += m.ln();
        }
    }
    (cur, prev, log_scale)
}

impl GaussLaguerre {
    pub fn new(n: usize, alpha: u32) -> Self {
        assert!(n >= 1, "need at least one node");
        let a = alpha as f64;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let fi = i as f64;
            jac[(i, i)] = 2.0 * fi + a + 1.0;
            if i + 1 < n {
                let off = ((fi + 1.0) * (fi + 1.0 + a)).sqrt();
                jac[(i, i + 1)] = off;
                jac[(i + 1, i)] = off;
            }
        }
        let mut nodes: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        let ln_norm = ln_factorial(n as u64 + alpha as u64) - ln_factorial(n as u64);
        let nf = n as f64;
        let mut log_weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (ln, lnm1, _) = scaled_laguerre_pair(n, a, *x);
                // x L_n' = n L_n - (n+α) L_{n-1}
                let xdl = nf * ln - (nf + a) * lnm1;
                if xdl == 0.0 {
                    break;
                }
                let step = ln * *x / xdl;
                *x -= step;
                if step.abs() <= 1e-16 * x.abs() {
                    break;
                }
            }
            let (ln, lnm1, scale) = scaled_laguerre_pair(n, a, *x);
            let xdl = nf * ln - (nf + a) * lnm1;
            // w = Γ(n+α+1) / (n! x [L_n'(x)]²) = Γ(n+α+1) x / (n! [x L_n']²)
            let log_w = ln_norm + x.ln() - 2.0 * (xdl.abs().ln() + scale);
            log_weights.push(log_w);
        }
        Self { alpha, nodes, log_weights }
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|w| w.exp()).collect()
    }

    /// `∫_0^∞ x^α e^{-x} f(x) dx`
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&x, &lw)| lw.exp() * f(x))
            .sum()
    }

    /// `∫_0^∞ g(x) dx` for `g` that already carries the `x^α e^{-x}` decay.
    /// Uses modified weights `w e^{x} x^{-α}`, formed in log space.
    pub fn integrate_plain<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        let a = self.alpha as f64;
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&x, &lw)| {
                let gx = g(x);
                if gx == 0.0 {
                    0.0
                } else {
                    (lw + x - a * x.ln()).exp() * gx
                }
            })
            .sum()
    }

    /// Node/weight pairs for `∫ g(x) dx` as used by [`Self::integrate_plain`].
    pub fn plain_rule(&self) -> Vec<(f64, f64)> {
        let a = self.alpha as f64;
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .map(|(&x, &lw)| (x, (lw + x - a * x.ln()).exp()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_gamma() {
        for alpha in 0..5u32 {
            for n in [1, 5, 40, 200] {
                let q = GaussLaguerre::new(n, alpha);
                let total: f64 = q.weights().iter().sum();
                let gamma = (1..=alpha).map(f64::from).product::<f64>();
                assert!((total - gamma).abs() < 1e-12 * gamma, "α={alpha} n={n}: {total}");
            }
        }
    }

    #[test]
    fn exact_for_polynomials() {
        let q = GaussLaguerre::new(10, 0);
        assert!((q.integrate(|x| x.powi(5)) - 120.0).abs() < 1e-10);
        let q = GaussLaguerre::new(200, 2);
        // ∫ x^2 e^{-x} x^7 = 9!
        assert!((q.integrate(|x| x.powi(7)) / 362880.0 - 1.0).abs() < 1e-13);
        // high-degree: ∫ x^2 e^{-x} x^30 = 32!
        let f32_ = (1..=32).map(f64::from).product::<f64>();
        assert!((q.integrate(|x| x.powi(30)) / f32_ - 1.0).abs() < 1e-11);
    }

    #[test]
    fn nodes_are_roots() {
        let q = GaussLaguerre::new(60, 3);
        for &x in q.nodes() {
            let (ln, lnm1, _) = scaled_laguerre_pair(60, 3.0, x);
            assert!(ln.abs() < 1e-9 * lnm1.abs().max(1.0), "x={x}");
        }
        assert!(q.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn plain_rule_on_decaying_integrand() {
        let q = GaussLaguerre::new(200, 1);
        // ∫ x^3 e^{-x} dx over plain measure = 6
        let v = q.integrate_plain(|x| x.powi(3) * (-x).exp());
        assert!((v - 6.0).abs() < 1e-12);
    }
}
