//! Gauss–Legendre rules on (−1, 1) and the nodal Lagrange basis built on them.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Largest supported number of Gauss points.
pub const MAX_POINTS: usize = 16;

/// Gauss–Legendre nodes (ascending) and weights on (−1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// `P_n(x)` and `P_{n-1}(x)` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * x * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

impl GaussRule {
    /// Rule with `n` points, `1 <= n <= 16`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_POINTS {
            return Err(Error::RuleSize(n));
        }
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Chebyshev-type seed for the i-th root counted from the right.
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, q) = legendre_pair(n, x);
                dp = nf * (x * p - q) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if libm::fabs(dx) <= 1e-16 {
                    let (p, q) = legendre_pair(n, x);
                    dp = nf * (x * p - q) / (x * x - 1.0);
                    break;
                }
            }
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        for i in 0..n / 2 {
            let j = n - 1 - i;
            let a = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -a;
            nodes[j] = a;
            weights[i] = w;
            weights[j] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫_{-1}^{1} f` by this rule.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(a, &xa)| {
            let prod: f64 = nodes
                .iter()
                .enumerate()
                .filter(|&(b, _)| b != a)
                .map(|(_, &xb)| xa - xb)
                .product();
            1.0 / prod
        })
        .collect()
}

fn fill_basis(nodes: &[f64], bary: &[f64], t: f64, out: &mut [f64]) {
    if let Some(a) = nodes.iter().position(|&x| x == t) {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[a] = 1.0;
        return;
    }
    let ell: f64 = nodes.iter().map(|&x| t - x).product();
    for ((o, &x), &l) in out.iter_mut().zip(nodes).zip(bary) {
        *o = ell * l / (t - x);
    }
}

/// `φ_α(t) = Π_{β≠α} (t − x_β)/(x_α − x_β)`; any real `t` is allowed.
pub fn lagrange_basis_at(rule: &GaussRule, alpha: usize, t: f64) -> f64 {
    let x = rule.nodes();
    x.iter()
        .enumerate()
        .filter(|&(b, _)| b != alpha)
        .map(|(_, &xb)| (t - xb) / (x[alpha] - xb))
        .product()
}

/// Interpolant of `values` (given at the rule's nodes) evaluated at `t`.
pub fn lagrange_eval(rule: &GaussRule, values: &[f64], t: f64) -> f64 {
    let bary = barycentric_weights(rule.nodes());
    let mut phi = vec![0.0; rule.len()];
    fill_basis(rule.nodes(), &bary, t, &mut phi);
    phi.iter().zip(values).map(|(p, v)| p * v).sum()
}

/// Precomputed tables for the degree-`k` nodal basis on the reference cell.
///
/// Besides the `k+1` point rule carrying the degrees of freedom, it keeps a
/// `2(k+1)` point rule for projection and `L¹` norms and the basis sampled at
/// `4(k+1)` equispaced points (endpoints included) for `L∞` norms.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalBasis {
    rule: GaussRule,
    bary: Vec<f64>,
    fine: GaussRule,
    fine_phi: Vec<f64>,
    samples: Vec<f64>,
    sample_phi: Vec<f64>,
}

impl NodalBasis {
    /// Basis of degree `k`, `0 <= k <= 7`.
    pub fn new(k: usize) -> Result<Self> {
        let n = k + 1;
        let rule = GaussRule::new(n)?;
        let fine = GaussRule::new(2 * n)?;
        let bary = barycentric_weights(rule.nodes());
        let mut fine_phi = vec![0.0; fine.len() * n];
        for (g, &t) in fine.nodes().iter().enumerate() {
            fill_basis(rule.nodes(), &bary, t, &mut fine_phi[g * n..(g + 1) * n]);
        }
        let s = 4 * n;
        let samples: Vec<f64> = (0..s)
            .map(|j| -1.0 + 2.0 * j as f64 / (s - 1) as f64)
            .collect();
        let mut sample_phi = vec![0.0; s * n];
        for (j, &t) in samples.iter().enumerate() {
            fill_basis(rule.nodes(), &bary, t, &mut sample_phi[j * n..(j + 1) * n]);
        }
        Ok(Self {
            rule,
            bary,
            fine,
            fine_phi,
            samples,
            sample_phi,
        })
    }

    pub fn degree(&self) -> usize {
        self.rule.len() - 1
    }

    /// Number of nodes per cell, `k+1`.
    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rule(&self) -> &GaussRule {
        &self.rule
    }

    pub fn nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    pub fn weights(&self) -> &[f64] {
        self.rule.weights()
    }

    /// Oversampled rule with `2(k+1)` points.
    pub fn fine_rule(&self) -> &GaussRule {
        &self.fine
    }

    /// Basis values at fine node `g`.
    pub fn fine_phi(&self, g: usize) -> &[f64] {
        let n = self.len();
        &self.fine_phi[g * n..(g + 1) * n]
    }

    /// Equispaced reference sample points used for `L∞`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sample_phi(&self, j: usize) -> &[f64] {
        let n = self.len();
        &self.sample_phi[j * n..(j + 1) * n]
    }

    /// Writes `φ_α(t)` for all `α` into `out`.
    pub fn basis_values(&self, t: f64, out: &mut [f64]) {
        fill_basis(self.rule.nodes(), &self.bary, t, out);
    }

    /// `Σ_α values[α] φ_α(t)`.
    pub fn eval(&self, values: &[f64], t: f64) -> f64 {
        let x = self.rule.nodes();
        if let Some(a) = x.iter().position(|&xa| xa == t) {
            return values[a];
        }
        let mut ell = 1.0;
        let mut acc = 0.0;
        for ((&xa, &l), &v) in x.iter().zip(&self.bary).zip(values) {
            let d = t - xa;
            ell *= d;
            acc += l * v / d;
        }
        ell * acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules_closed_form() {
        let r1 = GaussRule::new(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert!((r1.weights()[0] - 2.0).abs() < 1e-15);
        let r2 = GaussRule::new(2).unwrap();
        let a = 1.0 / 3f64.sqrt();
        assert!((r2.nodes()[0] + a).abs() < 1e-15 && (r2.nodes()[1] - a).abs() < 1e-15);
        assert!((r2.weights()[0] - 1.0).abs() < 1e-15);
        let r3 = GaussRule::new(3).unwrap();
        let b = (0.6f64).sqrt();
        assert!((r3.nodes()[2] - b).abs() < 1e-15);
        assert!((r3.weights()[0] - 5.0 / 9.0).abs() < 1e-15);
        assert!((r3.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(GaussRule::new(0), Err(Error::RuleSize(0)));
        assert_eq!(GaussRule::new(17), Err(Error::RuleSize(17)));
    }

    #[test]
    fn weights_sum_and_symmetry() {
        for n in 1..=MAX_POINTS {
            let r = GaussRule::new(n).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n}");
            for i in 0..n {
                assert_eq!(r.nodes()[i], -r.nodes()[n - 1 - i]);
                assert_eq!(r.weights()[i], r.weights()[n - 1 - i]);
                assert!(r.weights()[i] > 0.0);
            }
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn exact_for_monomials() {
        for n in 1..=MAX_POINTS {
            let r = GaussRule::new(n).unwrap();
            for m in 0..2 * n {
                let exact = if m % 2 == 1 { 0.0 } else { 2.0 / (m as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(m as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn roots_are_legendre_zeros() {
        for n in 1..=MAX_POINTS {
            let r = GaussRule::new(n).unwrap();
            for &x in r.nodes() {
                assert!(legendre_pair(n, x).0.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn lagrange_examples() {
        let r2 = GaussRule::new(2).unwrap();
        assert!((lagrange_basis_at(&r2, 0, 0.0) - 0.5).abs() < 1e-15);
        assert!((lagrange_eval(&r2, &[3.0, 5.0], 0.0) - 4.0).abs() < 1e-15);
        let r5 = GaussRule::new(5).unwrap();
        for a in 0..5 {
            for b in 0..5 {
                let v = lagrange_basis_at(&r5, a, r5.nodes()[b]);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
        let ident = r5.nodes().to_vec();
        assert!((lagrange_eval(&r5, &ident, 1.7) - 1.7).abs() < 1e-13);
        assert!((lagrange_eval(&r5, &[2.5; 5], -1.9) - 2.5).abs() < 1e-13);
    }

    #[test]
    fn nodal_mass_is_diagonal() {
        for k in 0..=7 {
            let nb = NodalBasis::new(k).unwrap();
            let n = k + 1;
            for a in 0..n {
                for b in 0..n {
                    let m = nb.fine_rule().integrate(|t| {
                        let mut phi = vec![0.0; n];
                        nb.basis_values(t, &mut phi);
                        phi[a] * phi[b]
                    });
                    let want = if a == b { nb.weights()[a] } else { 0.0 };
                    assert!((m - want).abs() < 1e-14, "k={k}");
                }
            }
        }
    }

    #[test]
    fn basis_table_matches_direct_evaluation() {
        let nb = NodalBasis::new(3).unwrap();
        for (g, &t) in nb.fine_rule().nodes().iter().enumerate() {
            for a in 0..4 {
                let d = lagrange_basis_at(nb.rule(), a, t);
                assert!((nb.fine_phi(g)[a] - d).abs() < 1e-14);
            }
        }
        assert_eq!(nb.samples().len(), 16);
        assert_eq!(nb.samples()[0], -1.0);
        assert_eq!(nb.samples()[15], 1.0);
    }

    #[test]
    fn degree_above_seven_is_rejected() {
        assert!(NodalBasis::new(7).is_ok());
        assert!(NodalBasis::new(8).is_err());
    }
}
