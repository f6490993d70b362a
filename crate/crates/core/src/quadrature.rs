//! Gauss rules from the Jacobi-matrix eigenproblem, polished by Newton steps on the
//! three-term recurrence.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;

const MAX_NODES: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureKind {
    GaussLaguerre,
    CompositeLegendre,
}

/// Positive nodes (strictly increasing) with positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    fn validate(&self) -> Result<()> {
        let increasing = self.nodes.windows(2).all(|p| p[0] < p[1]);
        let positive = self.nodes.iter().chain(&self.weights).all(|&v| v > 0.0 && v.is_finite());
        if !increasing || !positive {
            return Err(Error::EigenNonConvergence {
                context: "quadrature rule has non-positive or unordered nodes/weights",
            });
        }
        Ok(())
    }
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 || count > MAX_NODES {
        return Err(Error::InvalidParameter(format!(
            "quadrature node count must be in 1..={MAX_NODES}, got {count}"
        )));
    }
    Ok(())
}

fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64], context: &'static str) -> Result<Vec<f64>> {
    let dim = diag.len();
    let mut jac = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        jac[(r, r)] = diag[r];
        if r + 1 < dim {
            jac[(r, r + 1)] = off[r];
            jac[(r + 1, r)] = off[r];
        }
    }
    Ok(symmetric_eigen(&jac, context)?.values)
}

/// `(L_N(x), L_N'(x))` for the Laguerre polynomial of degree N.
fn laguerre_with_derivative(count: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    for k in 1..count {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    if count == 0 {
        return (1.0, 0.0);
    }
    let deriv = count as f64 * (cur - prev) / x;
    (cur, deriv)
}

/// `(P_N(x), P_N'(x))` for the Legendre polynomial of degree N.
fn legendre_with_derivative(count: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    for k in 1..count {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let deriv = count as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, deriv)
}

fn newton_polish<F: Fn(f64) -> (f64, f64)>(x0: f64, poly: F) -> (f64, f64) {
    let mut x = x0;
    let mut deriv = poly(x).1;
    for _ in 0..8 {
        let (p, dp) = poly(x);
        deriv = dp;
        let step = p / dp;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
            deriv = poly(x).1;
            break;
        }
    }
    (x, deriv)
}

/// N-point Gauss–Laguerre rule: exact for `∫_0^∞ p(t) e^{-t} dt` whenever `deg p <= 2N-1`.
pub fn gauss_laguerre(count: usize) -> Result<QuadratureRule> {
    check_count(count)?;
    let diag: Vec<f64> = (0..count).map(|k| 2.0 * k as f64 + 1.0).collect();
    let off: Vec<f64> = (1..count).map(|k| k as f64).collect();
    let approx = tridiagonal_eigenvalues(&diag, &off, "Gauss-Laguerre Jacobi matrix")?;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for x0 in approx {
        let (x, dp) = newton_polish(x0, |x| laguerre_with_derivative(count, x));
        nodes.push(x);
        weights.push(1.0 / (x * dp * dp));
    }
    let rule = QuadratureRule {
        nodes,
        weights,
        kind: QuadratureKind::GaussLaguerre,
    };
    rule.validate()?;
    Ok(rule)
}

/// N-point Gauss–Legendre nodes and weights on [-1, 1], ascending.
pub(crate) fn gauss_legendre_reference(count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_count(count)?;
    if count == 1 {
        return Ok((vec![0.0], vec![2.0]));
    }
    let diag = vec![0.0; count];
    let off: Vec<f64> = (1..count)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let approx = tridiagonal_eigenvalues(&diag, &off, "Gauss-Legendre Jacobi matrix")?;
    let mut nodes = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for x0 in approx {
        let (x, dp) = newton_polish(x0, |x| legendre_with_derivative(count, x));
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    // exact antisymmetry of the reference rule
    for r in 0..count / 2 {
        let s = count - 1 - r;
        let node = 0.5 * (nodes[s] - nodes[r]);
        let weight = 0.5 * (weights[r] + weights[s]);
        nodes[r] = -node;
        nodes[s] = node;
        weights[r] = weight;
        weights[s] = weight;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Gauss–Legendre with `per_panel` nodes on each panel `[breaks[p], breaks[p+1]]`.
pub fn composite_legendre(breaks: &[f64], per_panel: usize) -> Result<QuadratureRule> {
    if breaks.len() < 2 || breaks.windows(2).any(|p| p[0] >= p[1]) || breaks[0] < 0.0 {
        return Err(Error::InvalidParameter(
            "panel breakpoints must be nonnegative and strictly increasing".into(),
        ));
    }
    let (ref_nodes, ref_weights) = gauss_legendre_reference(per_panel)?;
    let mut nodes = Vec::with_capacity(per_panel * (breaks.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for panel in breaks.windows(2) {
        let half = 0.5 * (panel[1] - panel[0]);
        let mid = 0.5 * (panel[1] + panel[0]);
        for (x, w) in ref_nodes.iter().zip(&ref_weights) {
            nodes.push(mid + half * x);
            weights.push(half * w);
        }
    }
    let rule = QuadratureRule {
        nodes,
        weights,
        kind: QuadratureKind::CompositeLegendre,
    };
    rule.validate()?;
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(k: u32) -> f64 {
        (1..=k).map(f64::from).product()
    }

    #[test]
    fn one_point_laguerre() {
        let rule = gauss_laguerre(1).unwrap();
        assert_eq!(rule.nodes.len(), 1);
        assert!((rule.nodes[0] - 1.0).abs() < 1e-15);
        assert!((rule.weights[0] - 1.0).abs() < 1e-15);
        assert!((rule.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!((rule.integrate(|t| t) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn laguerre_moments_are_factorials() {
        for count in 1..=20usize {
            let rule = gauss_laguerre(count).unwrap();
            assert_eq!(rule.kind, QuadratureKind::GaussLaguerre);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 1.0).abs() < 1e-13, "N={count}: {total}");
            for k in 0..(2 * count as u32) {
                let got = rule.integrate(|t| t.powi(k as i32));
                let want = factorial(k);
                assert!(
                    (got - want).abs() <= 1e-12 * want,
                    "N={count} k={k}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn two_point_laguerre_known_nodes() {
        let rule = gauss_laguerre(2).unwrap();
        let s2 = 2.0f64.sqrt();
        assert!((rule.nodes[0] - (2.0 - s2)).abs() < 1e-15);
        assert!((rule.nodes[1] - (2.0 + s2)).abs() < 1e-14);
        assert!((rule.weights[0] - (2.0 + s2) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn legendre_reference_exactness() {
        for count in [1usize, 2, 5, 16] {
            let (x, w) = gauss_legendre_reference(count).unwrap();
            for k in 0..(2 * count as i32) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
                let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - want).abs() < 1e-14, "N={count} k={k}");
            }
        }
    }

    #[test]
    fn composite_rule_integrates_exponential() {
        let rule = composite_legendre(&[0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 40.0], 16).unwrap();
        assert_eq!(rule.kind, QuadratureKind::CompositeLegendre);
        let got = rule.integrate(|s| (-3.0 * s).exp());
        assert!((got - (1.0 - (-120.0f64).exp()) / 3.0).abs() < 1e-14);
        assert!(composite_legendre(&[1.0, 0.5], 4).is_err());
        assert!(gauss_laguerre(0).is_err());
    }
}
