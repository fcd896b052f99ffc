use serde::{Deserialize, Serialize};

use super::quadrature::{gauss_lobatto_points, gauss_rule, QuadratureRule};
use crate::error::Result;
use crate::tensor::Matrix1D;

/// Lagrange basis of degree `k` on the Gauss-Lobatto nodes of `[0, 1]`,
/// tabulated at a Gauss rule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Basis1D {
    pub degree: usize,
    pub nodes: Vec<f64>,
    pub quadrature: QuadratureRule,
    /// `s[q, j] = φ_j(ξ_q)`.
    pub s: Matrix1D,
    /// `d[q, j] = φ_j'(ξ_q)`.
    pub d: Matrix1D,
}

impl Basis1D {
    /// Basis tabulated at the `k + 1` point Gauss rule (exact for degree `2k + 1`).
    pub fn new(k: usize) -> Result<Self> {
        Self::with_quadrature(k, gauss_rule(k + 1)?)
    }

    pub fn with_quadrature(k: usize, quadrature: QuadratureRule) -> Result<Self> {
        let nodes = gauss_lobatto_points(k)?;
        let q = quadrature.len();
        let s = Matrix1D::from_fn(q, k + 1, |i, j| lagrange(&nodes, j, quadrature.points[i]));
        let d = Matrix1D::from_fn(q, k + 1, |i, j| lagrange_derivative(&nodes, j, quadrature.points[i]));
        Ok(Self {
            degree: k,
            nodes,
            quadrature,
            s,
            d,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.degree + 1
    }

    pub fn value(&self, j: usize, x: f64) -> f64 {
        lagrange(&self.nodes, j, x)
    }

    pub fn derivative(&self, j: usize, x: f64) -> f64 {
        lagrange_derivative(&self.nodes, j, x)
    }

    pub fn values_at(&self, x: f64) -> Vec<f64> {
        (0..=self.degree).map(|j| self.value(j, x)).collect()
    }

    pub fn derivatives_at(&self, x: f64) -> Vec<f64> {
        (0..=self.degree).map(|j| self.derivative(j, x)).collect()
    }
}

pub(crate) fn lagrange(nodes: &[f64], j: usize, x: f64) -> f64 {
    let xj = nodes[j];
    nodes
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != j)
        .map(|(_, &xm)| (x - xm) / (xj - xm))
        .product()
}

pub(crate) fn lagrange_derivative(nodes: &[f64], j: usize, x: f64) -> f64 {
    let xj = nodes[j];
    let mut sum = 0.0;
    for (l, &xl) in nodes.iter().enumerate() {
        if l == j {
            continue;
        }
        let mut prod = 1.0 / (xj - xl);
        for (m, &xm) in nodes.iter().enumerate() {
            if m != j && m != l {
                prod *= (x - xm) / (xj - xm);
            }
        }
        sum += prod;
    }
    sum
}
