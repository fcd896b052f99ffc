use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Quadrature on the unit interval `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let h = b - a;
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + h * x))
            .sum::<f64>()
            * h
    }
}

/// Legendre `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // endpoint limit P_n'(±1) = (±1)^{n+1} n(n+1)/2
        x.powi(n as i32 + 1) * n * (n + 1.0) / 2.0
    } else {
        n * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

/// `q`-point Gauss-Legendre rule on `[0, 1]`, exact for degree `2q - 1`.
pub fn gauss_rule(q: usize) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(invalid("Gauss rule needs at least one point"));
    }
    let mut points = vec![0.0; q];
    let mut weights = vec![0.0; q];
    for i in 0..q {
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(q, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(q, x);
        points[i] = 0.5 * (x + 1.0);
        weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    Ok(QuadratureRule { points, weights })
}

/// `k + 1` Gauss-Lobatto points on `[0, 1]` (endpoints included).
pub fn gauss_lobatto_points(k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(invalid("Gauss-Lobatto points need degree k >= 1"));
    }
    let mut nodes = vec![0.0; k + 1];
    nodes[k] = 1.0;
    let kf = k as f64;
    for i in 1..k {
        // interior nodes are the roots of P_k'
        let mut x = -(std::f64::consts::PI * i as f64 / kf).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(k, x);
            let ddp = (2.0 * x * dp - kf * (kf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = 0.5 * (x + 1.0);
    }
    Ok(nodes)
}
