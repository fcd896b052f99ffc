//! Right-preconditioned GMRES variants without restart, zero initial guess.
//!
//! Orthogonalization is modified Gram-Schmidt with a second pass whenever the
//! new vector loses more than a factor `1/√2` of its norm.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{contract, invalid, Result};

pub const DEFAULT_MAXIT: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// The Krylov space became invariant before the tolerance was met.
    Breakdown,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// `||r_j||_2` for `j = 0..=iterations`.
    pub residual_history: Vec<f64>,
    pub final_relative_residual: f64,
    pub wall_time: f64,
    pub l2_error: Option<f64>,
    pub h1_error: Option<f64>,
    pub status: SolveStatus,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn relative_history(&self) -> Vec<f64> {
        let r0 = self.residual_history.first().copied().unwrap_or(0.0);
        if r0 == 0.0 {
            return vec![0.0; self.residual_history.len()];
        }
        self.residual_history.iter().map(|r| r / r0).collect()
    }
}

/// Arnoldi data of a finished run: `A Z_j = V_{j+1} H̄_j`.
#[derive(Clone, Debug, Default)]
pub struct ArnoldiBasis {
    pub v: Vec<Vec<f64>>,
    /// Preconditioned directions (flexible variant only).
    pub z: Vec<Vec<f64>>,
    /// Column `j` holds `H̄[0..=j+1, j]`.
    pub h: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

type Operator<'a> = &'a mut dyn FnMut(&[f64]) -> Result<Vec<f64>>;

fn run(
    apply_a: Operator<'_>,
    apply_m: Operator<'_>,
    b: &[f64],
    tol: f64,
    maxit: usize,
    flexible: bool,
) -> Result<(Vec<f64>, SolveReport, ArnoldiBasis)> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let start = Instant::now();
    let n = b.len();
    let beta = norm(b);
    let mut basis = ArnoldiBasis::default();
    let mut history = vec![beta];
    if beta == 0.0 {
        let report = SolveReport {
            iterations: 0,
            residual_history: history,
            final_relative_residual: 0.0,
            wall_time: start.elapsed().as_secs_f64(),
            l2_error: None,
            h1_error: None,
            status: SolveStatus::Converged,
        };
        return Ok((vec![0.0; n], report, basis));
    }
    basis.v.push(b.iter().map(|x| x / beta).collect());
    let mut rotations: Vec<(f64, f64)> = Vec::new();
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut g = vec![beta];
    let mut status = SolveStatus::MaxIterations;

    for j in 0..maxit {
        let z = apply_m(&basis.v[j])?;
        if z.len() != n {
            return Err(contract("preconditioner changed the vector length"));
        }
        let mut w = apply_a(&z)?;
        if w.len() != n {
            return Err(contract("operator changed the vector length"));
        }
        if flexible {
            basis.z.push(z);
        }
        let mut h = vec![0.0; j + 2];
        let before = norm(&w);
        for (i, v) in basis.v.iter().enumerate() {
            let hij = dot(&w, v);
            h[i] = hij;
            axpy(-hij, v, &mut w);
        }
        let mut after = norm(&w);
        if after < before / std::f64::consts::SQRT_2 {
            for (i, v) in basis.v.iter().enumerate() {
                let c = dot(&w, v);
                h[i] += c;
                axpy(-c, v, &mut w);
            }
            after = norm(&w);
        }
        h[j + 1] = after;
        basis.h.push(h.clone());

        let mut col = h;
        for (i, &(c, s)) in rotations.iter().enumerate() {
            let (a, bb) = (col[i], col[i + 1]);
            col[i] = c * a + s * bb;
            col[i + 1] = -s * a + c * bb;
        }
        let (a, bb) = (col[j], col[j + 1]);
        let r = a.hypot(bb);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (a / r, bb / r) };
        col[j] = r;
        col[j + 1] = 0.0;
        rotations.push((c, s));
        let gj = g[j];
        g[j] = c * gj;
        g.push(-s * gj);
        col.truncate(j + 1);
        r_cols.push(col);

        let res = g[j + 1].abs();
        history.push(res);
        let invariant = after <= 1e-14 * before || after == 0.0;
        if !invariant {
            basis.v.push(w.iter().map(|x| x / after).collect());
        }
        if res <= tol * beta {
            status = SolveStatus::Converged;
            break;
        }
        if invariant {
            status = SolveStatus::Breakdown;
            break;
        }
    }

    let m = r_cols.len();
    let mut y = vec![0.0; m];
    for i in (0..m).rev() {
        let mut s = g[i];
        for k in i + 1..m {
            s -= r_cols[k][i] * y[k];
        }
        y[i] = s / r_cols[i][i];
    }
    let x = if flexible {
        let mut x = vec![0.0; n];
        for (yi, z) in y.iter().zip(&basis.z) {
            axpy(*yi, z, &mut x);
        }
        x
    } else {
        let mut u = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis.v) {
            axpy(*yi, v, &mut u);
        }
        apply_m(&u)?
    };
    let report = SolveReport {
        iterations: m,
        final_relative_residual: history[m] / beta,
        residual_history: history,
        wall_time: start.elapsed().as_secs_f64(),
        l2_error: None,
        h1_error: None,
        status,
    };
    Ok((x, report, basis))
}

/// Flexible GMRES: the preconditioner may change between iterations.
pub fn fgmres(
    mut apply_a: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    mut apply_m: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let (x, report, _) = run(&mut apply_a, &mut apply_m, b, tol, maxit, true)?;
    Ok((x, report))
}

/// [`fgmres`] that also returns the Arnoldi bases.
pub fn fgmres_with_basis(
    mut apply_a: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    mut apply_m: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport, ArnoldiBasis)> {
    run(&mut apply_a, &mut apply_m, b, tol, maxit, true)
}

/// Right-preconditioned GMRES assuming a fixed linear preconditioner:
/// `x = M V y` is formed once at the end.
pub fn gmres(
    mut apply_a: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    mut apply_m: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let (x, report, _) = run(&mut apply_a, &mut apply_m, b, tol, maxit, false)?;
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ident(v: &[f64]) -> Result<Vec<f64>> {
        Ok(v.to_vec())
    }

    #[test]
    fn identity_in_one_step() {
        let b = vec![1.0, -2.0, 3.0];
        for solver in [fgmres, gmres] {
            let (x, rep) = solver(ident, ident, &b, 1e-10, 10).unwrap();
            assert_eq!(rep.iterations, 1);
            assert!(rep.converged());
            for (a, c) in x.iter().zip(&b) {
                assert!((a - c).abs() < 1e-14);
            }
            assert_eq!(rep.residual_history.len(), 2);
        }
    }

    #[test]
    fn exact_preconditioner() {
        let d = [1.0, 10.0, 100.0, 0.5];
        let a = |v: &[f64]| Ok(v.iter().zip(&d).map(|(x, di)| x * di).collect());
        let m = |v: &[f64]| Ok(v.iter().zip(&d).map(|(x, di)| x / di).collect());
        let b = vec![1.0, 1.0, 1.0, 1.0];
        let (x, rep) = fgmres(a, m, &b, 1e-12, 10).unwrap();
        assert_eq!(rep.iterations, 1);
        for (xi, di) in x.iter().zip(&d) {
            assert!((xi - 1.0 / di).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_rhs_and_bad_tol() {
        let (x, rep) = fgmres(ident, ident, &[0.0, 0.0], 1e-8, 5).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
        assert_eq!(rep.iterations, 0);
        assert!(fgmres(ident, ident, &[1.0], 0.0, 5).is_err());
        assert!(fgmres(ident, ident, &[1.0], 1.0, 5).is_err());
    }

    #[test]
    fn max_iterations_status() {
        let n = 20;
        let a = |v: &[f64]| Ok((0..v.len()).map(|i| (i as f64 + 1.0) * v[i]).collect());
        let b = vec![1.0; n];
        let (_, rep) = gmres(a, ident, &b, 1e-12, 3).unwrap();
        assert_eq!(rep.status, SolveStatus::MaxIterations);
        assert_eq!(rep.iterations, 3);
        assert_eq!(rep.residual_history.len(), 4);
        assert!(rep.residual_history.windows(2).all(|w| w[1] <= w[0]));
    }
}
