use rayon::prelude::*;

use super::mesh::Level;
use super::quadrature::gauss_rule;
use super::rhs::{apply_per_axis, multi_index};
use crate::error::{contract, Result};
use crate::tensor::Matrix1D;

struct CellQuadrature {
    points: Vec<f64>,
    weights: Vec<f64>,
    s: Matrix1D,
    d: Matrix1D,
}

fn cell_quadrature(level: &Level) -> CellQuadrature {
    // exact for degree 2k + 3, covering |u_h|^2 and the smooth remainder
    let rule = gauss_rule(level.degree + 2).expect("rule size is positive");
    let b = &level.basis;
    let s = Matrix1D::from_fn(rule.len(), level.degree + 1, |p, j| b.value(j, rule.points[p]));
    let d = Matrix1D::from_fn(rule.len(), level.degree + 1, |p, j| b.derivative(j, rule.points[p]));
    CellQuadrature {
        points: rule.points,
        weights: rule.weights,
        s,
        d,
    }
}

fn check_len(level: &Level, u_h: &[f64]) -> Result<()> {
    if u_h.len() != level.n_dofs() {
        return Err(contract(format!(
            "vector has length {}, level has {} DoFs",
            u_h.len(),
            level.n_dofs()
        )));
    }
    Ok(())
}

/// Sums per-cell values in cell order so the result is thread-count independent.
fn cell_sum(level: &Level, per_cell: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
    let parts: Vec<f64> = (0..level.n_cells()).into_par_iter().map(per_cell).collect();
    parts.iter().sum()
}

/// `||u_h − u||_{L2(Ω)}`.
pub fn l2_error(level: &Level, u_h: &[f64], u_exact: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Result<f64> {
    check_len(level, u_h)?;
    let dim = level.dim;
    let cq = cell_quadrature(level);
    let q = cq.points.len();
    let cd = level.dofs_per_cell();
    let ext = vec![q; dim];
    let vol = level.h.powi(dim as i32);
    let total = cell_sum(level, |cell| {
        let c = level.cell_coords(cell);
        let mats = vec![&cq.s; dim];
        let vals = apply_per_axis(&mats, &u_h[cell * cd..(cell + 1) * cd]);
        let mut x = [0.0; 3];
        let mut sum = 0.0;
        for (p, &uh) in vals.iter().enumerate() {
            let idx = multi_index(p, &ext);
            let mut w = vol;
            for a in 0..dim {
                x[a] = (c[a] as f64 + cq.points[idx[a]]) * level.h;
                w *= cq.weights[idx[a]];
            }
            let e = uh - u_exact(&x[..dim]);
            sum += w * e * e;
        }
        sum
    });
    Ok(total.sqrt())
}

/// Broken `|u_h − u|_{H1}` given the exact gradient.
pub fn h1_seminorm_error(
    level: &Level,
    u_h: &[f64],
    grad_exact: &(dyn Fn(&[f64]) -> [f64; 3] + Sync),
) -> Result<f64> {
    check_len(level, u_h)?;
    let dim = level.dim;
    let cq = cell_quadrature(level);
    let q = cq.points.len();
    let cd = level.dofs_per_cell();
    let ext = vec![q; dim];
    let vol = level.h.powi(dim as i32);
    let total = cell_sum(level, |cell| {
        let c = level.cell_coords(cell);
        let local = &u_h[cell * cd..(cell + 1) * cd];
        let grads: Vec<Vec<f64>> = (0..dim)
            .map(|comp| {
                let mats: Vec<&Matrix1D> = (0..dim).map(|a| if a == comp { &cq.d } else { &cq.s }).collect();
                apply_per_axis(&mats, local)
            })
            .collect();
        let mut x = [0.0; 3];
        let mut sum = 0.0;
        for p in 0..q.pow(dim as u32) {
            let idx = multi_index(p, &ext);
            let mut w = vol;
            for a in 0..dim {
                x[a] = (c[a] as f64 + cq.points[idx[a]]) * level.h;
                w *= cq.weights[idx[a]];
            }
            let g = grad_exact(&x[..dim]);
            for comp in 0..dim {
                let e = grads[comp][p] / level.h - g[comp];
                sum += w * e * e;
            }
        }
        sum
    });
    Ok(total.sqrt())
}

/// Nodal interpolant of `f` at the Gauss-Lobatto DoF locations.
pub fn interpolate(level: &Level, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Vec<f64> {
    (0..level.n_dofs())
        .into_par_iter()
        .map(|i| f(&level.dof_coords(i)[..level.dim]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(x: &[f64]) -> f64 {
        x.iter().map(|&t| (PI * t).sin()).product()
    }

    fn sine_grad(x: &[f64]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for a in 0..x.len() {
            g[a] = PI;
            for b in 0..x.len() {
                g[a] *= if a == b { (PI * x[b]).cos() } else { (PI * x[b]).sin() };
            }
        }
        g
    }

    #[test]
    fn zero_error_for_zero() {
        let level = Level::new(3, 1, 1).unwrap();
        assert_eq!(l2_error(&level, &vec![0.0; 64], &|_| 0.0).unwrap(), 0.0);
        assert_eq!(h1_seminorm_error(&level, &vec![0.0; 64], &|_| [0.0; 3]).unwrap(), 0.0);
        assert!(l2_error(&level, &[0.0], &|_| 0.0).is_err());
    }

    #[test]
    fn exact_for_polynomials_in_space() {
        let level = Level::new(2, 2, 2).unwrap();
        let f = |x: &[f64]| x[0] * x[0] - 3.0 * x[0] * x[1];
        let u = interpolate(&level, &f);
        assert!(l2_error(&level, &u, &f).unwrap() < 1e-14);
        let g = |x: &[f64]| [2.0 * x[0] - 3.0 * x[1], -3.0 * x[0], 0.0];
        assert!(h1_seminorm_error(&level, &u, &g).unwrap() < 1e-13);
    }

    #[test]
    fn norm_of_sine() {
        let level = Level::new(2, 3, 2).unwrap();
        let zero = vec![0.0; level.n_dofs()];
        // ||sin(πx)sin(πy)||^2 = 1/4, |.|_{H1}^2 = π²/2
        assert!((l2_error(&level, &zero, &sine).unwrap() - 0.5).abs() < 1e-8);
        let h1 = h1_seminorm_error(&level, &zero, &sine_grad).unwrap();
        assert!((h1 - PI / 2f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn interpolation_error_decreases() {
        for k in 1..=3 {
            let mut prev = f64::INFINITY;
            for l in 1..=3 {
                let level = Level::new(3, k, l).unwrap();
                let u = interpolate(&level, &sine);
                let e = l2_error(&level, &u, &sine).unwrap();
                assert!(e < prev);
                prev = e;
            }
        }
    }
}
