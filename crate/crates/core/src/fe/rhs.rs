use rayon::prelude::*;

use super::mesh::Level;
use super::quadrature::gauss_rule;
use super::sipg::penalty;
use crate::tensor::{contract_slice, Matrix1D};

/// Applies `mats[a]` along every axis `a` of a cubic tensor with `cols` entries per axis.
pub(crate) fn apply_per_axis(mats: &[&Matrix1D], input: &[f64]) -> Vec<f64> {
    let dim = mats.len();
    let mut extents: Vec<usize> = mats.iter().map(|m| m.cols()).collect();
    let mut cur = input.to_vec();
    for a in 0..dim {
        let m = mats[a];
        let mut out_ext = extents.clone();
        out_ext[a] = m.rows();
        let mut out = vec![0.0; out_ext.iter().product()];
        contract_slice(m.as_slice(), m.rows(), m.cols(), &cur, &extents, a, &mut out);
        cur = out;
        extents = out_ext;
    }
    cur
}

/// Iterates a multi-index over `extents` in lexicographic order (axis 0 fastest).
pub(crate) fn multi_index(flat: usize, extents: &[usize]) -> [usize; 3] {
    let mut idx = [0; 3];
    let mut rem = flat;
    for (a, &e) in extents.iter().enumerate() {
        idx[a] = rem % e;
        rem /= e;
    }
    idx
}

/// Load vector `b_i = ∫ f φ_i + Σ_{boundary faces} ∫ (γ g φ_i − g ∂_n φ_i)`
/// using `k + 2` Gauss points per axis.
pub fn assemble_rhs(
    level: &Level,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
) -> Vec<f64> {
    let dim = level.dim;
    let k = level.degree;
    let h = level.h;
    let rule = gauss_rule(k + 2).expect("rule size is positive");
    let q = rule.len();
    let basis = &level.basis;
    let st = Matrix1D::from_fn(k + 1, q, |i, p| rule.weights[p] * basis.value(i, rule.points[p]));
    let cd = level.dofs_per_cell();
    let n = level.cells_per_axis;
    let gamma = penalty(k, h, h);
    let q_ext = vec![q; dim];
    let n_q = q.pow(dim as u32);

    let cells: Vec<Vec<f64>> = (0..level.n_cells())
        .into_par_iter()
        .map(|cell| {
            let c = level.cell_coords(cell);
            let mut fvals = vec![0.0; n_q];
            let mut x = [0.0; 3];
            for (p, fv) in fvals.iter_mut().enumerate() {
                let idx = multi_index(p, &q_ext);
                for a in 0..dim {
                    x[a] = (c[a] as f64 + rule.points[idx[a]]) * h;
                }
                *fv = f(&x[..dim]);
            }
            let mats = vec![&st; dim];
            let mut b = apply_per_axis(&mats, &fvals);
            let vol = h.powi(dim as i32);
            b.iter_mut().for_each(|v| *v *= vol);

            for axis in 0..dim {
                for (side, at) in [(0usize, 0.0f64), (n - 1, 1.0f64)] {
                    if c[axis] != side {
                        continue;
                    }
                    let normal = if at == 0.0 { -1.0 } else { 1.0 };
                    let face_ext: Vec<usize> = (0..dim).map(|a| if a == axis { 1 } else { q }).collect();
                    let n_face = face_ext.iter().product::<usize>();
                    let mut gvals = vec![0.0; n_face];
                    for (p, gv) in gvals.iter_mut().enumerate() {
                        let idx = multi_index(p, &face_ext);
                        for a in 0..dim {
                            x[a] = if a == axis {
                                at
                            } else {
                                (c[a] as f64 + rule.points[idx[a]]) * h
                            };
                        }
                        *gv = g(&x[..dim]);
                    }
                    if gvals.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    let area = h.powi(dim as i32 - 1);
                    let val = Matrix1D::from_fn(k + 1, 1, |i, _| basis.value(i, at));
                    let dn = Matrix1D::from_fn(k + 1, 1, |i, _| normal * basis.derivative(i, at) / h);
                    let penalty_part = {
                        let mats: Vec<&Matrix1D> = (0..dim).map(|a| if a == axis { &val } else { &st }).collect();
                        apply_per_axis(&mats, &gvals)
                    };
                    let flux_part = {
                        let mats: Vec<&Matrix1D> = (0..dim).map(|a| if a == axis { &dn } else { &st }).collect();
                        apply_per_axis(&mats, &gvals)
                    };
                    for i in 0..cd {
                        b[i] += area * (gamma * penalty_part[i] - flux_part[i]);
                    }
                }
            }
            b
        })
        .collect();
    cells.concat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fe::operator::apply_operator;
    use crate::precision::PrecisionMode;

    #[test]
    fn zero_data_gives_zero() {
        let level = Level::new(3, 2, 1).unwrap();
        let b = assemble_rhs(&level, &|_| 0.0, &|_| 0.0);
        assert_eq!(b.len(), level.n_dofs());
        assert!(b.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_in_f() {
        let level = Level::new(2, 2, 2).unwrap();
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[1];
        let b1 = assemble_rhs(&level, &f, &|_| 0.0);
        let b2 = assemble_rhs(&level, &|x| 2.5 * f(x), &|_| 0.0);
        for (a, b) in b1.iter().zip(&b2) {
            assert!((2.5 * a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn constant_load_integrates_to_volume() {
        let level = Level::new(3, 3, 1).unwrap();
        let b = assemble_rhs(&level, &|_| 1.0, &|_| 0.0);
        let total: f64 = b.iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn polynomial_solution_is_reproduced() {
        // u = x + 2y is in the discrete space, so A u_I equals the load with f = 0 and g = u
        for dim in [1, 2, 3] {
            let level = Level::new(dim, 2, 2).unwrap();
            let exact = |x: &[f64]| x[0] + if x.len() > 1 { 2.0 * x[1] } else { 0.0 };
            let u: Vec<f64> = (0..level.n_dofs())
                .map(|i| exact(&level.dof_coords(i)[..dim]))
                .collect();
            let au = apply_operator(&level, &u, PrecisionMode::Fp64).unwrap();
            let b = assemble_rhs(&level, &|_| 0.0, &exact);
            let scale = b.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for (x, y) in au.iter().zip(&b) {
                assert!((x - y).abs() < 1e-11 * scale, "dim {dim}: {x} vs {y}");
            }
        }
    }
}
