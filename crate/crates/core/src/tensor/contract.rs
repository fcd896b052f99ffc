use super::{axis_split, apply_separable, Matrix1D, SeparableOperator, TensorField};
use crate::error::{contract, invalid, Result};

/// Raw directional contraction on lexicographic storage.
///
/// `out[o, i, s] = sum_k m[i, k] * input[o, k, s]`, accumulated in ascending `k`
/// starting from zero. `out` must hold `stride * rows * outer` entries.
pub(crate) fn contract_slice(
    m: &[f64],
    rows: usize,
    cols: usize,
    input: &[f64],
    extents: &[usize],
    axis: usize,
    out: &mut [f64],
) {
    let (stride, outer) = axis_split(extents, axis);
    debug_assert_eq!(extents[axis], cols);
    debug_assert_eq!(input.len(), stride * cols * outer);
    debug_assert_eq!(out.len(), stride * rows * outer);
    if stride == 1 {
        for o in 0..outer {
            let src = &input[o * cols..(o + 1) * cols];
            let dst = &mut out[o * rows..(o + 1) * rows];
            for (i, d) in dst.iter_mut().enumerate() {
                let row = &m[i * cols..(i + 1) * cols];
                let mut acc = 0.0;
                for k in 0..cols {
                    acc += row[k] * src[k];
                }
                *d = acc;
            }
        }
        return;
    }
    for o in 0..outer {
        let src = &input[o * cols * stride..(o + 1) * cols * stride];
        let dst = &mut out[o * rows * stride..(o + 1) * rows * stride];
        for i in 0..rows {
            let orow = &mut dst[i * stride..(i + 1) * stride];
            orow.fill(0.0);
            for k in 0..cols {
                let a = m[i * cols + k];
                let irow = &src[k * stride..(k + 1) * stride];
                for (d, &x) in orow.iter_mut().zip(irow) {
                    *d += a * x;
                }
            }
        }
    }
}

/// Applies `m` along `axis` of `u`, leaving every other axis untouched.
pub fn contract_dir(m: &Matrix1D, u: &TensorField, axis: usize) -> Result<TensorField> {
    if axis >= u.dim() {
        return Err(invalid(format!("axis {axis} out of range for rank {}", u.dim())));
    }
    if m.cols() != u.extents()[axis] {
        return Err(contract(format!(
            "matrix has {} columns, tensor extent along axis {axis} is {}",
            m.cols(),
            u.extents()[axis]
        )));
    }
    let mut extents = u.extents().to_vec();
    extents[axis] = m.rows();
    let mut out = vec![0.0; extents.iter().product()];
    contract_slice(m.as_slice(), m.rows(), m.cols(), u.values(), u.extents(), axis, &mut out);
    TensorField::new(extents, out)
}

/// Gradient components `(S⊗S⊗D)u, (S⊗D⊗S)u, (D⊗S⊗S)u` at the tensor quadrature points.
///
/// `s` and `d` hold the 1D shape values and derivatives (`n_q x N`).
pub fn evaluate_gradient_at_quadrature(
    s: &Matrix1D,
    d: &Matrix1D,
    u: &TensorField,
) -> Result<[TensorField; 3]> {
    if u.dim() != 3 {
        return Err(contract("gradient evaluation needs a rank-3 tensor"));
    }
    if s.rows() != d.rows() || s.cols() != d.cols() {
        return Err(contract("value and derivative matrices differ in shape"));
    }
    let component = |c: usize| {
        let factors = (0..3).map(|a| if a == c { d.clone() } else { s.clone() }).collect();
        SeparableOperator::new(3, vec![factors]).and_then(|op| apply_separable(&op, u))
    };
    Ok([component(0)?, component(1)?, component(2)?])
}

/// Gradient components on the face with normal `face_axis`.
///
/// `s_f`/`d_f` (`1 x N`) evaluate the shape functions and their derivative on the
/// face; tangential axes use `s`/`d`. The output has extent 1 along `face_axis`.
pub fn evaluate_face_trace(
    s_f: &Matrix1D,
    d_f: &Matrix1D,
    s: &Matrix1D,
    d: &Matrix1D,
    u: &TensorField,
    face_axis: usize,
) -> Result<[TensorField; 3]> {
    if u.dim() != 3 {
        return Err(contract("face gradient evaluation needs a rank-3 tensor"));
    }
    check_face_args(s_f, d_f, u, face_axis)?;
    if s.rows() != d.rows() || s.cols() != d.cols() {
        return Err(contract("value and derivative matrices differ in shape"));
    }
    let component = |c: usize| {
        let factors = (0..3)
            .map(|a| match (a == face_axis, a == c) {
                (true, true) => d_f.clone(),
                (true, false) => s_f.clone(),
                (false, true) => d.clone(),
                (false, false) => s.clone(),
            })
            .collect();
        SeparableOperator::new(3, vec![factors]).and_then(|op| apply_separable(&op, u))
    };
    Ok([component(0)?, component(1)?, component(2)?])
}

/// Function values on the face with normal `face_axis`: `s_f` along the normal, `s` elsewhere.
pub fn evaluate_face_values(
    s_f: &Matrix1D,
    s: &Matrix1D,
    u: &TensorField,
    face_axis: usize,
) -> Result<TensorField> {
    check_face_args(s_f, s_f, u, face_axis)?;
    let factors = (0..u.dim()).map(|a| if a == face_axis { s_f.clone() } else { s.clone() }).collect();
    apply_separable(&SeparableOperator::new(u.dim(), vec![factors])?, u)
}

fn check_face_args(s_f: &Matrix1D, d_f: &Matrix1D, u: &TensorField, face_axis: usize) -> Result<()> {
    if face_axis >= u.dim() {
        return Err(invalid(format!("face axis {face_axis} out of range")));
    }
    if s_f.rows() != 1 || d_f.rows() != 1 {
        return Err(contract("face matrices must be 1 x N"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_leaves_tensor_unchanged() {
        let u = TensorField::from_fn(&[3, 4, 2], |i| (i[0] * 7 + i[1] * 3 + i[2]) as f64 - 4.5).unwrap();
        for axis in 0..3 {
            let n = u.extents()[axis];
            assert_eq!(contract_dir(&Matrix1D::identity(n), &u, axis).unwrap(), u);
        }
    }

    #[test]
    fn slow_axis_contraction_picks_first_column() {
        // (A ⊗ I) e_0: value 1 at (0,0) spreads along axis 1 as A's first column.
        let m = Matrix1D::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let mut u = TensorField::zeros(&[2, 2]).unwrap();
        u.set(&[0, 0], 1.0);
        let v = contract_dir(&m, &u, 1).unwrap();
        assert_eq!(v.values(), &[1.0, 0.0, 3.0, 0.0]);
    }

    #[test]
    fn shape_errors() {
        let u = TensorField::zeros(&[3, 3]).unwrap();
        let m = Matrix1D::identity(2);
        assert!(matches!(contract_dir(&m, &u, 0), Err(crate::Error::ContractViolation(_))));
        assert!(matches!(contract_dir(&Matrix1D::identity(3), &u, 2), Err(crate::Error::InvalidArgument(_))));
    }

    #[test]
    fn rectangular_contraction_changes_extent() {
        let m = Matrix1D::from_fn(5, 3, |i, j| (i + j) as f64);
        let u = TensorField::from_fn(&[2, 3, 4], |i| (i[0] + i[1] + i[2]) as f64).unwrap();
        let v = contract_dir(&m, &u, 1).unwrap();
        assert_eq!(v.extents(), &[2, 5, 4]);
        let expect: f64 = (0..3).map(|k| (4 + k) as f64 * (1 + k + 2) as f64).sum();
        assert_eq!(v.get(&[1, 4, 2]), expect);
    }
}
